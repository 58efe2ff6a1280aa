use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityKind {
    Cosine,
    AdjustedCosine,
    Pearson,
}

/// Similarity of two aligned rating vectors over their co-rated positions.
///
/// `None` (undefined) when fewer than `min_overlap` positions are co-rated or
/// a centered vector has zero norm. `Pearson` centers each vector on its own
/// co-rated mean; `AdjustedCosine` subtracts `axis_means[p]` (the mean rating
/// of whoever sits at position `p`) from both vectors. Without `axis_means`
/// adjusted cosine degrades to plain cosine.
pub fn similarity(
    a: &[Option<f64>],
    b: &[Option<f64>],
    kind: SimilarityKind,
    min_overlap: usize,
    axis_means: Option<&[f64]>,
) -> Option<f64> {
    let co_rated: Vec<(usize, f64, f64)> = a
        .iter()
        .zip(b)
        .enumerate()
        .filter_map(|(p, (x, y))| Some((p, (*x)?, (*y)?)))
        .collect();
    if co_rated.is_empty() || co_rated.len() < min_overlap {
        return None;
    }

    let centered: Vec<(f64, f64)> = match (kind, axis_means) {
        (SimilarityKind::Pearson, _) => {
            let n = co_rated.len() as f64;
            let mean_a = co_rated.iter().map(|c| c.1).sum::<f64>() / n;
            let mean_b = co_rated.iter().map(|c| c.2).sum::<f64>() / n;
            co_rated
                .iter()
                .map(|&(_, x, y)| (x - mean_a, y - mean_b))
                .collect()
        }
        (SimilarityKind::AdjustedCosine, Some(means)) => co_rated
            .iter()
            .map(|&(p, x, y)| (x - means[p], y - means[p]))
            .collect(),
        _ => co_rated.iter().map(|&(_, x, y)| (x, y)).collect(),
    };

    let (mut dot, mut norm_a, mut norm_b) = (0.0, 0.0, 0.0);
    for (x, y) in centered {
        dot += x * y;
        norm_a += x * x;
        norm_b += y * y;
    }
    if norm_a == 0.0 || norm_b == 0.0 {
        return None;
    }
    Some((dot / (norm_a * norm_b).sqrt()).clamp(-1.0, 1.0))
}
