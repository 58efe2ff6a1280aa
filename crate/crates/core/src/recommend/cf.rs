use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::domain::{ItemId, RatingsMatrix, RecommendationKind, ReservationNumber};

use super::{rank, similarity, Recommendation, RecommendError, RecommenderConfig, SimilarityKind};

/// A ratings grid oriented so that rows are the entities whose neighborhoods
/// we search: guests for user–user, items for item–item.
struct Oriented {
    cells: Vec<Vec<Option<f64>>>,
    /// Rank of each row label in ascending label order, for tie-breaks.
    label_rank: Vec<usize>,
    row_means: Vec<Option<f64>>,
    col_means: Vec<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn label_ranks<T: Ord>(labels: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
    let mut rank = vec![0; labels.len()];
    for (r, i) in order.into_iter().enumerate() {
        rank[i] = r;
    }
    rank
}

impl Oriented {
    fn users(matrix: &RatingsMatrix) -> Self {
        Self::new(matrix.dense(), label_ranks(matrix.rows()))
    }

    fn items(matrix: &RatingsMatrix) -> Self {
        let dense = matrix.dense();
        let cells = (0..matrix.cols().len())
            .map(|c| dense.iter().map(|row| row[c]).collect())
            .collect();
        Self::new(cells, label_ranks(matrix.cols()))
    }

    fn new(cells: Vec<Vec<Option<f64>>>, label_rank: Vec<usize>) -> Self {
        let n_cols = cells.first().map_or(0, Vec::len);
        let row_means = cells.iter().map(|row| mean(row.iter().flatten().copied())).collect();
        // Only consulted at co-rated positions, where the mean always exists.
        let col_means = (0..n_cols)
            .map(|c| mean(cells.iter().filter_map(|row| row[c])).unwrap_or(0.0))
            .collect();
        Self {
            cells,
            label_rank,
            row_means,
            col_means,
        }
    }

    fn similarity(&self, a: usize, b: usize, kind: SimilarityKind, min_overlap: usize) -> Option<f64> {
        similarity(
            &self.cells[a],
            &self.cells[b],
            kind,
            min_overlap,
            Some(&self.col_means),
        )
    }

    #[allow(clippy::needless_range_loop)]
    fn similarity_table(&self, kind: SimilarityKind, min_overlap: usize) -> Vec<Vec<Option<f64>>> {
        let n = self.cells.len();
        let mut table = vec![vec![None; n]; n];
        for a in 0..n {
            for b in a..n {
                let s = self.similarity(a, b, kind, min_overlap);
                table[a][b] = s;
                table[b][a] = s;
            }
        }
        table
    }

    /// Mean-centered k-nearest-neighbor estimate for cell (`row`, `col`),
    /// clamped to the 1–5 scale. `sims(v)` is the similarity of `row` to `v`.
    fn predict(&self, row: usize, col: usize, k: usize, sims: impl Fn(usize) -> Option<f64>) -> Option<f64> {
        let own_mean = self.row_means[row]?;
        let mut neighbors: Vec<(usize, f64)> = (0..self.cells.len())
            .filter(|&v| v != row && self.cells[v][col].is_some())
            .filter_map(|v| sims(v).filter(|s| *s > 0.0).map(|s| (v, s)))
            .collect();
        neighbors.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(Ordering::Equal)
                .then(self.label_rank[a.0].cmp(&self.label_rank[b.0]))
        });
        neighbors.truncate(k);
        if neighbors.is_empty() {
            return None;
        }
        let (mut numerator, mut denominator) = (0.0, 0.0);
        for (v, s) in neighbors {
            let rating = self.cells[v][col].expect("filtered on presence");
            let neighbor_mean = self.row_means[v].expect("neighbor has a rating");
            numerator += s * (rating - neighbor_mean);
            denominator += s.abs();
        }
        Some((own_mean + numerator / denominator).clamp(1.0, 5.0))
    }
}

fn locate(
    matrix: &RatingsMatrix,
    reservation: &ReservationNumber,
    item: &ItemId,
) -> Result<(usize, usize), RecommendError> {
    let col = matrix
        .col_index(item)
        .ok_or_else(|| RecommendError::UnknownItem(item.to_string()))?;
    let row = matrix
        .row_index(reservation)
        .ok_or_else(|| RecommendError::UnknownUser(reservation.to_string()))?;
    Ok((row, col))
}

/// User–user prediction of `reservation`'s stars for `item`.
///
/// `μ_u + Σ s(u,v)(r_vi − μ_v) / Σ|s(u,v)|` over the `k` most similar guests
/// with positive similarity who rated the item. `Ok(None)` when no such
/// neighbor exists.
pub fn predict_uucf(
    matrix: &RatingsMatrix,
    reservation: &ReservationNumber,
    item: &ItemId,
    k: usize,
    kind: SimilarityKind,
    min_overlap: usize,
) -> Result<Option<f64>, RecommendError> {
    let (row, col) = locate(matrix, reservation, item)?;
    let grid = Oriented::users(matrix);
    Ok(grid.predict(row, col, k, |v| grid.similarity(row, v, kind, min_overlap)))
}

/// Item–item prediction: the user–user estimate with guests and items
/// swapped, centering on item means.
pub fn predict_iicf(
    matrix: &RatingsMatrix,
    reservation: &ReservationNumber,
    item: &ItemId,
    k: usize,
    kind: SimilarityKind,
    min_overlap: usize,
) -> Result<Option<f64>, RecommendError> {
    let (row, col) = locate(matrix, reservation, item)?;
    let grid = Oriented::items(matrix);
    Ok(grid.predict(col, row, k, |j| grid.similarity(col, j, kind, min_overlap)))
}

/// Items `reservation` has not rated, ranked by how many guests rated them.
pub fn popularity_fallback(
    matrix: &RatingsMatrix,
    reservation: &ReservationNumber,
    top_n: usize,
) -> Vec<Recommendation> {
    let row = matrix.row_index(reservation);
    let candidates = matrix
        .cols()
        .iter()
        .enumerate()
        .filter(|(c, _)| row.is_none_or(|r| matrix.cell(r, *c).is_none()))
        .filter_map(|(c, item)| {
            let count = (0..matrix.rows().len())
                .filter(|&r| matrix.cell(r, c).is_some())
                .count();
            (count > 0).then(|| Recommendation {
                item: item.clone(),
                score: count as f64,
                kind: RecommendationKind::PosPop,
                explain: "popularity fallback: no neighbor predictions".into(),
            })
        })
        .collect();
    rank(candidates, top_n)
}

/// Predicted ratings over every guest's unrated items, for all guests.
/// Guests without any defined prediction get [`popularity_fallback`].
pub fn recommend_uucf(
    matrix: &RatingsMatrix,
    config: &RecommenderConfig,
    top_n: usize,
) -> BTreeMap<ReservationNumber, Vec<Recommendation>> {
    let grid = Oriented::users(matrix);
    let sims = grid.similarity_table(config.user_similarity(), config.knn.min_overlap);
    recommend_all(matrix, top_n, RecommendationKind::Uucf, |row, col| {
        grid.predict(row, col, config.knn.k, |v| sims[row][v])
    })
}

/// Item–item counterpart of [`recommend_uucf`].
pub fn recommend_iicf(
    matrix: &RatingsMatrix,
    config: &RecommenderConfig,
    top_n: usize,
) -> BTreeMap<ReservationNumber, Vec<Recommendation>> {
    let grid = Oriented::items(matrix);
    let sims = grid.similarity_table(config.item_similarity(), config.knn.min_overlap);
    recommend_all(matrix, top_n, RecommendationKind::Iicf, |row, col| {
        grid.predict(col, row, config.knn.k, |j| sims[col][j])
    })
}

fn recommend_all(
    matrix: &RatingsMatrix,
    top_n: usize,
    kind: RecommendationKind,
    predict: impl Fn(usize, usize) -> Option<f64>,
) -> BTreeMap<ReservationNumber, Vec<Recommendation>> {
    let mut out = BTreeMap::new();
    for (row, reservation) in matrix.rows().iter().enumerate() {
        let predicted: Vec<Recommendation> = matrix
            .cols()
            .iter()
            .enumerate()
            .filter(|(col, _)| matrix.cell(row, *col).is_none())
            .filter_map(|(col, item)| {
                predict(row, col).map(|score| Recommendation {
                    item: item.clone(),
                    score,
                    kind,
                    explain: format!("{kind} predicted stars"),
                })
            })
            .collect();
        let list = if predicted.is_empty() {
            popularity_fallback(matrix, reservation, top_n)
        } else {
            rank(predicted, top_n)
        };
        out.insert(reservation.clone(), list);
    }
    out
}
