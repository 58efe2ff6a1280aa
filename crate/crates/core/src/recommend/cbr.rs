use crate::domain::{AttributeVector, Catalog, RatingsMatrix, RecommendationKind, ReservationNumber};

use super::{rank, Recommendation, RecommendError};

const NEUTRAL_STARS: f64 = 3.0;

fn attribute_cosine(a: &AttributeVector, b: &AttributeVector) -> f64 {
    let (a, b) = (a.as_f64(), b.as_f64());
    let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let norm = |v: &[f64; 10]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (norm(&a) * norm(&b))
}

/// Content score of `candidate` given the guest's rated wines:
/// `Σ cos(candidate, j) · (stars_j − 3) / Σ |stars_j − 3|`.
///
/// `None` when no rating departs from neutral.
pub fn cbr_score(candidate: &AttributeVector, rated: &[(AttributeVector, u8)]) -> Option<f64> {
    let weight = |stars: u8| f64::from(stars) - NEUTRAL_STARS;
    let denominator: f64 = rated.iter().map(|(_, s)| weight(*s).abs()).sum();
    if denominator == 0.0 {
        return None;
    }
    let numerator: f64 = rated
        .iter()
        .map(|(vector, stars)| attribute_cosine(candidate, vector) * weight(*stars))
        .sum();
    Some(numerator / denominator)
}

/// Wines whose expert profile resembles the ones the guest liked. Wines the
/// guest already rated are never returned.
pub fn recommend_cbr(
    reservation: &ReservationNumber,
    ratings: &RatingsMatrix,
    catalog: &Catalog,
    top_n: usize,
) -> Result<Vec<Recommendation>, RecommendError> {
    let rated_items = ratings.rated_by(reservation);
    let rated: Vec<(AttributeVector, u8)> = rated_items
        .iter()
        .filter_map(|(item, stars)| {
            let vector = catalog.get(item)?.attribute_vector().ok()?;
            Some((vector, *stars))
        })
        .collect();
    // Neutral feedback carries no signal.
    if rated.iter().all(|(_, stars)| f64::from(*stars) == NEUTRAL_STARS) {
        return Err(RecommendError::ColdStartNoRatings);
    }

    let mut scored = Vec::new();
    for wine in catalog.wines() {
        if rated_items.iter().any(|(item, _)| **item == wine.id) {
            continue;
        }
        let vector = wine.attribute_vector()?;
        let score = cbr_score(&vector, &rated).expect("non-neutral rating present");
        scored.push(Recommendation {
            item: wine.id.clone(),
            score,
            kind: RecommendationKind::Cbr,
            explain: format!("similar to {} rated wines", rated.len()),
        });
    }
    Ok(rank(scored, top_n))
}
