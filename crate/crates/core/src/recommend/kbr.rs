use crate::domain::{
    Catalog, CatalogItem, ItemCategory, Level, RecommendationKind, WinePreferenceProfile,
};

use super::{rank, Recommendation, RecommendError};

const LEVEL_SPAN: f64 = (Level::MAX - Level::MIN) as f64;

/// Match between quiz answers and a wine's expert profile, in `[0, 1]`.
///
/// `1 − Σ|p − w| / (10 · span)`, multiplied by `price_penalty` when the
/// wine's price bucket differs from the one the guest picked.
pub fn kbr_score(
    profile: &WinePreferenceProfile,
    item: &CatalogItem,
    price_penalty: f64,
) -> Result<f64, RecommendError> {
    if item.category != ItemCategory::Wine {
        return Err(RecommendError::NotAWine(item.id.to_string()));
    }
    let wine = item.attribute_vector()?;
    let guest = profile.preferences.levels();
    let distance: u32 = guest
        .iter()
        .zip(wine.levels())
        .map(|(&p, w)| u32::from(p.abs_diff(w)))
        .sum();
    let closeness = 1.0 - f64::from(distance) / (guest.len() as f64 * LEVEL_SPAN);
    let gate = if item.price_bucket == profile.price.as_str() {
        1.0
    } else {
        price_penalty
    };
    Ok(gate * closeness)
}

/// Ranks every wine in the catalog against the guest's quiz profile.
pub fn recommend_kbr(
    profile: &WinePreferenceProfile,
    catalog: &Catalog,
    top_n: usize,
    price_penalty: f64,
) -> Result<Vec<Recommendation>, RecommendError> {
    let mut scored = Vec::new();
    for wine in catalog.wines() {
        scored.push(Recommendation {
            item: wine.id.clone(),
            score: kbr_score(profile, wine, price_penalty)?,
            kind: RecommendationKind::Kbr,
            explain: format!("quiz match, price bucket {}", wine.price_bucket),
        });
    }
    if scored.is_empty() {
        return Err(RecommendError::EmptyCatalog);
    }
    Ok(rank(scored, top_n))
}
