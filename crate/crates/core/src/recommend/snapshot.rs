use std::collections::BTreeMap;

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};

use crate::domain::{AccommodationId, ItemId, Order, Rating, RatingsMatrix, ReservationNumber};

use super::{similarity, RecommenderConfig, SimilarityKind};

pub const SNAPSHOT_FORMAT_VERSION: u32 = 1;

/// Precomputed recommender state for one accommodation. Immutable once
/// built; a rebuild produces a new snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelSnapshot {
    pub format_version: u32,
    #[serde(rename = "accommodationId")]
    pub accommodation: AccommodationId,
    pub built_at: DateTime<FixedOffset>,
    /// Symmetric; only defined similarities are stored.
    pub user_sims: BTreeMap<ReservationNumber, BTreeMap<ReservationNumber, f64>>,
    pub item_sims: BTreeMap<ItemId, BTreeMap<ItemId, f64>>,
    /// Number of orders containing both items. Symmetric, no diagonal.
    pub co_purchase: BTreeMap<ItemId, BTreeMap<ItemId, u64>>,
    /// Number of orders containing the item.
    pub popularity: BTreeMap<ItemId, u64>,
    pub source_rating_count: usize,
}

impl ModelSnapshot {
    pub fn empty(accommodation: AccommodationId, built_at: DateTime<FixedOffset>) -> Self {
        Self {
            format_version: SNAPSHOT_FORMAT_VERSION,
            accommodation,
            built_at,
            user_sims: BTreeMap::new(),
            item_sims: BTreeMap::new(),
            co_purchase: BTreeMap::new(),
            popularity: BTreeMap::new(),
            source_rating_count: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, String> {
        let snapshot: Self = serde_json::from_str(json).map_err(|e| e.to_string())?;
        if snapshot.format_version != SNAPSHOT_FORMAT_VERSION {
            return Err(format!(
                "unsupported snapshot format {}",
                snapshot.format_version
            ));
        }
        Ok(snapshot)
    }

    pub fn user_similarity(&self, a: &ReservationNumber, b: &ReservationNumber) -> Option<f64> {
        self.user_sims.get(a)?.get(b).copied()
    }

    pub fn item_similarity(&self, a: &ItemId, b: &ItemId) -> Option<f64> {
        self.item_sims.get(a)?.get(b).copied()
    }

    pub fn co_purchases(&self, a: &ItemId, b: &ItemId) -> u64 {
        self.co_purchase
            .get(a)
            .and_then(|m| m.get(b))
            .copied()
            .unwrap_or(0)
    }
}

fn pairwise<L: Clone + Ord>(
    labels: &[L],
    vectors: &[Vec<Option<f64>>],
    kind: SimilarityKind,
    min_overlap: usize,
    axis_means: &[f64],
) -> BTreeMap<L, BTreeMap<L, f64>> {
    let mut out: BTreeMap<L, BTreeMap<L, f64>> = BTreeMap::new();
    for a in 0..labels.len() {
        for b in a..labels.len() {
            let Some(mut s) = similarity(&vectors[a], &vectors[b], kind, min_overlap, Some(axis_means))
            else {
                continue;
            };
            if a == b {
                s = 1.0;
            }
            out.entry(labels[a].clone()).or_default().insert(labels[b].clone(), s);
            out.entry(labels[b].clone()).or_default().insert(labels[a].clone(), s);
        }
    }
    out
}

fn means(vectors: &[Vec<Option<f64>>]) -> Vec<f64> {
    vectors
        .iter()
        .map(|v| {
            let rated: Vec<f64> = v.iter().flatten().copied().collect();
            if rated.is_empty() {
                0.0
            } else {
                rated.iter().sum::<f64>() / rated.len() as f64
            }
        })
        .collect()
}

/// Rebuilds all precomputed state from scratch. Deterministic in its inputs;
/// `built_at` is supplied by the caller.
pub fn update_state(
    accommodation: &AccommodationId,
    ratings: &[Rating],
    purchases: &[Order],
    config: &RecommenderConfig,
    built_at: DateTime<FixedOffset>,
) -> ModelSnapshot {
    let mut snapshot = ModelSnapshot::empty(accommodation.clone(), built_at);

    let matrix = RatingsMatrix::from_ratings(ratings);
    let rows = matrix.dense();
    let cols: Vec<Vec<Option<f64>>> = (0..matrix.cols().len())
        .map(|c| rows.iter().map(|row| row[c]).collect())
        .collect();
    snapshot.user_sims = pairwise(
        matrix.rows(),
        &rows,
        config.user_similarity(),
        config.knn.min_overlap,
        &means(&cols),
    );
    snapshot.item_sims = pairwise(
        matrix.cols(),
        &cols,
        config.item_similarity(),
        config.knn.min_overlap,
        &means(&rows),
    );
    snapshot.source_rating_count = matrix.rated_count();

    for order in purchases {
        let mut lines: Vec<&ItemId> = order.lines.iter().collect();
        lines.sort();
        lines.dedup();
        for (i, a) in lines.iter().enumerate() {
            *snapshot.popularity.entry((*a).clone()).or_default() += 1;
            for b in &lines[i + 1..] {
                *snapshot
                    .co_purchase
                    .entry((*a).clone())
                    .or_default()
                    .entry((*b).clone())
                    .or_default() += 1;
                *snapshot
                    .co_purchase
                    .entry((*b).clone())
                    .or_default()
                    .entry((*a).clone())
                    .or_default() += 1;
            }
        }
    }
    snapshot
}
