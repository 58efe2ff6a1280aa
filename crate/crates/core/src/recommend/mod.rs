//! Wine and point-of-sale recommenders.
//!
//! Wine: knowledge-based ([`recommend_kbr`]) from quiz answers, content-based
//! ([`recommend_cbr`]) from star feedback, and user–user / item–item
//! neighborhood collaborative filtering. POS: order completion from
//! co-purchase counts and a popularity list. [`update_state`] rebuilds the
//! precomputed state the POS recommenders read.

mod cbr;
mod cf;
mod config;
mod kbr;
mod pos;
mod similarity;
mod snapshot;

pub use cbr::{cbr_score, recommend_cbr};
pub use cf::{
    popularity_fallback, predict_iicf, predict_uucf, recommend_iicf, recommend_uucf,
};
pub use config::{KbrSection, KnnSection, RebuildSection, RecommenderConfig, SimilaritySection};
pub use kbr::{kbr_score, recommend_kbr};
pub use pos::{complete_order_iicf, recommend_pop};
pub use similarity::{similarity, SimilarityKind};
pub use snapshot::{update_state, ModelSnapshot, SNAPSHOT_FORMAT_VERSION};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{AccommodationId, DomainError, ItemId, RecommendationKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecommendError {
    #[error("catalog has no wines")]
    EmptyCatalog,
    #[error("no informative ratings for this guest")]
    ColdStartNoRatings,
    #[error("unknown reservation {0}")]
    UnknownUser(String),
    #[error("unknown item {0}")]
    UnknownItem(String),
    #[error("item {0} is not a wine")]
    NotAWine(String),
    #[error("snapshot is for {found}, order is for {expected}")]
    StaleSnapshot {
        expected: AccommodationId,
        found: AccommodationId,
    },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// One ranked suggestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub item: ItemId,
    pub score: f64,
    pub kind: RecommendationKind,
    pub explain: String,
}

/// Sorts by descending score, then ascending item id, and keeps `top_n`.
pub(crate) fn rank(mut recommendations: Vec<Recommendation>, top_n: usize) -> Vec<Recommendation> {
    recommendations.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.item.cmp(&b.item))
    });
    recommendations.truncate(top_n);
    recommendations
}
