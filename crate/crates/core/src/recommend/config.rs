use serde::{Deserialize, Serialize};

use super::SimilarityKind;

/// Recommender tuning, read from the `[recommender]` config table.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RecommenderConfig {
    pub similarity: SimilaritySection,
    pub knn: KnnSection,
    pub kbr: KbrSection,
    pub rebuild: RebuildSection,
}

/// `kind` overrides both defaults when set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimilaritySection {
    pub kind: Option<SimilarityKind>,
    pub user_kind: SimilarityKind,
    pub item_kind: SimilarityKind,
}

impl Default for SimilaritySection {
    fn default() -> Self {
        Self {
            kind: None,
            user_kind: SimilarityKind::Cosine,
            item_kind: SimilarityKind::AdjustedCosine,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnSection {
    pub k: usize,
    pub min_overlap: usize,
}

impl Default for KnnSection {
    fn default() -> Self {
        Self { k: 5, min_overlap: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KbrSection {
    pub price_penalty: f64,
}

impl Default for KbrSection {
    fn default() -> Self {
        Self { price_penalty: 0.5 }
    }
}

/// `period_seconds = 0` disables the timer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RebuildSection {
    pub period_seconds: u64,
}

impl Default for RebuildSection {
    fn default() -> Self {
        Self { period_seconds: 300 }
    }
}

impl RecommenderConfig {
    pub fn user_similarity(&self) -> SimilarityKind {
        self.similarity.kind.unwrap_or(self.similarity.user_kind)
    }

    pub fn item_similarity(&self) -> SimilarityKind {
        self.similarity.kind.unwrap_or(self.similarity.item_kind)
    }
}
