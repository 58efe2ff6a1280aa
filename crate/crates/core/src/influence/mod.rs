//! Emotion taxonomy × persuasion principle model used to pick a message
//! register for each guest.

mod grid;
mod quiz;
mod taxonomy;

pub use grid::{EmotionCue, InfluenceGrid, MessageDirective};
pub(crate) use grid::{emoticons_for, phrases_for};
pub use quiz::{
    categorize_guest, OptionWeights, QuizAnswer, QuizAnswerSheet, QuizDefinition, QuizOption,
    QuizQuestion,
};
pub use taxonomy::{
    EmotionFamily, EmotionTaxonomy, PersuasionCategory, PersuasionPrinciple, TaxonomyDocument,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InfluenceError {
    #[error("taxonomy must have 5 families of 3 sub-emotions: {0}")]
    WrongArity(String),
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("unknown sub-emotion {0:?}")]
    UnknownEmotion(String),
    #[error("answer sheet is empty")]
    EmptySheet,
    #[error("unknown option {option:?} for question {question:?}")]
    UnknownOption { question: String, option: String },
    #[error("invalid weight {weight} on {option:?}")]
    InvalidWeight { option: String, weight: f64 },
    #[error("grid has no cue for {0:?}")]
    IncompleteGrid(String),
    #[error("malformed document: {0}")]
    Malformed(String),
}

/// Taxonomy plus the keyword grid, loaded once and shared read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluentialModel {
    pub taxonomy: EmotionTaxonomy,
    pub grid: InfluenceGrid,
}

impl InfluentialModel {
    pub fn new(taxonomy: EmotionTaxonomy, grid: InfluenceGrid) -> Result<Self, InfluenceError> {
        grid.check_covers(&taxonomy)?;
        Ok(Self { taxonomy, grid })
    }

    /// Built-in taxonomy preset with the default grid.
    pub fn preset(name: &str) -> Result<Self, InfluenceError> {
        Self::new(EmotionTaxonomy::preset(name)?, InfluenceGrid::default())
    }

    pub fn directive_for(&self, category: &PersuasionCategory) -> MessageDirective {
        self.grid.directive_for(category)
    }
}
