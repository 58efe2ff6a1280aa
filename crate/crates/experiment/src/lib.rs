//! Desk-scale A/B simulation: a synthetic guest population with known
//! persuasion categories sees either a generic message or one matched to
//! its category, and converts according to a logistic-odds ground truth.

mod config;
mod pipeline;
mod population;
mod report;
mod stats;

pub use config::{MixEntry, SimConfig};
pub use pipeline::{HttpPipeline, InProcessPipeline, Pipeline};
pub use population::{simulate_population, synthetic_quiz, Arm, Population, SimGuest};
pub use report::{run_experiment, ArmResult, ExperimentReport};
pub use stats::{matched_rate, two_proportion_z, uplift, ZTest};

use thiserror::Error;
use upsell_core::campaign::CampaignError;
use upsell_core::influence::InfluenceError;
use upsell_core::prompt::PromptError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("service unreachable: {0}")]
    ServiceUnreachable(String),
    #[error("service answered {status}: {body}")]
    Service { status: u16, body: String },
    #[error("uplift is undefined when the control rate is 0")]
    DivisionByZero,
    #[error(transparent)]
    Campaign(#[from] CampaignError),
    #[error(transparent)]
    Influence(#[from] InfluenceError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
}
