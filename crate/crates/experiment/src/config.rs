use serde::{Deserialize, Serialize};
use upsell_core::domain::AccommodationId;
use upsell_core::influence::{EmotionTaxonomy, PersuasionCategory, PersuasionPrinciple};

use crate::HarnessError;

/// Relative weight of one category cell in the simulated population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MixEntry {
    pub sub_emotion: String,
    pub principle: PersuasionPrinciple,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SimConfig {
    /// Total guests; even indices form the control arm, odd the treatment arm.
    pub guests: u32,
    #[serde(default)]
    pub seed: u64,
    /// Empty means uniform over every cell of the taxonomy.
    #[serde(default)]
    pub category_mix: Vec<MixEntry>,
    /// Conversion probability per impression of an unmatched message.
    pub base_rate: f64,
    /// Odds multiplier when the message category equals the guest's.
    pub matched_odds_multiplier: f64,
    #[serde(default = "one")]
    pub impressions_per_guest: u32,
    #[serde(default = "default_accommodation")]
    pub accommodation: AccommodationId,
    #[serde(default = "default_taxonomy")]
    pub taxonomy: String,
    #[serde(default = "default_task")]
    pub offer_task: String,
    #[serde(default = "default_topic")]
    pub offer_topic: String,
}

fn one() -> u32 {
    1
}

fn default_accommodation() -> AccommodationId {
    AccommodationId::new("sim").expect("valid id")
}

fn default_taxonomy() -> String {
    "wheel".into()
}

fn default_task() -> String {
    "a special offer of -20%".into()
}

fn default_topic() -> String {
    "Couples Massage".into()
}

impl SimConfig {
    /// A config with every optional field at its default.
    pub fn new(guests: u32, base_rate: f64, matched_odds_multiplier: f64, seed: u64) -> Self {
        Self {
            guests,
            seed,
            category_mix: Vec::new(),
            base_rate,
            matched_odds_multiplier,
            impressions_per_guest: 1,
            accommodation: default_accommodation(),
            taxonomy: default_taxonomy(),
            offer_task: default_task(),
            offer_topic: default_topic(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let config: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.guests < 2 {
            return bad(format!("need at least 2 guests, got {}", self.guests));
        }
        if !(self.base_rate > 0.0 && self.base_rate < 1.0) {
            return bad(format!("baseRate must be in (0, 1), got {}", self.base_rate));
        }
        if !(self.matched_odds_multiplier.is_finite() && self.matched_odds_multiplier > 0.0) {
            return bad(format!(
                "matchedOddsMultiplier must be positive, got {}",
                self.matched_odds_multiplier
            ));
        }
        if self.impressions_per_guest == 0 {
            return bad("impressionsPerGuest must be at least 1".into());
        }
        self.weighted_cells()?;
        Ok(())
    }

    pub fn taxonomy(&self) -> Result<EmotionTaxonomy, HarnessError> {
        Ok(EmotionTaxonomy::preset(&self.taxonomy)?)
    }

    /// Category cells with their sampling weights.
    pub fn weighted_cells(&self) -> Result<Vec<(PersuasionCategory, f64)>, HarnessError> {
        let taxonomy = self.taxonomy()?;
        if self.category_mix.is_empty() {
            return Ok(taxonomy.categories().map(|c| (c, 1.0)).collect());
        }
        let mut cells = Vec::with_capacity(self.category_mix.len());
        for entry in &self.category_mix {
            if !(entry.weight.is_finite() && entry.weight >= 0.0) {
                return Err(HarnessError::Config(format!("invalid mix weight {}", entry.weight)));
            }
            let category = PersuasionCategory::new(&taxonomy, &entry.sub_emotion, entry.principle)?;
            cells.push((category, entry.weight));
        }
        if cells.iter().map(|(_, w)| w).sum::<f64>() <= 0.0 {
            return Err(HarnessError::Config("categoryMix weights sum to 0".into()));
        }
        Ok(cells)
    }
}
