use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use upsell_core::domain::ReservationNumber;
use upsell_core::influence::{
    EmotionTaxonomy, OptionWeights, PersuasionCategory, PersuasionPrinciple, QuizAnswer,
    QuizAnswerSheet, QuizDefinition, QuizOption, QuizQuestion,
};

use crate::{HarnessError, SimConfig};

/// Question asking for the guest's sub-emotion in the synthetic quiz.
pub const FEELING_QUESTION: &str = "feeling";
/// Question asking for the guest's persuasion principle.
pub const NUDGE_QUESTION: &str = "nudge";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    Control,
    Treatment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimGuest {
    pub index: u32,
    pub reservation: ReservationNumber,
    pub arm: Arm,
    /// Ground truth.
    pub category: PersuasionCategory,
    pub sheet: QuizAnswerSheet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub guests: Vec<SimGuest>,
}

/// Two questions whose options each vote for exactly one sub-emotion or one
/// principle, so a truthful sheet recovers the guest's cell.
pub fn synthetic_quiz(taxonomy: &EmotionTaxonomy) -> QuizDefinition {
    let feelings = taxonomy
        .sub_emotions()
        .map(|(_, sub)| QuizOption {
            id: sub.to_ascii_lowercase(),
            label: sub.to_string(),
            weights: OptionWeights {
                sub_emotions: [(sub.to_string(), 1.0)].into(),
                ..OptionWeights::default()
            },
        })
        .collect();
    let nudges = PersuasionPrinciple::ALL
        .into_iter()
        .map(|p| QuizOption {
            id: p.as_str().to_string(),
            label: p.as_str().replace('_', " "),
            weights: OptionWeights {
                principles: [(p, 1.0)].into(),
                ..OptionWeights::default()
            },
        })
        .collect();
    QuizDefinition {
        questions: vec![
            QuizQuestion {
                id: FEELING_QUESTION.into(),
                prompt: "Which feeling fits your stay best?".into(),
                options: feelings,
            },
            QuizQuestion {
                id: NUDGE_QUESTION.into(),
                prompt: "What makes you say yes to an offer?".into(),
                options: nudges,
            },
        ],
    }
}

/// Random stream `stream` of the run seeded with `seed`. Every guest owns
/// two streams, so results do not depend on the order guests are processed.
pub(crate) fn guest_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn category_stream(index: u32) -> u64 {
    2 * u64::from(index)
}

pub(crate) fn conversion_stream(index: u32) -> u64 {
    2 * u64::from(index) + 1
}

pub fn reservation_of(index: u32) -> ReservationNumber {
    ReservationNumber::new(format!("{}", 100_000 + u64::from(index))).expect("numeric reservation")
}

pub fn simulate_population(config: &SimConfig) -> Result<Population, HarnessError> {
    config.validate()?;
    let cells = config.weighted_cells()?;
    let sampler = WeightedIndex::new(cells.iter().map(|(_, w)| *w))
        .map_err(|e| HarnessError::Config(e.to_string()))?;

    let guests = (0..config.guests)
        .map(|index| {
            let mut rng = guest_rng(config.seed, category_stream(index));
            let category = cells[sampler.sample(&mut rng)].0.clone();
            let reservation = reservation_of(index);
            let sheet = QuizAnswerSheet {
                reservation: reservation.clone(),
                answers: vec![
                    QuizAnswer {
                        question: FEELING_QUESTION.into(),
                        option: category.sub_emotion.to_ascii_lowercase(),
                    },
                    QuizAnswer {
                        question: NUDGE_QUESTION.into(),
                        option: category.principle.as_str().into(),
                    },
                ],
            };
            SimGuest {
                index,
                reservation,
                arm: if index % 2 == 0 { Arm::Control } else { Arm::Treatment },
                category,
                sheet,
            }
        })
        .collect();
    Ok(Population { guests })
}

#[cfg(test)]
mod tests {
    use upsell_core::influence::categorize_guest;

    use super::*;

    #[test]
    fn truthful_sheets_recover_the_category() {
        let config = SimConfig::new(500, 0.05, 2.0, 9);
        let taxonomy = config.taxonomy().unwrap();
        let quiz = synthetic_quiz(&taxonomy);
        quiz.validate(&taxonomy).unwrap();
        for guest in simulate_population(&config).unwrap().guests {
            assert_eq!(categorize_guest(&guest.sheet, &quiz, &taxonomy).unwrap(), guest.category);
        }
    }

    #[test]
    fn arms_alternate() {
        let population = simulate_population(&SimConfig::new(6, 0.05, 2.0, 1)).unwrap();
        let arms: Vec<Arm> = population.guests.iter().map(|g| g.arm).collect();
        assert_eq!(arms, [Arm::Control, Arm::Treatment, Arm::Control, Arm::Treatment, Arm::Control, Arm::Treatment]);
    }
}
