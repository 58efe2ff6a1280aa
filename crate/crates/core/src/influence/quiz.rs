use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{EmotionTaxonomy, InfluenceError, PersuasionCategory, PersuasionPrinciple};
use crate::domain::ReservationNumber;

/// Non-negative votes an option casts for sub-emotions and principles.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OptionWeights {
    #[serde(default)]
    pub sub_emotions: BTreeMap<String, f64>,
    #[serde(default)]
    pub principles: BTreeMap<PersuasionPrinciple, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuizOption {
    pub id: String,
    #[serde(default)]
    pub label: String,
    pub weights: OptionWeights,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuizQuestion {
    pub id: String,
    #[serde(default)]
    pub prompt: String,
    pub options: Vec<QuizOption>,
}

/// The pop-up questionnaire: every option maps to a weight vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuizDefinition {
    pub questions: Vec<QuizQuestion>,
}

impl QuizDefinition {
    /// Checks ids are unique, weights are finite and non-negative, and every
    /// weighted sub-emotion exists in `taxonomy`.
    pub fn validate(&self, taxonomy: &EmotionTaxonomy) -> Result<(), InfluenceError> {
        let mut question_ids = BTreeSet::new();
        for question in &self.questions {
            if !question_ids.insert(&question.id) {
                return Err(InfluenceError::DuplicateName(question.id.clone()));
            }
            let mut option_ids = BTreeSet::new();
            for option in &question.options {
                if !option_ids.insert(&option.id) {
                    return Err(InfluenceError::DuplicateName(format!(
                        "{}/{}",
                        question.id, option.id
                    )));
                }
                let weights = option
                    .weights
                    .sub_emotions
                    .values()
                    .chain(option.weights.principles.values());
                for &weight in weights {
                    if !weight.is_finite() || weight < 0.0 {
                        return Err(InfluenceError::InvalidWeight {
                            option: option.id.clone(),
                            weight,
                        });
                    }
                }
                for name in option.weights.sub_emotions.keys() {
                    if taxonomy.find_sub_emotion(name).is_none() {
                        return Err(InfluenceError::UnknownEmotion(name.clone()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_json(json: &str, taxonomy: &EmotionTaxonomy) -> Result<Self, InfluenceError> {
        let quiz: Self =
            serde_json::from_str(json).map_err(|e| InfluenceError::Malformed(e.to_string()))?;
        quiz.validate(taxonomy)?;
        Ok(quiz)
    }

    fn option(&self, answer: &QuizAnswer) -> Option<&QuizOption> {
        self.questions
            .iter()
            .find(|q| q.id == answer.question)?
            .options
            .iter()
            .find(|o| o.id == answer.option)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuizAnswer {
    pub question: String,
    pub option: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuizAnswerSheet {
    #[serde(rename = "reservationNumber")]
    pub reservation: ReservationNumber,
    pub answers: Vec<QuizAnswer>,
}

/// Assigns the sub-emotion and principle with the largest summed weight.
/// Ties go to whichever comes first in declaration order.
pub fn categorize_guest(
    sheet: &QuizAnswerSheet,
    quiz: &QuizDefinition,
    taxonomy: &EmotionTaxonomy,
) -> Result<PersuasionCategory, InfluenceError> {
    if sheet.answers.is_empty() {
        return Err(InfluenceError::EmptySheet);
    }

    // Summing in a canonical order keeps the result independent of how the
    // client ordered its answers, down to the last bit.
    let mut answers: Vec<&QuizAnswer> = sheet.answers.iter().collect();
    answers.sort();

    let subs: Vec<(&str, &str)> = taxonomy.sub_emotions().collect();
    let mut sub_totals = vec![0.0_f64; subs.len()];
    let mut principle_totals = [0.0_f64; 6];

    for answer in answers {
        let option = quiz
            .option(answer)
            .ok_or_else(|| InfluenceError::UnknownOption {
                question: answer.question.clone(),
                option: answer.option.clone(),
            })?;
        for (name, weight) in &option.weights.sub_emotions {
            let slot = subs
                .iter()
                .position(|(_, sub)| sub.eq_ignore_ascii_case(name))
                .ok_or_else(|| InfluenceError::UnknownEmotion(name.clone()))?;
            sub_totals[slot] += weight;
        }
        for (principle, weight) in &option.weights.principles {
            principle_totals[*principle as usize] += weight;
        }
    }

    let (family, sub) = subs[first_argmax(&sub_totals)];
    Ok(PersuasionCategory {
        emotion: family.to_string(),
        sub_emotion: sub.to_string(),
        principle: PersuasionPrinciple::ALL[first_argmax(&principle_totals)],
    })
}

fn first_argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
