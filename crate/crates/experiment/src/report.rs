use std::collections::BTreeMap;

use chrono::{DateTime, Duration, FixedOffset};
use rand::Rng;
use serde::{Deserialize, Serialize};
use upsell_core::campaign::{Channel, DeliveryEvent, EventKind, MessageDraft};
use upsell_core::influence::PersuasionCategory;
use upsell_core::prompt::{AdCopy, AdCopySpec, CopyStyle};

use crate::population::{conversion_stream, guest_rng};
use crate::stats::{matched_rate, two_proportion_z, uplift};
use crate::{simulate_population, Arm, HarnessError, Pipeline, SimConfig};

/// Text of the control arm's message.
pub const GENERIC_COPY: &str = "Enjoy a special offer during your stay";
const COPY_WORDS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ArmResult {
    pub impressions: u64,
    pub conversions: u64,
    pub rate: f64,
}

impl ArmResult {
    fn new(impressions: u64, conversions: u64) -> Self {
        let rate = if impressions == 0 { 0.0 } else { conversions as f64 / impressions as f64 };
        Self { impressions, conversions, rate }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentReport {
    pub seed: u64,
    pub guests: u32,
    pub impressions_per_guest: u32,
    pub base_rate: f64,
    pub matched_odds_multiplier: f64,
    pub control: ArmResult,
    pub treatment: ArmResult,
    /// Treatment rate the ground-truth model implies for matched messages.
    pub expected_treatment_rate: f64,
    /// `None` when the control arm converted nobody.
    pub uplift: Option<f64>,
    pub z_statistic: f64,
    pub p_value: f64,
    /// Treatment messages created, one per category seen.
    pub treatment_messages: usize,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn event_time(index: u32) -> DateTime<FixedOffset> {
    let start = DateTime::parse_from_rfc3339("2024-05-01T10:00:00+02:00").expect("valid instant");
    start + Duration::seconds(i64::from(index))
}

fn matched_spec(config: &SimConfig, emotion: String, tone: String) -> AdCopySpec {
    AdCopySpec {
        task: config.offer_task.clone(),
        topic: config.offer_topic.clone(),
        emotion,
        tone,
        language: "English".into(),
        length_words: COPY_WORDS,
        include_emoticon: false,
        copies: 3,
        style: CopyStyle::AdCopy,
    }
}

/// Runs both arms through `pipeline` and compares their conversion rates.
pub fn run_experiment(config: &SimConfig, pipeline: &mut dyn Pipeline) -> Result<ExperimentReport, HarnessError> {
    let population = simulate_population(config)?;
    let matched = matched_rate(config.base_rate, config.matched_odds_multiplier);

    let generic = pipeline.create_message(&MessageDraft {
        accommodation: config.accommodation.clone(),
        name: format!("Generic offer {}", config.seed),
        title: BTreeMap::new(),
        spec: None,
        variants: Vec::new(),
        category: None,
    })?;
    let generic_copy = AdCopy {
        text: GENERIC_COPY.into(),
        index: 1,
        word_count: GENERIC_COPY.split_whitespace().count() as u32,
        has_emoticon: false,
    };
    pipeline.publish(&generic.id, vec![generic_copy], Channel::Wifi)?;

    let mut matched_messages: BTreeMap<PersuasionCategory, String> = BTreeMap::new();
    for guest in &population.guests {
        let (message, probability) = match guest.arm {
            Arm::Control => (generic.id.clone(), config.base_rate),
            Arm::Treatment => {
                let assigned = pipeline.categorize(&guest.sheet)?;
                let id = match matched_messages.get(&assigned) {
                    Some(id) => id.clone(),
                    None => {
                        let directive = pipeline.directive(&guest.reservation)?;
                        let tone = directive.tone_keywords.first().cloned().unwrap_or_else(|| "friendly".into());
                        let copies = pipeline.suggest(&matched_spec(config, directive.emotion_keyword, tone))?;
                        let draft = MessageDraft {
                            accommodation: config.accommodation.clone(),
                            name: format!(
                                "Matched {} {} {} {}",
                                assigned.emotion, assigned.sub_emotion, assigned.principle, config.seed
                            ),
                            title: BTreeMap::new(),
                            spec: None,
                            variants: Vec::new(),
                            category: Some(assigned.clone()),
                        };
                        let message = pipeline.create_message(&draft)?;
                        pipeline.publish(&message.id, copies, Channel::Wifi)?;
                        matched_messages.insert(assigned.clone(), message.id.clone());
                        message.id
                    }
                };
                let p = if assigned == guest.category { matched } else { config.base_rate };
                (id, p)
            }
        };

        let mut rng = guest_rng(config.seed, conversion_stream(guest.index));
        let at = event_time(guest.index);
        for _ in 0..config.impressions_per_guest {
            let event = |kind| DeliveryEvent {
                message: message.clone(),
                reservation: guest.reservation.clone(),
                kind,
                at,
            };
            pipeline.record(&event(EventKind::Impression))?;
            if rng.gen::<f64>() < probability {
                pipeline.record(&event(EventKind::Conversion))?;
            }
        }
    }

    let control_stats = pipeline.stats(&generic.id)?;
    let control = ArmResult::new(control_stats.impressions, control_stats.conversions);
    let (mut shown, mut converted) = (0, 0);
    for id in matched_messages.values() {
        let stats = pipeline.stats(id)?;
        shown += stats.impressions;
        converted += stats.conversions;
    }
    let treatment = ArmResult::new(shown, converted);
    let test = two_proportion_z(control.conversions, control.impressions, treatment.conversions, treatment.impressions);

    Ok(ExperimentReport {
        seed: config.seed,
        guests: config.guests,
        impressions_per_guest: config.impressions_per_guest,
        base_rate: config.base_rate,
        matched_odds_multiplier: config.matched_odds_multiplier,
        control,
        treatment,
        expected_treatment_rate: matched,
        uplift: uplift(control.rate, treatment.rate).ok(),
        z_statistic: test.z,
        p_value: test.p_value,
        treatment_messages: matched_messages.len(),
    })
}
