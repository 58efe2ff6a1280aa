use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};

use super::RichText;
use crate::domain::{AccommodationId, ReservationNumber};
use crate::influence::PersuasionCategory;
use crate::prompt::{AdCopy, AdCopySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageStatus {
    #[default]
    Paused,
    Enabled,
}

/// Where a message is shown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Wifi,
    Tv,
    App,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CampaignMessage {
    pub id: String,
    #[serde(rename = "accommodationId")]
    pub accommodation: AccommodationId,
    pub name: String,
    pub status: MessageStatus,
    pub channels: BTreeSet<Channel>,
    /// Title per language code.
    pub title: BTreeMap<String, RichText>,
    pub spec: Option<AdCopySpec>,
    pub variants: Vec<AdCopy>,
    /// 1-based index into `variants`.
    pub chosen_variant: Option<u32>,
    pub category: Option<PersuasionCategory>,
    pub created_at: DateTime<FixedOffset>,
    pub updated_at: DateTime<FixedOffset>,
}

impl CampaignMessage {
    /// Enabled messages need a channel and a chosen variant that exists.
    pub fn check_invariants(&self) -> Result<(), String> {
        if let Some(chosen) = self.chosen_variant {
            if chosen == 0 || chosen as usize > self.variants.len() {
                return Err(format!(
                    "chosen variant {chosen} outside 1..={}",
                    self.variants.len()
                ));
            }
        }
        if self.status == MessageStatus::Enabled {
            if self.channels.is_empty() {
                return Err("an enabled message needs at least one channel".into());
            }
            if self.chosen_variant.is_none() {
                return Err("an enabled message needs a chosen variant".into());
            }
        }
        Ok(())
    }
}

/// Fields a client supplies when creating a message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MessageDraft {
    #[serde(rename = "accommodationId")]
    pub accommodation: AccommodationId,
    pub name: String,
    #[serde(default)]
    pub title: BTreeMap<String, RichText>,
    #[serde(default)]
    pub spec: Option<AdCopySpec>,
    #[serde(default)]
    pub variants: Vec<AdCopy>,
    #[serde(default)]
    pub category: Option<PersuasionCategory>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Impression,
    Click,
    Conversion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeliveryEvent {
    pub message: String,
    #[serde(rename = "reservationNumber")]
    pub reservation: ReservationNumber,
    pub kind: EventKind,
    pub at: DateTime<FixedOffset>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MessageStats {
    pub impressions: u64,
    pub clicks: u64,
    pub conversions: u64,
    pub conversion_rate: f64,
}

impl MessageStats {
    pub(crate) fn count(&mut self, kind: EventKind) {
        match kind {
            EventKind::Impression => self.impressions += 1,
            EventKind::Click => self.clicks += 1,
            EventKind::Conversion => self.conversions += 1,
        }
        self.conversion_rate = if self.impressions == 0 {
            0.0
        } else {
            self.conversions as f64 / self.impressions as f64
        };
    }
}
