use std::collections::BTreeMap;

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};

use super::{DomainError, ItemId, ReservationNumber, Stars};
use crate::influence::{PersuasionCategory, QuizAnswer};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InteractionKind {
    MessageShown { message: String },
    MessageClicked { message: String },
    MessageConverted { message: String },
    Rated { item: ItemId, stars: Stars },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub at: DateTime<FixedOffset>,
    #[serde(flatten)]
    pub kind: InteractionKind,
}

/// What the platform knows about a guest: questionnaire answers (indirect
/// data) and observed interactions (direct data).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GuestProfile {
    #[serde(rename = "reservationNumber")]
    pub reservation: Option<ReservationNumber>,
    #[serde(default)]
    pub demographics: BTreeMap<String, String>,
    #[serde(default)]
    pub indirect: Vec<QuizAnswer>,
    #[serde(default)]
    direct: Vec<InteractionEvent>,
    #[serde(default)]
    pub persuasion: Option<PersuasionCategory>,
}

impl GuestProfile {
    pub fn new(reservation: ReservationNumber) -> Self {
        Self {
            reservation: Some(reservation),
            ..Self::default()
        }
    }

    pub fn direct(&self) -> &[InteractionEvent] {
        &self.direct
    }

    /// Appends an interaction. Events must not go back in time.
    pub fn record(&mut self, event: InteractionEvent) -> Result<(), DomainError> {
        if self.direct.last().is_some_and(|last| last.at > event.at) {
            return Err(DomainError::OutOfOrderEvent);
        }
        self.direct.push(event);
        Ok(())
    }
}
