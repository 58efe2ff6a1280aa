use std::collections::BTreeSet;

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};

use super::{AccommodationId, DomainError, ItemId, ReservationNumber};

/// Items a guest has ordered so far, in order of purchase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order {
    #[serde(rename = "accommodationId")]
    pub accommodation: AccommodationId,
    #[serde(rename = "reservationNumber")]
    pub reservation: ReservationNumber,
    pub lines: Vec<ItemId>,
    #[serde(rename = "openedAt")]
    pub opened_at: DateTime<FixedOffset>,
}

impl Order {
    /// Rejects orders that list the same item twice.
    pub fn validate(&self) -> Result<(), DomainError> {
        let mut seen = BTreeSet::new();
        for line in &self.lines {
            if !seen.insert(line) {
                return Err(DomainError::DuplicateItem(
                    line.to_string(),
                    format!("order of {}", self.reservation),
                ));
            }
        }
        Ok(())
    }

    pub fn contains(&self, item: &ItemId) -> bool {
        self.lines.contains(item)
    }
}
