//! Campaign messages and their delivery funnel.
//!
//! On disk, each accommodation gets a directory holding
//! `messages.snapshot` (the current messages, rewritten on every change) and
//! `events.log` (one JSON delivery event per line, append-only). Counters are
//! never stored; they are a fold over the log.

mod message;
mod richtext;
mod store;

pub use message::{
    CampaignMessage, Channel, DeliveryEvent, EventKind, MessageDraft, MessageStats, MessageStatus,
};
pub use richtext::RichText;
pub use store::{CampaignStore, EVENT_LOG_FILE, MESSAGE_SNAPSHOT_FILE, STORE_FORMAT_VERSION};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CampaignError {
    #[error("message {0} not found")]
    NotFound(String),
    #[error("a message named {0:?} already exists")]
    DuplicateName(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("conversion for {message}/{reservation} has no prior impression")]
    OrphanConversion {
        message: String,
        reservation: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("storage error: {0}")]
    Io(String),
    #[error("corrupt store: {0}")]
    Corrupt(String),
}

impl From<std::io::Error> for CampaignError {
    fn from(err: std::io::Error) -> Self {
        CampaignError::Io(err.to_string())
    }
}
