//! Core of the hotel upsell service.
//!
//! The crate is split by concern:
//!
//! - [`domain`]: guests, items, quiz profiles, ratings, orders and the JSON
//!   documents exchanged with clients.
//! - [`recommend`]: knowledge-based, content-based and neighborhood
//!   collaborative filtering recommenders plus order completion.
//! - [`influence`]: the emotion taxonomy, persuasion principles and guest
//!   categorization used to steer message tone.
//! - [`prompt`]: ad-copy prompt construction, LLM backends and copy validation.
//! - [`campaign`]: persisted campaign messages and their delivery events.

pub mod campaign;
pub mod domain;
pub mod influence;
pub mod prompt;
pub mod recommend;
