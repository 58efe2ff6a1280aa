//! Shared vocabulary used by every other module.

mod catalog;
mod document;
mod guest;
mod ids;
mod order;
mod profile;
mod ratings;

pub use catalog::{Catalog, CatalogItem, ItemCategory};
pub use document::{
    parse_recommendation, serialize_recommendation, RecommendationDocument, RecommendationKind,
};
pub use guest::{GuestProfile, InteractionEvent, InteractionKind};
pub use ids::{AccommodationId, ItemId, ReservationNumber};
pub use order::Order;
pub use profile::{
    parse_wine_profile, serialize_wine_profile, Attribute, AttributeVector, Level, PriceBucket,
    PriceBuckets, WinePreferenceProfile, WINE_PROFILE_CLASS,
};
pub use ratings::{Rating, RatingsMatrix, Stars};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("invalid accommodation id {0:?}")]
    InvalidAccommodation(String),
    #[error("invalid reservation number {0:?}")]
    InvalidReservation(String),
    #[error("invalid item id {0:?}")]
    InvalidItem(String),
    #[error("missing attribute {0}")]
    MissingAttribute(String),
    #[error("invalid level {1:?} for attribute {0}")]
    InvalidLevel(String, String),
    #[error("unknown price bucket {0:?}")]
    UnknownPriceBucket(String),
    #[error("stars must be in 1..=5, got {0}")]
    InvalidStars(i64),
    #[error("duplicate item {0} in {1}")]
    DuplicateItem(String, String),
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("events must be appended in time order")]
    OutOfOrderEvent,
}
