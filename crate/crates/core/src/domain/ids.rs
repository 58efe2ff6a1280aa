use std::fmt;

use serde::{Deserialize, Serialize};

use super::DomainError;

macro_rules! token_newtype {
    ($(#[$meta:meta])* $name:ident, $check:expr, $err:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(value: impl Into<String>) -> Result<Self, DomainError> {
                let value = value.into();
                let check: fn(&str) -> bool = $check;
                if check(&value) {
                    Ok(Self(value))
                } else {
                    Err(DomainError::$err(value))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = DomainError;

            fn try_from(value: String) -> Result<Self, Self::Error> {
                Self::new(value)
            }
        }

        impl From<$name> for String {
            fn from(value: $name) -> Self {
                value.0
            }
        }

        impl std::str::FromStr for $name {
            type Err = DomainError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::new(s)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }
    };
}

token_newtype!(
    /// Hotel code, e.g. `smp`. Lowercase `[a-z0-9_-]{1,16}`.
    AccommodationId,
    |s| {
        (1..=16).contains(&s.len())
            && s.bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' || b == b'-')
    },
    InvalidAccommodation
);

token_newtype!(
    /// Guest identity within an accommodation: a non-empty digit string.
    ReservationNumber,
    |s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()),
    InvalidReservation
);

token_newtype!(
    /// Catalog item token such as `DI_MIN_PAL_WIN_46`.
    ItemId,
    |s| !s.is_empty() && s.len() <= 64 && !s.chars().any(char::is_whitespace),
    InvalidItem
);
