use std::collections::BTreeSet;
use std::fmt;

use chrono::{DateTime, FixedOffset};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use super::{AccommodationId, DomainError, ReservationNumber};

/// `_class` tag carried by stored wine-profile documents.
pub const WINE_PROFILE_CLASS: &str =
    "com.infamous.persistence.documents.wineProfiles.models.WineProfile";

const DATE_TIME_FORMAT: &str = "%Y-%m-%dT%H:%M:%S%.3f%:z";

/// The ten sensory attributes a wine quiz asks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    Color,
    Tannins,
    Fruitness,
    Acidity,
    Body,
    Earthy,
    Spices,
    Herbal,
    Floral,
    Oaky,
}

impl Attribute {
    pub const ALL: [Attribute; 10] = [
        Attribute::Color,
        Attribute::Tannins,
        Attribute::Fruitness,
        Attribute::Acidity,
        Attribute::Body,
        Attribute::Earthy,
        Attribute::Spices,
        Attribute::Herbal,
        Attribute::Floral,
        Attribute::Oaky,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Attribute::Color => "color",
            Attribute::Tannins => "tannins",
            Attribute::Fruitness => "fruitness",
            Attribute::Acidity => "acidity",
            Attribute::Body => "body",
            Attribute::Earthy => "earthy",
            Attribute::Spices => "spices",
            Attribute::Herbal => "herbal",
            Attribute::Floral => "floral",
            Attribute::Oaky => "oaky",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordinal answer level: 1 (low), 2 (medium) or 3 (high).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(u8);

impl Level {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = 3;

    pub fn new(value: u8) -> Option<Self> {
        (Self::MIN..=Self::MAX).contains(&value).then_some(Self(value))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Accepts a quoted digit (`"2"`) or a bare integer (`2`).
    fn from_json(attribute: &str, value: &Value) -> Result<Self, DomainError> {
        let invalid = || DomainError::InvalidLevel(attribute.to_string(), display_value(value));
        let raw = match value {
            Value::String(s) => s.trim().parse::<u8>().map_err(|_| invalid())?,
            Value::Number(n) => n
                .as_u64()
                .and_then(|n| u8::try_from(n).ok())
                .ok_or_else(invalid)?,
            _ => return Err(invalid()),
        };
        Level::new(raw).ok_or_else(invalid)
    }
}

fn display_value(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Levels for all ten attributes, indexed in [`Attribute::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AttributeVector([Level; 10]);

impl AttributeVector {
    pub fn new(levels: [Level; 10]) -> Self {
        Self(levels)
    }

    /// Builds a vector from raw levels; `None` if any is outside 1..=3.
    pub fn from_levels(levels: [u8; 10]) -> Option<Self> {
        let mut out = [Level(1); 10];
        for (slot, raw) in out.iter_mut().zip(levels) {
            *slot = Level::new(raw)?;
        }
        Some(Self(out))
    }

    pub fn uniform(level: Level) -> Self {
        Self([level; 10])
    }

    pub fn get(&self, attribute: Attribute) -> Level {
        self.0[attribute.index()]
    }

    pub fn set(&mut self, attribute: Attribute, level: Level) {
        self.0[attribute.index()] = level;
    }

    pub fn levels(&self) -> [u8; 10] {
        self.0.map(Level::get)
    }

    pub fn as_f64(&self) -> [f64; 10] {
        self.0.map(|l| f64::from(l.get()))
    }

    pub(crate) fn from_json_object(
        object: &serde_json::Map<String, Value>,
    ) -> Result<Self, DomainError> {
        let mut out = [Level(1); 10];
        for attribute in Attribute::ALL {
            let value = object
                .get(attribute.name())
                .ok_or_else(|| DomainError::MissingAttribute(attribute.name().to_string()))?;
            out[attribute.index()] = Level::from_json(attribute.name(), value)?;
        }
        Ok(Self(out))
    }
}

impl Serialize for AttributeVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(10))?;
        for attribute in Attribute::ALL {
            map.serialize_entry(attribute.name(), &self.get(attribute).get().to_string())?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for AttributeVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        let object = value
            .as_object()
            .ok_or_else(|| serde::de::Error::custom("attribute map must be an object"))?;
        Self::from_json_object(object).map_err(serde::de::Error::custom)
    }
}

/// Price bucket token such as `less_60`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriceBucket(String);

impl PriceBucket {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PriceBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The configured set of price buckets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriceBuckets(BTreeSet<String>);

impl Default for PriceBuckets {
    fn default() -> Self {
        Self::new(["less_60", "60_120", "over_120"])
    }
}

impl PriceBuckets {
    pub fn new<I, S>(buckets: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self(buckets.into_iter().map(Into::into).collect())
    }

    pub fn bucket(&self, token: &str) -> Result<PriceBucket, DomainError> {
        if self.0.contains(token) {
            Ok(PriceBucket(token.to_string()))
        } else {
            Err(DomainError::UnknownPriceBucket(token.to_string()))
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

/// A guest's wine quiz answers.
#[derive(Debug, Clone, PartialEq)]
pub struct WinePreferenceProfile {
    pub accommodation: AccommodationId,
    pub reservation: ReservationNumber,
    pub profile_name: String,
    pub preferences: AttributeVector,
    pub price: PriceBucket,
    pub captured_at: DateTime<FixedOffset>,
}

/// Parses a stored wine-profile document. `_id`, `_class` and any unknown
/// fields are ignored.
pub fn parse_wine_profile(
    document: &str,
    buckets: &PriceBuckets,
) -> Result<WinePreferenceProfile, DomainError> {
    let value: Value =
        serde_json::from_str(document).map_err(|e| DomainError::Malformed(e.to_string()))?;
    wine_profile_from_value(&value, buckets)
}

pub(crate) fn wine_profile_from_value(
    value: &Value,
    buckets: &PriceBuckets,
) -> Result<WinePreferenceProfile, DomainError> {
    let root = value
        .as_object()
        .ok_or_else(|| DomainError::Malformed("profile must be an object".into()))?;
    let text = |field: &str| -> Result<&str, DomainError> {
        root.get(field)
            .and_then(Value::as_str)
            .ok_or_else(|| DomainError::Malformed(format!("missing string field {field}")))
    };

    let accommodation = AccommodationId::new(text("accommodationId")?)?;
    let reservation = ReservationNumber::new(text("reservationNumber")?)?;
    let profile_name = root
        .get("profileName")
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();
    let captured_at = DateTime::parse_from_rfc3339(text("dateTime")?)
        .map_err(|e| DomainError::Malformed(format!("dateTime: {e}")))?;

    let preferences = root
        .get("preferences")
        .and_then(Value::as_object)
        .ok_or_else(|| DomainError::Malformed("missing preferences object".into()))?;
    let levels = AttributeVector::from_json_object(preferences)?;
    let price = match preferences.get("price") {
        Some(Value::String(token)) => buckets.bucket(token)?,
        Some(other) => return Err(DomainError::UnknownPriceBucket(other.to_string())),
        None => return Err(DomainError::MissingAttribute("price".into())),
    };

    Ok(WinePreferenceProfile {
        accommodation,
        reservation,
        profile_name,
        preferences: levels,
        price,
        captured_at,
    })
}

#[derive(Serialize)]
struct ProfileDoc<'a> {
    #[serde(rename = "_id", skip_serializing_if = "Option::is_none")]
    id: Option<&'a str>,
    #[serde(rename = "accommodationId")]
    accommodation: &'a AccommodationId,
    #[serde(rename = "reservationNumber")]
    reservation: &'a ReservationNumber,
    #[serde(rename = "profileName")]
    profile_name: &'a str,
    preferences: PreferencesDoc<'a>,
    #[serde(rename = "dateTime")]
    date_time: String,
    #[serde(rename = "_class")]
    class: &'static str,
}

struct PreferencesDoc<'a>(&'a WinePreferenceProfile);

impl Serialize for PreferencesDoc<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(11))?;
        for attribute in Attribute::ALL {
            map.serialize_entry(
                attribute.name(),
                &self.0.preferences.get(attribute).get().to_string(),
            )?;
        }
        map.serialize_entry("price", self.0.price.as_str())?;
        map.end()
    }
}

/// Writes a profile in the stored document shape. `document_id` fills `_id`
/// when the caller has one.
pub fn serialize_wine_profile(profile: &WinePreferenceProfile, document_id: Option<&str>) -> String {
    let doc = ProfileDoc {
        id: document_id,
        accommodation: &profile.accommodation,
        reservation: &profile.reservation,
        profile_name: &profile.profile_name,
        preferences: PreferencesDoc(profile),
        date_time: profile.captured_at.format(DATE_TIME_FORMAT).to_string(),
        class: WINE_PROFILE_CLASS,
    };
    serde_json::to_string(&doc).expect("profile document serializes")
}

impl Serialize for WinePreferenceProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let value: Value = serde_json::from_str(&serialize_wine_profile(self, None))
            .map_err(serde::ser::Error::custom)?;
        value.serialize(serializer)
    }
}
