use std::fmt;
use std::io;
use std::str::FromStr;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::Value;

use super::{AccommodationId, DomainError, ItemId, ReservationNumber};

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S%.6f";

/// Which recommender produced a list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecommendationKind {
    Kbr,
    Cbr,
    Uucf,
    Iicf,
    PosIicf,
    PosPop,
}

impl RecommendationKind {
    pub const ALL: [RecommendationKind; 6] = [
        RecommendationKind::Kbr,
        RecommendationKind::Cbr,
        RecommendationKind::Uucf,
        RecommendationKind::Iicf,
        RecommendationKind::PosIicf,
        RecommendationKind::PosPop,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RecommendationKind::Kbr => "kbr",
            RecommendationKind::Cbr => "cbr",
            RecommendationKind::Uucf => "uucf",
            RecommendationKind::Iicf => "iicf",
            RecommendationKind::PosIicf => "pos_iicf",
            RecommendationKind::PosPop => "pos_pop",
        }
    }

    /// POS kinds list `recommendedItems`; wine kinds list `recommendedWines`.
    pub fn items_field(self) -> &'static str {
        match self {
            RecommendationKind::PosIicf | RecommendationKind::PosPop => "recommendedItems",
            _ => "recommendedWines",
        }
    }
}

impl fmt::Display for RecommendationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RecommendationKind {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| DomainError::Malformed(format!("unknown recommendation type {s:?}")))
    }
}

/// A recommendation response as sent to clients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecommendationDocument {
    pub accommodation: AccommodationId,
    pub items: Vec<ItemId>,
    pub reservation: ReservationNumber,
    pub timestamp: NaiveDateTime,
    pub kind: RecommendationKind,
}

impl RecommendationDocument {
    pub fn to_json(&self) -> String {
        serialize_recommendation(
            &self.accommodation,
            &self.items,
            &self.reservation,
            self.kind,
            self.timestamp,
        )
    }

    pub fn to_value(&self) -> Value {
        serde_json::from_str(&self.to_json()).expect("document is valid JSON")
    }
}

/// Writes `{ "key": value, "key": value}` with `[a, b]` arrays, the layout
/// clients already parse.
struct SpacedFormatter;

impl Formatter for SpacedFormatter {
    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        writer.write_all(if first { b" " } else { b", " })
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        writer.write_all(b": ")
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            writer.write_all(b", ")
        }
    }
}

/// Serializes a recommendation response. Field order is fixed:
/// `accommodationId`, the item list, `reservationNumber`, `timestamp`, `type`.
pub fn serialize_recommendation(
    accommodation: &AccommodationId,
    items: &[ItemId],
    reservation: &ReservationNumber,
    kind: RecommendationKind,
    timestamp: NaiveDateTime,
) -> String {
    let mut object = serde_json::Map::new();
    object.insert("accommodationId".into(), Value::from(accommodation.as_str()));
    object.insert(
        kind.items_field().into(),
        Value::Array(items.iter().map(|i| Value::from(i.as_str())).collect()),
    );
    object.insert("reservationNumber".into(), Value::from(reservation.as_str()));
    object.insert(
        "timestamp".into(),
        Value::from(timestamp.format(TIMESTAMP_FORMAT).to_string()),
    );
    object.insert("type".into(), Value::from(kind.as_str()));

    // serde_json's default map is sorted, so emit in our own order.
    const ORDER: [&str; 4] = ["accommodationId", "reservationNumber", "timestamp", "type"];
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SpacedFormatter);
    let ordered = OrderedFields {
        object: &object,
        keys: [ORDER[0], kind.items_field(), ORDER[1], ORDER[2], ORDER[3]],
    };
    ordered.serialize(&mut ser).expect("in-memory write");
    String::from_utf8(out).expect("JSON is UTF-8")
}

struct OrderedFields<'a> {
    object: &'a serde_json::Map<String, Value>,
    keys: [&'a str; 5],
}

impl Serialize for OrderedFields<'_> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.keys.len()))?;
        for key in self.keys {
            map.serialize_entry(key, &self.object[key])?;
        }
        map.end()
    }
}

/// Parses a recommendation response produced by [`serialize_recommendation`].
pub fn parse_recommendation(document: &str) -> Result<RecommendationDocument, DomainError> {
    let value: Value =
        serde_json::from_str(document).map_err(|e| DomainError::Malformed(e.to_string()))?;
    recommendation_from_value(&value)
}

pub(crate) fn recommendation_from_value(
    value: &Value,
) -> Result<RecommendationDocument, DomainError> {
    let root = value
        .as_object()
        .ok_or_else(|| DomainError::Malformed("document must be an object".into()))?;
    let text = |field: &str| -> Result<&str, DomainError> {
        root.get(field)
            .and_then(Value::as_str)
            .ok_or_else(|| DomainError::Malformed(format!("missing string field {field}")))
    };
    let kind: RecommendationKind = text("type")?.parse()?;
    let items = root
        .get(kind.items_field())
        .and_then(Value::as_array)
        .ok_or_else(|| DomainError::Malformed(format!("missing {}", kind.items_field())))?
        .iter()
        .map(|v| {
            v.as_str()
                .ok_or_else(|| DomainError::Malformed("item ids must be strings".into()))
                .and_then(ItemId::new)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let timestamp = NaiveDateTime::parse_from_str(text("timestamp")?, "%Y-%m-%dT%H:%M:%S%.f")
        .map_err(|e| DomainError::Malformed(format!("timestamp: {e}")))?;
    Ok(RecommendationDocument {
        accommodation: AccommodationId::new(text("accommodationId")?)?,
        items,
        reservation: ReservationNumber::new(text("reservationNumber")?)?,
        timestamp,
        kind,
    })
}

#[cfg(test)]
mod tests {
    use chrono::{Duration, NaiveDate};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    const SAMPLE_RESPONSE: &str = r#"{ "accommodationId": "smp", "recommendedWines": ["DI_MIN_PAL_WIN_46", "DI_MIN_PAL_WIN_33"], "reservationNumber": "151792", "timestamp": "2018-07-10T11:44:12.856229", "type": "kbr"}"#;

    fn reference_timestamp() -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2018, 7, 10)
            .unwrap()
            .and_hms_micro_opt(11, 44, 12, 856_229)
            .unwrap()
    }

    #[test]
    fn reproduces_reference_response_bytes() {
        let out = serialize_recommendation(
            &AccommodationId::new("smp").unwrap(),
            &[
                ItemId::new("DI_MIN_PAL_WIN_46").unwrap(),
                ItemId::new("DI_MIN_PAL_WIN_33").unwrap(),
            ],
            &ReservationNumber::new("151792").unwrap(),
            RecommendationKind::Kbr,
            reference_timestamp(),
        );
        assert_eq!(out, SAMPLE_RESPONSE);
    }

    #[test]
    fn empty_list_keeps_schema() {
        let out = serialize_recommendation(
            &AccommodationId::new("smp").unwrap(),
            &[],
            &ReservationNumber::new("151792").unwrap(),
            RecommendationKind::Kbr,
            reference_timestamp(),
        );
        let value: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(value["recommendedWines"], Value::Array(vec![]));
        assert_eq!(value.as_object().unwrap().len(), 5);
    }

    #[test]
    fn pos_kinds_use_items_field() {
        let out = serialize_recommendation(
            &AccommodationId::new("smp").unwrap(),
            &[ItemId::new("DESSERT_1").unwrap()],
            &ReservationNumber::new("1").unwrap(),
            RecommendationKind::PosIicf,
            reference_timestamp(),
        );
        assert!(out.contains(r#""recommendedItems": ["DESSERT_1"]"#));
        assert_eq!(parse_recommendation(&out).unwrap().kind, RecommendationKind::PosIicf);
    }

    #[test]
    fn randomized_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let base = reference_timestamp();
        for _ in 0..100 {
            let kind = RecommendationKind::ALL[rng.gen_range(0..6)];
            let items: Vec<ItemId> = (0..rng.gen_range(0..6))
                .map(|_| ItemId::new(format!("IT_{}", rng.gen_range(0..1000))).unwrap())
                .collect();
            let doc = RecommendationDocument {
                accommodation: AccommodationId::new(format!("h{}", rng.gen_range(0..100)))
                    .unwrap(),
                items,
                reservation: ReservationNumber::new(rng.gen_range(1..999_999u32).to_string())
                    .unwrap(),
                timestamp: base + Duration::microseconds(rng.gen_range(0..10_i64.pow(12))),
                kind,
            };
            let text = doc.to_json();
            assert_eq!(parse_recommendation(&text).unwrap(), doc);
            let fields: Vec<String> = serde_json::from_str::<Value>(&text)
                .unwrap()
                .as_object()
                .unwrap()
                .keys()
                .cloned()
                .collect();
            assert_eq!(fields.len(), 5);
        }
    }
}
