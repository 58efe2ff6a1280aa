use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AccommodationId, Attribute, AttributeVector, DomainError, ItemId, Level};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemCategory {
    Wine,
    Dish,
    Spa,
    Other,
}

/// A sellable item with its expert-authored attribute levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CatalogItem {
    pub id: ItemId,
    #[serde(rename = "accommodationId")]
    pub accommodation: AccommodationId,
    pub category: ItemCategory,
    #[serde(default)]
    pub attributes: BTreeMap<Attribute, Level>,
    pub price_bucket: String,
    #[serde(default)]
    pub display_name: String,
}

impl CatalogItem {
    /// The full ten-attribute vector, or the first missing attribute.
    pub fn attribute_vector(&self) -> Result<AttributeVector, DomainError> {
        let mut vector = AttributeVector::uniform(Level::new(1).expect("1 is a level"));
        for attribute in Attribute::ALL {
            let level = self
                .attributes
                .get(&attribute)
                .ok_or_else(|| DomainError::MissingAttribute(attribute.name().to_string()))?;
            vector.set(attribute, *level);
        }
        Ok(vector)
    }
}

impl Serialize for Level {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.get())
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u8),
            Text(String),
        }
        let raw = match Raw::deserialize(deserializer)? {
            Raw::Int(n) => n,
            Raw::Text(s) => s.trim().parse().map_err(serde::de::Error::custom)?,
        };
        Level::new(raw).ok_or_else(|| serde::de::Error::custom(format!("invalid level {raw}")))
    }
}

/// Validated item list for one accommodation, kept sorted by item id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Catalog {
    accommodation: AccommodationId,
    items: Vec<CatalogItem>,
}

impl Catalog {
    pub fn new(
        accommodation: AccommodationId,
        mut items: Vec<CatalogItem>,
    ) -> Result<Self, DomainError> {
        items.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in items.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(DomainError::DuplicateItem(
                    pair[0].id.to_string(),
                    accommodation.to_string(),
                ));
            }
        }
        for item in &items {
            if item.accommodation != accommodation {
                return Err(DomainError::Malformed(format!(
                    "item {} belongs to {}, not {}",
                    item.id, item.accommodation, accommodation
                )));
            }
            if item.category == ItemCategory::Wine {
                item.attribute_vector()?;
            }
        }
        Ok(Self {
            accommodation,
            items,
        })
    }

    /// Loads a JSON array of items.
    pub fn from_json(accommodation: AccommodationId, json: &str) -> Result<Self, DomainError> {
        let items: Vec<CatalogItem> =
            serde_json::from_str(json).map_err(|e| DomainError::Malformed(e.to_string()))?;
        Self::new(accommodation, items)
    }

    pub fn accommodation(&self) -> &AccommodationId {
        &self.accommodation
    }

    pub fn items(&self) -> &[CatalogItem] {
        &self.items
    }

    pub fn get(&self, id: &ItemId) -> Option<&CatalogItem> {
        self.items
            .binary_search_by(|item| item.id.cmp(id))
            .ok()
            .map(|i| &self.items[i])
    }

    pub fn wines(&self) -> impl Iterator<Item = &CatalogItem> {
        self.items
            .iter()
            .filter(|item| item.category == ItemCategory::Wine)
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}
