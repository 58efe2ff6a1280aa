use std::fmt;

use serde::{Deserialize, Serialize};

use super::CampaignError;

const TAGS: [&str; 3] = ["b", "i", "u"];

/// Title text with optional `<b>`, `<i>` and `<u>` markup, properly nested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RichText(String);

impl RichText {
    pub fn new(text: impl Into<String>) -> Result<Self, CampaignError> {
        let text = text.into();
        let mut open: Vec<&str> = Vec::new();
        let mut rest = text.as_str();
        while let Some(start) = rest.find('<') {
            let after = &rest[start + 1..];
            let end = after
                .find('>')
                .ok_or_else(|| CampaignError::Invalid("unterminated tag".into()))?;
            let tag = &after[..end];
            match tag.strip_prefix('/') {
                Some(name) => {
                    if open.pop() != Some(name) {
                        return Err(CampaignError::Invalid(format!("unbalanced </{name}>")));
                    }
                }
                None if TAGS.contains(&tag) => open.push(tag),
                None => return Err(CampaignError::Invalid(format!("tag <{tag}> not allowed"))),
            }
            rest = &after[end + 1..];
        }
        if let Some(tag) = open.pop() {
            return Err(CampaignError::Invalid(format!("unclosed <{tag}>")));
        }
        Ok(Self(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The text with markup removed.
    pub fn plain(&self) -> String {
        let mut out = String::with_capacity(self.0.len());
        let mut in_tag = false;
        for c in self.0.chars() {
            match c {
                '<' => in_tag = true,
                '>' => in_tag = false,
                c if !in_tag => out.push(c),
                _ => {}
            }
        }
        out
    }
}

impl TryFrom<String> for RichText {
    type Error = CampaignError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<RichText> for String {
    fn from(value: RichText) -> Self {
        value.0
    }
}

impl fmt::Display for RichText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
