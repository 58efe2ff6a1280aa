use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::InfluenceError;

const FAMILY_COUNT: usize = 5;
const SUB_EMOTIONS_PER_FAMILY: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EmotionFamily {
    pub name: String,
    pub sub_emotions: Vec<String>,
}

/// On-disk taxonomy shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyDocument {
    pub version: String,
    pub families: Vec<EmotionFamily>,
}

/// Five emotion families of three sub-emotions each, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmotionTaxonomy {
    version: String,
    families: Vec<EmotionFamily>,
}

fn family(name: &str, subs: [&str; 3]) -> EmotionFamily {
    EmotionFamily {
        name: name.to_string(),
        sub_emotions: subs.iter().map(|s| s.to_string()).collect(),
    }
}

impl EmotionTaxonomy {
    pub fn from_document(document: TaxonomyDocument) -> Result<Self, InfluenceError> {
        if document.families.len() != FAMILY_COUNT {
            return Err(InfluenceError::WrongArity(format!(
                "{} families",
                document.families.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for family in &document.families {
            if family.sub_emotions.len() != SUB_EMOTIONS_PER_FAMILY {
                return Err(InfluenceError::WrongArity(format!(
                    "{} has {} sub-emotions",
                    family.name,
                    family.sub_emotions.len()
                )));
            }
            for name in std::iter::once(&family.name).chain(&family.sub_emotions) {
                let name = name.trim();
                if name.is_empty() {
                    return Err(InfluenceError::Malformed("empty emotion name".into()));
                }
                if !seen.insert(name.to_lowercase()) {
                    return Err(InfluenceError::DuplicateName(name.to_string()));
                }
            }
        }
        Ok(Self {
            version: document.version,
            families: document.families,
        })
    }

    pub fn from_json(json: &str) -> Result<Self, InfluenceError> {
        let document: TaxonomyDocument =
            serde_json::from_str(json).map_err(|e| InfluenceError::Malformed(e.to_string()))?;
        Self::from_document(document)
    }

    /// `wheel` is the wheel as usually listed. `spa_corpus` swaps the Fear row for
    /// the one used by the spa message corpus.
    pub fn preset(name: &str) -> Result<Self, InfluenceError> {
        let fear = match name {
            "wheel" => ["Guilt", "Urgency", "Anxiety"],
            "spa_corpus" => ["Attention", "Urgency", "Regret"],
            other => return Err(InfluenceError::UnknownPreset(other.to_string())),
        };
        Self::from_document(TaxonomyDocument {
            version: name.to_string(),
            families: vec![
                family("Joy", ["Gratification", "Fascination", "Excitement"]),
                family("Trust", ["Intimacy", "Gratitude", "Safety"]),
                family("Pride", ["Luck", "Exclusivity", "Achievement"]),
                family("Anticipation", ["Encouragement", "Curiosity", "Challenge"]),
                family("Fear", fear),
            ],
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn families(&self) -> &[EmotionFamily] {
        &self.families
    }

    /// `(family, sub-emotion)` pairs in declaration order.
    pub fn sub_emotions(&self) -> impl Iterator<Item = (&str, &str)> {
        self.families.iter().flat_map(|f| {
            f.sub_emotions
                .iter()
                .map(move |s| (f.name.as_str(), s.as_str()))
        })
    }

    /// Case-insensitive lookup returning the canonical `(family, sub)` names.
    pub fn find_sub_emotion(&self, name: &str) -> Option<(&str, &str)> {
        let name = name.trim();
        self.sub_emotions()
            .find(|(_, sub)| sub.eq_ignore_ascii_case(name))
    }

    pub fn categories(&self) -> impl Iterator<Item = PersuasionCategory> + '_ {
        self.sub_emotions().flat_map(|(family, sub)| {
            PersuasionPrinciple::ALL.into_iter().map(move |principle| PersuasionCategory {
                emotion: family.to_string(),
                sub_emotion: sub.to_string(),
                principle,
            })
        })
    }
}

impl Default for EmotionTaxonomy {
    fn default() -> Self {
        Self::preset("wheel").expect("built-in preset is valid")
    }
}

/// The six persuasion principles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PersuasionPrinciple {
    Authority,
    Commitment,
    SocialProof,
    Liking,
    Reciprocity,
    Scarcity,
}

impl PersuasionPrinciple {
    pub const ALL: [PersuasionPrinciple; 6] = [
        PersuasionPrinciple::Authority,
        PersuasionPrinciple::Commitment,
        PersuasionPrinciple::SocialProof,
        PersuasionPrinciple::Liking,
        PersuasionPrinciple::Reciprocity,
        PersuasionPrinciple::Scarcity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PersuasionPrinciple::Authority => "authority",
            PersuasionPrinciple::Commitment => "commitment",
            PersuasionPrinciple::SocialProof => "social_proof",
            PersuasionPrinciple::Liking => "liking",
            PersuasionPrinciple::Reciprocity => "reciprocity",
            PersuasionPrinciple::Scarcity => "scarcity",
        }
    }
}

impl fmt::Display for PersuasionPrinciple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PersuasionPrinciple {
    type Err = InfluenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        let s = match s.as_str() {
            "consensus" | "social proof" | "social-proof" => "social_proof",
            other => other,
        };
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| InfluenceError::Malformed(format!("unknown principle {s:?}")))
    }
}

/// A guest's cell in the emotion × principle grid.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PersuasionCategory {
    pub emotion: String,
    pub sub_emotion: String,
    pub principle: PersuasionPrinciple,
}

impl PersuasionCategory {
    /// Resolves a sub-emotion (any case) and derives its family.
    pub fn new(
        taxonomy: &EmotionTaxonomy,
        sub_emotion: &str,
        principle: PersuasionPrinciple,
    ) -> Result<Self, InfluenceError> {
        let (family, sub) = taxonomy
            .find_sub_emotion(sub_emotion)
            .ok_or_else(|| InfluenceError::UnknownEmotion(sub_emotion.to_string()))?;
        Ok(Self {
            emotion: family.to_string(),
            sub_emotion: sub.to_string(),
            principle,
        })
    }

    /// Checks that the sub-emotion belongs to the stated family.
    pub fn validate(&self, taxonomy: &EmotionTaxonomy) -> Result<(), InfluenceError> {
        match taxonomy.find_sub_emotion(&self.sub_emotion) {
            Some((family, _)) if family.eq_ignore_ascii_case(&self.emotion) => Ok(()),
            _ => Err(InfluenceError::UnknownEmotion(format!(
                "{}/{}",
                self.emotion, self.sub_emotion
            ))),
        }
    }
}
