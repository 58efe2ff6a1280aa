use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{EmotionTaxonomy, InfluenceError, PersuasionCategory, PersuasionPrinciple};

/// Default cue phrases and emoticons per sub-emotion, drawn from the
/// vocabulary of hand-written and generated spa messages.
const EMOTION_CUES: &[(&str, &[&str], &[&str])] = &[
    ("gratification", &["treat yourself", "72 hour sale", "you deserve it"], &["😊", "🎁"]),
    ("fascination", &["drop everything", "fascinating offer awaits", "discover something new"], &["✨", "🌟"]),
    ("excitement", &["wow", "something awesome", "just for you"], &["😄", "🎉"]),
    ("intimacy", &["something special today", "deal of the day", "just the two of you"], &["❤️", "💑"]),
    ("gratitude", &["because we appreciate you", "early access", "our thanks"], &["🙏", "★"]),
    ("safety", &["it's true", "secure your spot", "guaranteed relaxation"], &["🛡️", "⏰"]),
    ("luck", &["lucky you", "your lucky day", "we're releasing"], &["🍀", "🎲"]),
    ("exclusivity", &["sneak preview", "exclusive offer", "unbeatable deals"], &["👉", "💎"]),
    ("achievement", &["nicely done", "you earned it", "reward yourself"], &["🏆", "👏"]),
    ("encouragement", &["for real", "go for it", "you can do it"], &["👉", "💪"]),
    ("curiosity", &["open now", "your invitation", "guess what"], &["👀", "🔥"]),
    ("challenge", &["take the challenge", "get prepared", "trust us"], &["🎯", "🛡️"]),
    ("guilt", &["you owe yourself", "no excuses", "don't let it slip"], &["😇", "🙈"]),
    ("urgency", &["limited time", "move fast", "offer ends soon"], &["⏰", "🏃"]),
    ("anxiety", &["before it's gone", "only a few left", "don't be left out"], &["😬", "⚠️"]),
    ("attention", &["special announcement", "just announced", "heads up"], &["📣", "📢"]),
    ("regret", &["can't miss", "don't miss out", "regret nothing"], &["🙏", "😌"]),
];

const PRINCIPLE_CUES: [(PersuasionPrinciple, &[&str]); 6] = [
    (PersuasionPrinciple::Authority, &["expert recommended", "chosen by our therapists"]),
    (PersuasionPrinciple::Commitment, &["keep your promise to yourself", "stay on track"]),
    (PersuasionPrinciple::SocialProof, &["guests love it", "our most popular"]),
    (PersuasionPrinciple::Liking, &["made for you", "with a smile"]),
    (PersuasionPrinciple::Reciprocity, &["our gift to you", "as a thank you"]),
    (PersuasionPrinciple::Scarcity, &["limited spots", "while it lasts"]),
];

pub(crate) fn phrases_for(sub_emotion: &str) -> Option<&'static [&'static str]> {
    EMOTION_CUES
        .iter()
        .find(|(name, _, _)| name.eq_ignore_ascii_case(sub_emotion))
        .map(|(_, phrases, _)| *phrases)
}

pub(crate) fn emoticons_for(sub_emotion: &str) -> &'static [&'static str] {
    EMOTION_CUES
        .iter()
        .find(|(name, _, _)| name.eq_ignore_ascii_case(sub_emotion))
        .map(|(_, _, emoticons)| *emoticons)
        .unwrap_or(&["😊"])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmotionCue {
    pub keyword: String,
    pub phrases: Vec<String>,
}

/// What a persuasive message for one grid cell should sound like.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MessageDirective {
    pub category: PersuasionCategory,
    pub tone_keywords: Vec<String>,
    pub emotion_keyword: String,
}

/// Keyword bundles per sub-emotion and per principle, with optional
/// per-cell overrides keyed `"<sub-emotion>/<principle>"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfluenceGrid {
    pub emotions: BTreeMap<String, EmotionCue>,
    pub principles: BTreeMap<PersuasionPrinciple, Vec<String>>,
    #[serde(default)]
    pub cells: BTreeMap<String, Vec<String>>,
}

impl Default for InfluenceGrid {
    fn default() -> Self {
        let strings = |items: &[&str]| items.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        Self {
            emotions: EMOTION_CUES
                .iter()
                .map(|(name, phrases, _)| {
                    (
                        name.to_string(),
                        EmotionCue {
                            keyword: name.to_string(),
                            phrases: strings(phrases),
                        },
                    )
                })
                .collect(),
            principles: PRINCIPLE_CUES
                .iter()
                .map(|(p, cues)| (*p, strings(cues)))
                .collect(),
            cells: BTreeMap::new(),
        }
    }
}

impl InfluenceGrid {
    /// Loads a grid document. Keys are case-insensitive.
    pub fn from_json(json: &str) -> Result<Self, InfluenceError> {
        let mut grid: Self =
            serde_json::from_str(json).map_err(|e| InfluenceError::Malformed(e.to_string()))?;
        grid.emotions = grid
            .emotions
            .into_iter()
            .map(|(k, v)| (k.to_lowercase(), v))
            .collect();
        grid.cells = grid
            .cells
            .into_iter()
            .map(|(k, v)| (k.to_lowercase(), v))
            .collect();
        Ok(grid)
    }

    /// Every sub-emotion of `taxonomy` and every principle must have a
    /// non-empty cue so that [`directive_for`](Self::directive_for) is total.
    pub fn check_covers(&self, taxonomy: &EmotionTaxonomy) -> Result<(), InfluenceError> {
        for (_, sub) in taxonomy.sub_emotions() {
            match self.emotions.get(&sub.to_lowercase()) {
                Some(cue) if !cue.keyword.trim().is_empty() && !cue.phrases.is_empty() => {}
                _ => return Err(InfluenceError::IncompleteGrid(sub.to_string())),
            }
        }
        for principle in PersuasionPrinciple::ALL {
            if self.principles.get(&principle).is_none_or(Vec::is_empty) {
                return Err(InfluenceError::IncompleteGrid(principle.to_string()));
            }
        }
        for (key, cues) in &self.cells {
            if cues.is_empty() {
                return Err(InfluenceError::IncompleteGrid(key.clone()));
            }
        }
        Ok(())
    }

    /// Keyword bundle for a cell: a cell override if configured, otherwise
    /// the principle cues followed by the sub-emotion phrases.
    pub fn directive_for(&self, category: &PersuasionCategory) -> MessageDirective {
        let sub = category.sub_emotion.to_lowercase();
        let cue = self.emotions.get(&sub);
        let emotion_keyword = cue.map_or_else(|| sub.clone(), |c| c.keyword.clone());
        let cell_key = format!("{sub}/{}", category.principle);
        let tone_keywords = match self.cells.get(&cell_key) {
            Some(cues) => cues.clone(),
            None => self
                .principles
                .get(&category.principle)
                .into_iter()
                .flatten()
                .chain(cue.map(|c| &c.phrases).into_iter().flatten())
                .cloned()
                .collect(),
        };
        MessageDirective {
            category: category.clone(),
            tone_keywords,
            emotion_keyword,
        }
    }
}
