use serde::{Deserialize, Serialize};

use super::PromptError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CopyStyle {
    #[default]
    AdCopy,
    MetaDescriptions,
}

fn default_language() -> String {
    "English".to_string()
}

fn default_copies() -> u32 {
    3
}

/// Parameters of one ad-copy request.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdCopySpec {
    pub task: String,
    pub topic: String,
    pub emotion: String,
    pub tone: String,
    #[serde(default = "default_language")]
    pub language: String,
    pub length_words: u32,
    #[serde(default)]
    pub include_emoticon: bool,
    #[serde(default = "default_copies")]
    pub copies: u32,
    #[serde(default)]
    pub style: CopyStyle,
}

impl AdCopySpec {
    pub const MIN_WORDS: u32 = 5;
    pub const MAX_WORDS: u32 = 60;
    pub const MAX_COPIES: u32 = 10;

    pub fn validate(&self) -> Result<(), PromptError> {
        if !(Self::MIN_WORDS..=Self::MAX_WORDS).contains(&self.length_words) {
            return Err(PromptError::InvalidSpec(format!(
                "lengthWords must be in {}..={}, got {}",
                Self::MIN_WORDS,
                Self::MAX_WORDS,
                self.length_words
            )));
        }
        if !(1..=Self::MAX_COPIES).contains(&self.copies) {
            return Err(PromptError::InvalidSpec(format!(
                "copies must be in 1..={}, got {}",
                Self::MAX_COPIES,
                self.copies
            )));
        }
        for (name, value) in [
            ("task", &self.task),
            ("topic", &self.topic),
            ("emotion", &self.emotion),
            ("tone", &self.tone),
            ("language", &self.language),
        ] {
            if value.trim().is_empty() {
                return Err(PromptError::InvalidSpec(format!("{name} is empty")));
            }
            if value.contains(['\n', '\r']) {
                return Err(PromptError::InvalidSpec(format!("{name} spans lines")));
            }
        }
        Ok(())
    }

    fn is_english(&self) -> bool {
        self.language.trim().eq_ignore_ascii_case("english")
    }
}

/// One generated variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdCopy {
    pub text: String,
    pub index: u32,
    pub word_count: u32,
    pub has_emoticon: bool,
}

/// Renders the prompt sentence for a spec.
///
/// Ad copy: `Create {copies} ad copies about {task} for {topic}, with
/// {emotion}, and {tone}, Use an emoticon, in {n} words, in {language}`, where
/// the emoticon clause is dropped when not requested and the language clause
/// is dropped for English. Meta descriptions: `List {copies} compelling Google
/// Ads responsive meta descriptions about {task} for {topic}, showing
/// {emotion} and {tone}, in {n} words`.
pub fn build_prompt(spec: &AdCopySpec) -> String {
    match spec.style {
        CopyStyle::AdCopy => {
            let mut prompt = format!(
                "Create {} ad copies about {} for {}, with {}, and {}",
                spec.copies, spec.task, spec.topic, spec.emotion, spec.tone
            );
            if spec.include_emoticon {
                prompt.push_str(", Use an emoticon");
            }
            prompt.push_str(&format!(", in {} words", spec.length_words));
            if !spec.is_english() {
                prompt.push_str(&format!(", in {}", spec.language));
            }
            prompt
        }
        CopyStyle::MetaDescriptions => format!(
            "List {} compelling Google Ads responsive meta descriptions about {} for {}, showing {} and {}, in {} words",
            spec.copies, spec.task, spec.topic, spec.emotion, spec.tone, spec.length_words
        ),
    }
}
