use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::influence::{emoticons_for, phrases_for};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("{0}")]
    Unavailable(String),
    #[error("rate limit exceeded")]
    RateLimited,
    #[error("backend returned an error: {0}")]
    Upstream(String),
}

/// A text-completion service.
pub trait LlmBackend: Send + Sync {
    fn name(&self) -> &str;

    /// True when identical `(prompt, temperature, seed)` always yields the
    /// same completion.
    fn is_deterministic(&self) -> bool;

    fn generate(
        &self,
        prompt: &str,
        temperature: f64,
        seed: Option<u64>,
    ) -> Result<String, BackendError>;
}

/// Offline stand-in that fills templates from the prompt's own fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MockBackend {
    pub default_seed: u64,
}

impl MockBackend {
    pub fn new(default_seed: u64) -> Self {
        Self { default_seed }
    }
}

impl LlmBackend for MockBackend {
    fn name(&self) -> &str {
        "mock"
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn generate(
        &self,
        prompt: &str,
        _temperature: f64,
        seed: Option<u64>,
    ) -> Result<String, BackendError> {
        Ok(mock_generate(prompt, seed.unwrap_or(self.default_seed)))
    }
}

#[derive(Debug, Clone, PartialEq)]
struct PromptFields {
    copies: usize,
    task: String,
    topic: String,
    emotion: String,
    length_words: usize,
    emoticon: bool,
    language: Option<String>,
}

impl Default for PromptFields {
    fn default() -> Self {
        Self {
            copies: 3,
            task: "a special offer".into(),
            topic: "our hotel".into(),
            emotion: "excitement".into(),
            length_words: 15,
            emoticon: false,
            language: None,
        }
    }
}

/// Reads back the fields of a prompt produced by `build_prompt`. Only the
/// first line is considered.
fn parse_prompt(prompt: &str) -> Option<PromptFields> {
    let line = prompt.lines().next()?.trim();
    if let Some(rest) = line.strip_prefix("Create ") {
        let (copies, rest) = rest.split_once(" ad copies about ")?;
        let (head, tail) = rest.rsplit_once(", with ")?;
        let (task, topic) = head.rsplit_once(" for ")?;
        let (emotion, rest) = tail.split_once(", and ")?;
        let emoticon = rest.contains(", Use an emoticon");
        let (before_words, language) = match rest.rsplit_once(" words, in ") {
            Some((before, language)) => (before, Some(language.trim().to_string())),
            None => (rest.strip_suffix(" words")?, None),
        };
        let (_, length) = before_words.rsplit_once(", in ")?;
        Some(PromptFields {
            copies: copies.trim().parse().ok()?,
            task: task.to_string(),
            topic: topic.to_string(),
            emotion: emotion.trim().to_string(),
            length_words: length.trim().parse().ok()?,
            emoticon,
            language,
        })
    } else if let Some(rest) = line.strip_prefix("List ") {
        let (copies, rest) =
            rest.split_once(" compelling Google Ads responsive meta descriptions about ")?;
        let (head, tail) = rest.rsplit_once(", showing ")?;
        let (task, topic) = head.rsplit_once(" for ")?;
        let (emotion, rest) = tail.split_once(" and ")?;
        let (_, length) = rest.rsplit_once(", in ")?;
        Some(PromptFields {
            copies: copies.trim().parse().ok()?,
            task: task.to_string(),
            topic: topic.to_string(),
            emotion: emotion.trim().to_string(),
            length_words: length.strip_suffix(" words")?.trim().parse().ok()?,
            emoticon: false,
            language: None,
        })
    } else {
        None
    }
}

fn language_tag(language: &str) -> String {
    let code = match language.to_lowercase().as_str() {
        "german" | "deutsch" => "de",
        "french" => "fr",
        "greek" => "el",
        "spanish" => "es",
        "italian" => "it",
        "russian" => "ru",
        "english" => "en",
        other => return format!("[{other}]"),
    };
    format!("[{code}]")
}

fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |hash, b| {
        (hash ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

const OPENERS: &[&str] = &[
    "Enjoy",
    "Discover",
    "Say yes to",
    "Unwind with",
    "Book",
    "Treat yourselves to",
];

const GENERIC_PHRASES: &[&str] = &["special offer", "just for you", "book today"];

fn capitalize(text: &str) -> String {
    let mut chars = text.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Deterministic completion for `prompt`: one numbered line per requested
/// copy, each opening with a cue phrase for the requested emotion, kept
/// within the requested word count, prefixed with a language tag for
/// non-English requests and closed with an emoticon when asked for.
pub fn mock_generate(prompt: &str, seed: u64) -> String {
    let fields = parse_prompt(prompt).unwrap_or_default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(prompt));

    let phrases = phrases_for(&fields.emotion).unwrap_or(GENERIC_PHRASES);
    let emoticons = emoticons_for(&fields.emotion);
    let first_phrase = rng.gen_range(0..phrases.len());
    let tag = fields
        .language
        .as_deref()
        .filter(|l| !l.eq_ignore_ascii_case("english"))
        .map(language_tag);

    let mut lines = Vec::with_capacity(fields.copies);
    for variant in 0..fields.copies {
        let phrase = phrases[(first_phrase + variant) % phrases.len()];
        let opener = OPENERS.choose(&mut rng).expect("openers are non-empty");

        let mut words: Vec<String> = Vec::new();
        if let Some(tag) = &tag {
            words.push(tag.clone());
        }
        let phrase_words: Vec<&str> = phrase.split_whitespace().collect();
        let last = phrase_words.len() - 1;
        for (i, w) in phrase_words.iter().enumerate() {
            let w = if i == 0 { capitalize(w) } else { w.to_string() };
            words.push(if i == last { format!("{w}!") } else { w });
        }
        let body = format!("{opener} {} for {}", fields.task, fields.topic);
        for word in body.split_whitespace() {
            if words.len() >= fields.length_words.max(1) {
                break;
            }
            words.push(word.to_string());
        }
        let mut line = words.join(" ");
        if fields.emoticon {
            line.push(' ');
            line.push_str(emoticons.choose(&mut rng).expect("emoticons are non-empty"));
        }
        lines.push(format!("{}. {line}", variant + 1));
    }
    lines.join("\n")
}
