use serde::{Deserialize, Serialize};

use super::{count_words, has_emoticon, AdCopy, AdCopySpec};

/// Copies may run this much longer than requested.
pub const DEFAULT_WORD_TOLERANCE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationReport {
    pub word_count_ok: bool,
    pub emoticon_ok: bool,
    pub variant_count_ok: bool,
    pub measured_words: u32,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.word_count_ok && self.emoticon_ok && self.variant_count_ok
    }
}

/// Checks one copy against the request. Word counts are measured from the
/// text, not taken from `copy.word_count`.
pub fn validate_copy(copy: &AdCopy, spec: &AdCopySpec, tolerance: f64) -> ValidationReport {
    let measured_words = count_words(&copy.text);
    let limit = (f64::from(spec.length_words) * (1.0 + tolerance)).ceil() as u32;
    let word_count_ok = measured_words <= limit;
    let emoticon_ok = has_emoticon(&copy.text) == spec.include_emoticon;
    let variant_count_ok = (1..=spec.copies).contains(&copy.index);

    let mut violations = Vec::new();
    if !word_count_ok {
        violations.push(format!("{measured_words} words exceeds limit of {limit}"));
    }
    if !emoticon_ok {
        violations.push(if spec.include_emoticon {
            "emoticon required but missing".to_string()
        } else {
            "emoticon present but not requested".to_string()
        });
    }
    if !variant_count_ok {
        violations.push(format!(
            "variant {} outside 1..={}",
            copy.index, spec.copies
        ));
    }
    ValidationReport {
        word_count_ok,
        emoticon_ok,
        variant_count_ok,
        measured_words,
        violations,
    }
}
