use super::{
    build_prompt, count_words, has_emoticon, AdCopy, AdCopySpec, LlmBackend, PromptError,
};

/// Line appended to the prompt when the first completion cannot be split
/// into the requested number of variants.
pub const FORMAT_REMINDER: &str = "Answer with exactly {n} numbered lines, one ad copy per line, like \"1. ...\".";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationOptions {
    pub temperature: f64,
    pub seed: Option<u64>,
}

impl Default for GenerationOptions {
    fn default() -> Self {
        Self {
            temperature: 0.8,
            seed: None,
        }
    }
}

/// Strips a leading `N.` or `N)` enumeration marker.
fn strip_enumeration(line: &str) -> Option<&str> {
    let digits = line.bytes().take_while(u8::is_ascii_digit).count();
    if digits == 0 {
        return None;
    }
    let rest = &line[digits..];
    rest.strip_prefix('.')
        .or_else(|| rest.strip_prefix(')'))
        .map(str::trim)
}

/// Splits a completion into exactly `copies` variants.
///
/// If any line is enumerated (`1.` or `1)`), only enumerated lines count;
/// otherwise every non-empty line is a variant. Any other count is a failure,
/// never a silent truncation.
pub fn parse_variants(raw: &str, copies: usize) -> Option<Vec<String>> {
    let lines: Vec<&str> = raw
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    let enumerated: Vec<&str> = lines
        .iter()
        .filter_map(|l| strip_enumeration(l))
        .filter(|l| !l.is_empty())
        .collect();
    let variants: Vec<String> = if enumerated.is_empty() {
        lines.iter().map(|l| l.to_string()).collect()
    } else {
        enumerated.iter().map(|l| l.to_string()).collect()
    };
    (variants.len() == copies).then_some(variants)
}

/// Asks `backend` for `spec.copies` variants, retrying once with a format
/// reminder if the first answer does not parse.
pub fn generate_copies(
    spec: &AdCopySpec,
    backend: &dyn LlmBackend,
    options: GenerationOptions,
) -> Result<Vec<AdCopy>, PromptError> {
    spec.validate()?;
    let copies = spec.copies as usize;
    let prompt = build_prompt(spec);

    let raw = backend.generate(&prompt, options.temperature, options.seed)?;
    let variants = match parse_variants(&raw, copies) {
        Some(v) => v,
        None => {
            let retry = format!(
                "{prompt}\n{}",
                FORMAT_REMINDER.replace("{n}", &copies.to_string())
            );
            let raw = backend.generate(&retry, options.temperature, options.seed)?;
            parse_variants(&raw, copies).ok_or(PromptError::ParseFailure { raw })?
        }
    };

    Ok(variants
        .into_iter()
        .enumerate()
        .map(|(i, text)| AdCopy {
            index: i as u32 + 1,
            word_count: count_words(&text),
            has_emoticon: has_emoticon(&text),
            text,
        })
        .collect())
}
