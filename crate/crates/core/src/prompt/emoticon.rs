/// Code point ranges treated as emoticons.
const EMOTICON_RANGES: &[(u32, u32)] = &[
    (0x1F000, 0x1FAFF), // mahjong .. symbols & pictographs extended-A
    (0x2600, 0x27BF),   // misc symbols, dingbats
    (0x2300, 0x23FF),   // misc technical (⏰, ⌛)
    (0x2B00, 0x2BFF),   // arrows & stars (⭐)
    (0x25A0, 0x25FF),   // geometric shapes (○, ▶)
];

/// Joiners and presentation selectors that only ever appear inside emoji.
const EMOJI_MODIFIERS: &[u32] = &[0x200D, 0xFE0E, 0xFE0F, 0x20E3];

/// Text emoticons, matched as whole whitespace-separated tokens.
const ASCII_EMOTICONS: &[&str] = &[
    ":)", ":-)", ":(", ":-(", ";)", ";-)", ":D", ":-D", ":P", ":-P", "<3", "^^", "^_^", "xD",
];

pub fn is_emoticon_char(c: char) -> bool {
    let cp = c as u32;
    EMOTICON_RANGES
        .iter()
        .any(|&(lo, hi)| (lo..=hi).contains(&cp))
}

fn is_emoji_part(c: char) -> bool {
    is_emoticon_char(c) || EMOJI_MODIFIERS.contains(&(c as u32))
}

fn is_emoticon_token(token: &str) -> bool {
    ASCII_EMOTICONS.contains(&token) || token.chars().all(is_emoji_part)
}

pub fn has_emoticon(text: &str) -> bool {
    text.chars().any(is_emoticon_char)
        || text.split_whitespace().any(|t| ASCII_EMOTICONS.contains(&t))
}

/// Whitespace-separated tokens, not counting tokens made only of emoticons.
pub fn count_words(text: &str) -> u32 {
    text.split_whitespace()
        .filter(|t| !is_emoticon_token(t))
        .count() as u32
}
