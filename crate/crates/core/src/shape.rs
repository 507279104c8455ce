//! Character and word-shape predicates shared by the cleaner, the feature
//! templates and the initial tagger.

use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_segmentation::UnicodeSegmentation;

/// Separator joining the syllables of a multi-syllable word.
pub const SYLLABLE_JOINER: char = '_';

/// Unicode punctuation (any `P*` category) plus the ellipsis and en dash.
///
/// The underscore is excluded: it is the syllable joiner, not a mark.
pub fn is_punctuation(c: char) -> bool {
    if c == SYLLABLE_JOINER {
        return false;
    }
    if c == '…' || c == '–' {
        return true;
    }
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

/// True when the word is made only of punctuation marks.
pub fn is_all_punctuation(word: &str) -> bool {
    !word.is_empty() && word.chars().all(is_punctuation)
}

/// True when the word is exactly one punctuation mark.
pub fn is_single_punctuation(word: &str) -> bool {
    let mut chars = word.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if is_punctuation(c))
}

pub fn contains_punctuation(word: &str) -> bool {
    word.chars().any(is_punctuation)
}

/// A numeral: ASCII digits, optionally grouped by single `,` or `.`
/// separators, starting and ending with a digit ("21", "1.000", "3,5").
pub fn is_number(word: &str) -> bool {
    let bytes = word.as_bytes();
    let (Some(first), Some(last)) = (bytes.first(), bytes.last()) else {
        return false;
    };
    if !first.is_ascii_digit() || !last.is_ascii_digit() {
        return false;
    }
    let mut prev_sep = false;
    for &b in bytes {
        match b {
            b'0'..=b'9' => prev_sep = false,
            b',' | b'.' if !prev_sep => prev_sep = true,
            _ => return false,
        }
    }
    true
}

pub fn contains_digit(word: &str) -> bool {
    word.chars().any(|c| c.is_numeric())
}

pub fn has_initial_uppercase(word: &str) -> bool {
    word.chars().next().is_some_and(char::is_uppercase)
}

pub fn contains_uppercase(word: &str) -> bool {
    word.chars().any(char::is_uppercase)
}

/// Every cased letter is uppercase and there is at least one letter.
pub fn is_all_uppercase(word: &str) -> bool {
    let mut letters = 0;
    for c in word.chars().filter(|c| c.is_alphabetic()) {
        if c.is_lowercase() {
            return false;
        }
        letters += 1;
    }
    letters > 0
}

pub fn contains_hyphen(word: &str) -> bool {
    word.contains('-')
}

pub fn contains_comma(word: &str) -> bool {
    word.contains(',')
}

/// Syllables of a treebank word. Empty pieces from stray joiners are dropped,
/// so the result is never empty for a non-empty word made of more than joiners.
pub fn syllables(word: &str) -> impl Iterator<Item = &str> {
    word.split(SYLLABLE_JOINER).filter(|s| !s.is_empty())
}

pub fn first_syllable(word: &str) -> &str {
    syllables(word).next().unwrap_or(word)
}

pub fn last_syllable(word: &str) -> &str {
    syllables(word).last().unwrap_or(word)
}

pub fn syllable_count(word: &str) -> usize {
    syllables(word).count().max(1)
}

/// All syllables are identical, e.g. "xanh_xanh".
pub fn is_full_repetition(word: &str) -> bool {
    let mut sylls = syllables(word);
    let Some(first) = sylls.next() else {
        return false;
    };
    let mut count = 1;
    for s in sylls {
        if s != first {
            return false;
        }
        count += 1;
    }
    count >= 2
}

/// Partial reduplication: at least two syllables, not a full repetition, and
/// every adjacent pair of syllables shares its first grapheme cluster or its
/// last grapheme cluster ("đẹp_đẽ", "lênh_đênh").
///
/// Comparison is case-insensitive on the grapheme text.
pub fn is_partial_repetition(word: &str) -> bool {
    let sylls: Vec<&str> = syllables(word).collect();
    if sylls.len() < 2 || is_full_repetition(word) {
        return false;
    }
    sylls.windows(2).all(|pair| {
        let (a, b) = (pair[0], pair[1]);
        let first = |s: &str| s.graphemes(true).next().map(str::to_lowercase);
        let last = |s: &str| s.graphemes(true).next_back().map(str::to_lowercase);
        first(a) == first(b) || last(a) == last(b)
    })
}

/// The `k`-character suffix of `word`, only when the word is strictly longer
/// than `k` characters.
pub fn char_suffix(word: &str, k: usize) -> Option<&str> {
    if k == 0 {
        return None;
    }
    let mut start = None;
    for (seen, (idx, _)) in word.char_indices().rev().enumerate() {
        if seen + 1 == k {
            start = Some(idx);
        } else if seen + 1 > k {
            return start.map(|s| &word[s..]);
        }
    }
    None
}
