//! Default feature sets of two earlier Vietnamese taggers, kept as baselines.
//!
//! The `jvn` set reads the possible tags of neighbouring words from a
//! dictionary; the training lexicon stands in for that dictionary. The `vn`
//! set's unknown-word shape templates are emitted for every word, since the
//! extractor has no notion of rare words.

use super::{is_sentinel, Context, FeatureKey, KeyBuffer};
use crate::corpus::Lexicon;
use crate::shape;

/// Possible-tags value for a word absent from the dictionary.
pub const NO_DICTIONARY_TAGS: &str = "NONE";

const BOUNDARY: &str = "boundary";

fn push_shape(out: &mut KeyBuffer, template: &str, word: &str, pred: fn(&str) -> bool) {
    if is_sentinel(word) {
        out.push(template, BOUNDARY);
    } else {
        out.push_bool(template, pred(word));
    }
}

fn possible_tags(lexicon: &Lexicon, word: &str, scratch: &mut Vec<String>) -> Option<String> {
    let tags = lexicon.tags_of(word)?;
    scratch.clear();
    scratch.extend(tags.iter().map(|(t, _)| t.as_str().to_string()));
    scratch.sort();
    Some(scratch.join("|"))
}

pub(super) fn jvn(ctx: &Context<'_>, lexicon: &Lexicon, out: &mut KeyBuffer) {
    const WORDS: [(&str, isize); 5] = [
        ("jvn.w-2", -2),
        ("jvn.w-1", -1),
        ("jvn.w0", 0),
        ("jvn.w+1", 1),
        ("jvn.w+2", 2),
    ];
    for (id, off) in WORDS {
        out.push(id, ctx.word(off));
    }
    let w0 = ctx.current();
    out.push_joined("jvn.w-1,w0", &[ctx.word(-1), w0]);
    out.push_joined("jvn.w0,w+1", &[w0, ctx.word(1)]);

    type Predicate = fn(&str) -> bool;
    let binary: [(&str, Predicate, &[isize]); 7] = [
        ("jvn.all-upper", shape::is_all_uppercase, &[-1, 0]),
        ("jvn.init-upper", shape::has_initial_uppercase, &[-1, 0]),
        ("jvn.number", shape::is_number, &[-1, 0, 1]),
        ("jvn.has-digit", shape::contains_digit, &[-1, 0, 1]),
        ("jvn.has-hyphen", shape::contains_hyphen, &[-1, 0]),
        ("jvn.has-comma", shape::contains_comma, &[-1, 0]),
        ("jvn.punct", shape::is_all_punctuation, &[-1, 0, 1]),
    ];
    let mut id = String::new();
    for (base, pred, offsets) in binary {
        for &off in offsets {
            id.clear();
            id.push_str(base);
            id.push_str(offset_suffix(off));
            push_shape(out, &id, ctx.word(off), pred);
        }
    }

    let mut scratch = Vec::new();
    for (tid, off) in [("jvn.tags-1", -1), ("jvn.tags0", 0), ("jvn.tags+1", 1)] {
        let word = ctx.word(off);
        let value = possible_tags(lexicon, word, &mut scratch);
        out.push(tid, value.as_deref().unwrap_or(NO_DICTIONARY_TAGS));
    }

    out.push_bool("jvn.full-rep", shape::is_full_repetition(w0));
    out.push_bool("jvn.partial-rep", shape::is_partial_repetition(w0));
    out.push("jvn.first-syl", shape::first_syllable(w0));
    out.push("jvn.last-syl", shape::last_syllable(w0));
}

fn offset_suffix(off: isize) -> &'static str {
    match off {
        -1 => "-1",
        0 => "0",
        1 => "+1",
        _ => unreachable!("binary templates span -1..=1"),
    }
}

/// The two first (or last) syllables joined; a one-syllable word yields itself.
fn two_syllables(word: &str, from_end: bool) -> String {
    let sylls: Vec<&str> = shape::syllables(word).collect();
    if sylls.len() < 2 {
        return sylls.first().copied().unwrap_or(word).to_string();
    }
    let pair = if from_end {
        &sylls[sylls.len() - 2..]
    } else {
        &sylls[..2]
    };
    pair.join("_")
}

pub(super) fn vn(ctx: &Context<'_>, out: &mut KeyBuffer) {
    out.push("vn.w-1", ctx.word(-1));
    out.push("vn.w0", ctx.current());
    out.push("vn.w+1", ctx.word(1));
    out.push("vn.t-1", ctx.tag(-1));
    out.push_joined("vn.t-2,t-1", &[ctx.tag(-2), ctx.tag(-1)]);

    let w0 = ctx.current();
    out.push_bool("vn.has-digit", shape::contains_digit(w0));
    out.push_bool("vn.has-upper", shape::contains_uppercase(w0));
    out.push_bool("vn.all-upper", shape::is_all_uppercase(w0));
    out.push_bool("vn.has-hyphen", shape::contains_hyphen(w0));
    out.push("vn.first-syl", shape::first_syllable(w0));
    out.push("vn.last-syl", shape::last_syllable(w0));
    out.push("vn.two-first", &two_syllables(w0, false));
    out.push("vn.two-last", &two_syllables(w0, true));
    out.push("vn.syllables", &shape::syllable_count(w0).to_string());
}

/// Keys of the `jvn` preset (MaxEnt context features).
pub fn extract_jvn(ctx: &Context<'_>, lexicon: &Lexicon) -> Vec<FeatureKey> {
    let mut buf = KeyBuffer::new();
    jvn(ctx, lexicon, &mut buf);
    buf.to_feature_keys()
}

/// Keys of the `vn` preset.
pub fn extract_vn(ctx: &Context<'_>) -> Vec<FeatureKey> {
    let mut buf = KeyBuffer::new();
    vn(ctx, &mut buf);
    buf.to_feature_keys()
}
