//! Tagged corpora in the treebank slash format.
//!
//! One sentence per line, tokens separated by spaces, each token written as
//! `word/TAG`. Syllables of a multi-syllable word are joined by `_`
//! (`học_sinh/N`). A token is split at its *last* slash, so words that
//! contain slashes (`km/h/Nu`) survive.

mod clean;
mod folds;
mod lexicon;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use thiserror::Error;

pub use clean::{clean_corpus, CleanReport, Cleaner, FlaggedToken, RepairRule};
pub use folds::{split_kfold, split_kfold_with, FoldMode, FoldPlan};
pub use lexicon::{build_lexicon, count_unknown, Lexicon, UnknownCount};

use crate::shape;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("line {line}, column {column}: token `{token}` has no `/` separating word and tag")]
    MissingSeparator {
        line: usize,
        column: usize,
        token: String,
    },
    #[error("line {line}, column {column}: empty word in token `{token}`")]
    EmptyWord {
        line: usize,
        column: usize,
        token: String,
    },
    #[error("line {line}, column {column}: invalid tag in token `{token}`")]
    InvalidTag {
        line: usize,
        column: usize,
        token: String,
    },
    #[error("line {line}, column {column}: tag `{tag}` is not in the tagset")]
    UnknownTag {
        line: usize,
        column: usize,
        tag: String,
    },
    #[error("corpus is empty")]
    Empty,
    #[error("cannot split {sentences} sentences into {k} folds")]
    TooFewSentences { sentences: usize, k: usize },
    #[error("fold count must be at least 2, got {0}")]
    InvalidFoldCount(usize),
    #[error("fold {fold} out of range for a {k}-fold plan")]
    FoldOutOfRange { fold: usize, k: usize },
    #[error("lexicon line {line}: {reason}")]
    LexiconFormat { line: usize, reason: String },
}

/// A part-of-speech label: non-empty, no whitespace, no `/`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag(String);

impl Tag {
    pub fn new(label: impl Into<String>) -> Option<Tag> {
        let label = label.into();
        if label.is_empty() || label.contains('/') || label.chars().any(char::is_whitespace) {
            None
        } else {
            Some(Tag(label))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Tag {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// The 18 base categories of the Vietnamese Treebank tagset.
pub const BASE_TAGS: [&str; 18] = [
    "Np", "Nc", "Nu", "N", "V", "A", "P", "R", "L", "M", "E", "C", "Cc", "I", "T", "Y", "Z", "X",
];

/// Compound tags admitted by the built-in tagset.
pub const COMPOUND_TAGS: [&str; 3] = ["Ny", "Nb", "Vb"];

/// A set of admissible tags.
///
/// Tags made only of punctuation (`,`, `.`, `...`) are always members: the
/// treebank tags punctuation tokens with the mark itself. An open tagset
/// additionally admits any other well-formed tag, warning once per label.
#[derive(Debug)]
pub struct TagSet {
    tags: BTreeSet<Tag>,
    open: bool,
    warned: Mutex<BTreeSet<String>>,
}

impl Clone for TagSet {
    fn clone(&self) -> Self {
        TagSet {
            tags: self.tags.clone(),
            open: self.open,
            warned: Mutex::new(BTreeSet::new()),
        }
    }
}

impl Default for TagSet {
    fn default() -> Self {
        TagSet::builtin(true)
    }
}

static QUIET: AtomicBool = AtomicBool::new(false);

impl TagSet {
    /// Base tags plus `Ny`, `Nb`, `Vb`, and the `CH` punctuation tag.
    pub fn builtin(open: bool) -> TagSet {
        let tags = BASE_TAGS
            .iter()
            .chain(COMPOUND_TAGS.iter())
            .chain(std::iter::once(&"CH"))
            .map(|t| Tag(t.to_string()))
            .collect();
        TagSet {
            tags,
            open,
            warned: Mutex::new(BTreeSet::new()),
        }
    }

    /// A closed tagset with exactly the given labels (plus punctuation tags).
    pub fn closed<I, S>(labels: I) -> Option<TagSet>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tags = labels
            .into_iter()
            .map(|l| Tag::new(l))
            .collect::<Option<BTreeSet<_>>>()?;
        Some(TagSet {
            tags,
            open: false,
            warned: Mutex::new(BTreeSet::new()),
        })
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    pub fn tags(&self) -> impl Iterator<Item = &Tag> {
        self.tags.iter()
    }

    /// Listed explicitly, or a punctuation tag.
    pub fn is_known(&self, label: &str) -> bool {
        self.tags.iter().any(|t| t.as_str() == label) || shape::is_all_punctuation(label)
    }

    /// Known, or well-formed and the set is open.
    pub fn admits(&self, label: &str) -> bool {
        if self.is_known(label) {
            return true;
        }
        if self.open && Tag::new(label).is_some() {
            self.warn_unseen(label);
            return true;
        }
        false
    }

    fn warn_unseen(&self, label: &str) {
        let mut warned = self.warned.lock().unwrap_or_else(|e| e.into_inner());
        if warned.insert(label.to_string()) && !QUIET.load(Ordering::Relaxed) {
            log::warn!("tag `{label}` is not in the tagset; admitted because the tagset is open");
        }
    }
}

/// Suppress warnings about unseen tags (used by `--quiet`).
pub fn set_quiet(quiet: bool) {
    QUIET.store(quiet, Ordering::Relaxed);
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub word: String,
    pub tag: Option<Tag>,
}

impl Token {
    pub fn tagged(word: impl Into<String>, tag: Tag) -> Token {
        Token {
            word: word.into(),
            tag: Some(tag),
        }
    }

    pub fn raw(word: impl Into<String>) -> Token {
        Token {
            word: word.into(),
            tag: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Sentence {
        Sentence { tokens }
    }

    /// Build a tagged sentence from `(word, tag)` pairs. Panics on a malformed tag.
    pub fn from_pairs<W: AsRef<str>, T: AsRef<str>>(pairs: &[(W, T)]) -> Sentence {
        Sentence {
            tokens: pairs
                .iter()
                .map(|(w, t)| {
                    let tag = Tag::new(t.as_ref()).expect("well-formed tag");
                    Token::tagged(w.as_ref(), tag)
                })
                .collect(),
        }
    }

    /// Build an untagged sentence.
    pub fn from_words<W: AsRef<str>>(words: &[W]) -> Sentence {
        Sentence {
            tokens: words.iter().map(|w| Token::raw(w.as_ref())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn words(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.word.as_str()).collect()
    }

    /// Tag labels; untagged tokens yield `None`.
    pub fn tags(&self) -> Vec<Option<&str>> {
        self.tokens
            .iter()
            .map(|t| t.tag.as_ref().map(Tag::as_str))
            .collect()
    }

    /// Copy of this sentence carrying the given tags.
    pub fn with_tags(&self, tags: &[Tag]) -> Sentence {
        debug_assert_eq!(tags.len(), self.tokens.len());
        Sentence {
            tokens: self
                .tokens
                .iter()
                .zip(tags)
                .map(|(t, tag)| Token::tagged(t.word.clone(), tag.clone()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaggedCorpus {
    pub sentences: Vec<Sentence>,
    pub source_id: String,
}

impl TaggedCorpus {
    pub fn new(sentences: Vec<Sentence>, source_id: impl Into<String>) -> TaggedCorpus {
        TaggedCorpus {
            sentences,
            source_id: source_id.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    /// Sub-corpus made of the sentences at `indices`, in that order.
    pub fn select(&self, indices: &[usize], source_id: impl Into<String>) -> TaggedCorpus {
        TaggedCorpus {
            sentences: indices.iter().map(|&i| self.sentences[i].clone()).collect(),
            source_id: source_id.into(),
        }
    }
}

/// Parse slash-format text. Blank lines are skipped with a warning.
pub fn parse_slash_format(text: &str, tagset: &TagSet) -> Result<TaggedCorpus, CorpusError> {
    let mut sentences = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            if !QUIET.load(Ordering::Relaxed) {
                log::warn!("line {line_no}: blank line skipped");
            }
            continue;
        }
        let mut tokens = Vec::new();
        for (column, raw) in token_columns(line) {
            tokens.push(parse_token(raw, line_no, column, tagset)?);
        }
        sentences.push(Sentence { tokens });
    }
    Ok(TaggedCorpus {
        sentences,
        source_id: String::new(),
    })
}

/// Parse whitespace-separated untagged text, one sentence per line. Blank
/// lines are skipped with a warning.
pub fn parse_raw(text: &str) -> Vec<Sentence> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !QUIET.load(Ordering::Relaxed) {
                log::warn!("line {}: blank line skipped", idx + 1);
            }
            continue;
        }
        out.push(Sentence {
            tokens: line.split_whitespace().map(Token::raw).collect(),
        });
    }
    out
}

// Whitespace-separated tokens with their 1-based character columns.
fn token_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut start: Option<(usize, usize)> = None;
    let mut out = Vec::new();
    let mut char_col = 0;
    for (byte, c) in line.char_indices() {
        char_col += 1;
        if c.is_whitespace() {
            if let Some((b, col)) = start.take() {
                out.push((col, &line[b..byte]));
            }
        } else if start.is_none() {
            start = Some((byte, char_col));
        }
    }
    if let Some((b, col)) = start {
        out.push((col, &line[b..]));
    }
    out.into_iter()
}

fn parse_token(raw: &str, line: usize, column: usize, tagset: &TagSet) -> Result<Token, CorpusError> {
    let Some(sep) = raw.rfind('/') else {
        return Err(CorpusError::MissingSeparator {
            line,
            column,
            token: raw.to_string(),
        });
    };
    let (word, tag) = (&raw[..sep], &raw[sep + 1..]);
    if word.is_empty() {
        return Err(CorpusError::EmptyWord {
            line,
            column,
            token: raw.to_string(),
        });
    }
    let Some(tag) = Tag::new(tag) else {
        return Err(CorpusError::InvalidTag {
            line,
            column,
            token: raw.to_string(),
        });
    };
    if !tagset.admits(tag.as_str()) {
        return Err(CorpusError::UnknownTag {
            line,
            column,
            tag: tag.0,
        });
    }
    Ok(Token::tagged(word, tag))
}

/// Serialize to slash format. Every token must be tagged; untagged tokens are
/// written as bare words.
pub fn write_slash_format(corpus: &TaggedCorpus) -> String {
    let mut out = String::new();
    for sentence in &corpus.sentences {
        write_sentence(&mut out, sentence);
        out.push('\n');
    }
    out
}

pub fn write_sentence(out: &mut String, sentence: &Sentence) {
    for (i, token) in sentence.tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&token.word);
        if let Some(tag) = &token.tag {
            out.push('/');
            out.push_str(tag.as_str());
        }
    }
}
