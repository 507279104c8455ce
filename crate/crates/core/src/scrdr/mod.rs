//! Ripple-down-rules tagger.
//!
//! A lexicon-based initial tagger assigns every word its most frequent
//! training tag (or a heuristic tag when the word is unknown); an exception
//! tree learned from the initial tagger's mistakes then corrects it. Rules
//! read the initial tags only, never partially corrected ones.

mod learn;
mod rule;
mod tree;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

pub use learn::{
    build_object_dictionary, grow_tree, Attachment, GrowParams, GrowthLog, Object, ObjectDictionary,
};
pub use rule::{generate_candidates, Rule, RuleCondition, Slot, TEMPLATES};
pub use tree::{Edge, Node, ScrdrTree, TREE_HEADER};

use crate::corpus::{build_lexicon, CorpusError, Lexicon, Tag, TaggedCorpus};
use crate::features::Context;
use crate::shape;
use crate::Tagger;

#[derive(Debug, Error)]
pub enum ScrdrError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("training sentence {0} has an untagged token")]
    UntaggedToken(usize),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("invalid growth parameters: {0}")]
    InvalidParams(String),
    #[error("tree file is empty")]
    EmptyTree,
    #[error("tree line {line} (at {path}): {message}")]
    Parse {
        line: usize,
        path: String,
        message: String,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Unknown-word heuristics, tried in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    Number,
    InitialUppercase,
    Punctuation,
    ContainsDigit,
}

impl Heuristic {
    pub const ORDER: [Heuristic; 4] = [
        Heuristic::Number,
        Heuristic::InitialUppercase,
        Heuristic::Punctuation,
        Heuristic::ContainsDigit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Heuristic::Number => "number",
            Heuristic::InitialUppercase => "initial-uppercase",
            Heuristic::Punctuation => "punctuation",
            Heuristic::ContainsDigit => "contains-digit",
        }
    }
}

/// How the initial tagger chose a word's tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagSource {
    Lexicon,
    Heuristic(Heuristic),
    Default,
}

/// Tag given to numbers and words containing digits.
pub const NUMBER_TAG: &str = "M";
/// Tag given to unknown capitalised words.
pub const PROPER_NOUN_TAG: &str = "Np";
/// Catch-all punctuation tag used when a mark never appeared as its own tag.
pub const PUNCTUATION_TAG: &str = "CH";

#[derive(Debug, Clone)]
pub struct InitialTagger {
    lexicon: Arc<Lexicon>,
    default_tag: Tag,
    number: Tag,
    proper: Tag,
    // Tags seen in training, by label, for punctuation lookups.
    seen: HashMap<String, Tag>,
}

impl InitialTagger {
    pub fn new(lexicon: Arc<Lexicon>) -> Result<InitialTagger, ScrdrError> {
        let default_tag = lexicon.most_frequent_tag().cloned().ok_or(ScrdrError::EmptyCorpus)?;
        let seen = lexicon
            .tag_totals()
            .iter()
            .map(|(t, _)| (t.as_str().to_string(), t.clone()))
            .collect();
        Ok(InitialTagger {
            lexicon,
            default_tag,
            number: Tag::new(NUMBER_TAG).unwrap(),
            proper: Tag::new(PROPER_NOUN_TAG).unwrap(),
            seen,
        })
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn default_tag(&self) -> &Tag {
        &self.default_tag
    }

    pub fn tag_with_source(&self, word: &str) -> (&Tag, TagSource) {
        if let Some(t) = self.lexicon.most_frequent(word) {
            return (t, TagSource::Lexicon);
        }
        for h in Heuristic::ORDER {
            let tag = match h {
                Heuristic::Number if shape::is_number(word) => Some(&self.number),
                Heuristic::InitialUppercase if shape::has_initial_uppercase(word) => Some(&self.proper),
                Heuristic::Punctuation if shape::is_single_punctuation(word) => {
                    self.seen.get(word).or_else(|| self.seen.get(PUNCTUATION_TAG))
                }
                Heuristic::ContainsDigit if shape::contains_digit(word) => Some(&self.number),
                _ => None,
            };
            if let Some(t) = tag {
                return (t, TagSource::Heuristic(h));
            }
        }
        (&self.default_tag, TagSource::Default)
    }

    pub fn tag_word(&self, word: &str) -> &Tag {
        self.tag_with_source(word).0
    }

    pub fn tag_words(&self, words: &[&str]) -> Vec<&Tag> {
        words.iter().map(|w| self.tag_word(w)).collect()
    }
}

/// Initial tagger plus exception tree.
#[derive(Debug, Clone)]
pub struct ScrdrTagger {
    pub initial: InitialTagger,
    pub tree: ScrdrTree,
}

impl ScrdrTagger {
    pub fn train(corpus: &TaggedCorpus, params: &GrowParams) -> Result<(ScrdrTagger, GrowthLog), ScrdrError> {
        if corpus.token_count() == 0 {
            return Err(ScrdrError::EmptyCorpus);
        }
        let lexicon = Arc::new(build_lexicon(corpus)?);
        let initial = InitialTagger::new(lexicon)?;
        let dict = build_object_dictionary(corpus, &initial)?;
        let (tree, log) = grow_tree(&dict, params)?;
        Ok((ScrdrTagger { initial, tree }, log))
    }

    /// Tags for a sentence: the initial tags, each passed through the tree.
    pub fn tag_words(&self, words: &[&str]) -> Vec<&Tag> {
        let initial = self.initial.tag_words(words);
        let labels: Vec<&str> = initial.iter().map(|t| t.as_str()).collect();
        (0..words.len())
            .map(|pos| {
                let ctx = Context::new(words, &labels, pos);
                self.tree.classify(&ctx).unwrap_or(initial[pos])
            })
            .collect()
    }

    pub fn tree_text(&self) -> String {
        self.tree.to_text()
    }

    pub fn lexicon_text(&self) -> String {
        self.initial.lexicon().to_text()
    }

    pub fn from_texts(tree: &str, lexicon: &str) -> Result<ScrdrTagger, ScrdrError> {
        let tree = ScrdrTree::parse(tree)?;
        let lexicon = Lexicon::from_text(lexicon)?;
        Ok(ScrdrTagger {
            initial: InitialTagger::new(Arc::new(lexicon))?,
            tree,
        })
    }

    /// Write the tree to `path` and the lexicon next to it.
    pub fn save(&self, path: &Path) -> Result<(), ScrdrError> {
        write(path, &self.tree_text())?;
        write(&lexicon_path(path), &self.lexicon_text())
    }

    pub fn load(path: &Path) -> Result<ScrdrTagger, ScrdrError> {
        ScrdrTagger::from_texts(&read(path)?, &read(&lexicon_path(path))?)
    }
}

/// The lexicon file stored beside a tree file: `<tree>.lex`.
pub fn lexicon_path(tree_path: &Path) -> PathBuf {
    let mut p = tree_path.as_os_str().to_owned();
    p.push(".lex");
    PathBuf::from(p)
}

fn io_error(path: &Path, e: std::io::Error) -> ScrdrError {
    ScrdrError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write(path: &Path, text: &str) -> Result<(), ScrdrError> {
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

fn read(path: &Path) -> Result<String, ScrdrError> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}

impl Tagger for ScrdrTagger {
    fn tag<'s>(&'s self, words: &[&str]) -> Vec<&'s Tag> {
        self.tag_words(words)
    }

    fn name(&self) -> String {
        "scrdr".to_string()
    }
}

impl Tagger for InitialTagger {
    fn tag<'s>(&'s self, words: &[&str]) -> Vec<&'s Tag> {
        self.tag_words(words)
    }

    fn name(&self) -> String {
        "initial".to_string()
    }
}
