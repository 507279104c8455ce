//! Vietnamese part-of-speech tagging.
//!
//! Corpus tooling, a feature engine, a linear tagger, a ripple-down-rules
//! tagger and the evaluation protocol that compares them.

pub mod corpus;
pub mod eval;
pub mod features;
pub mod linear;
pub mod scrdr;
pub mod shape;
pub mod synth;

pub use corpus::{Sentence, Tag, TagSet, TaggedCorpus, Token};

/// Anything that assigns one tag per word.
pub trait Tagger: Send + Sync {
    fn tag<'s>(&'s self, words: &[&str]) -> Vec<&'s Tag>;

    fn name(&self) -> String;

    fn tag_sentence(&self, sentence: &Sentence) -> Sentence {
        let tags: Vec<Tag> = self.tag(&sentence.words()).into_iter().cloned().collect();
        sentence.with_tags(&tags)
    }
}
