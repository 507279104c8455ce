use std::collections::HashMap;
use std::fmt::Write as _;

use super::{CorpusError, Tag, TaggedCorpus};

/// Word → tag frequency table built from a gold corpus.
///
/// Per-word tag lists are ordered by descending count, then ascending label,
/// so `most_frequent` is deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: HashMap<String, Vec<(Tag, u64)>>,
    total_counts: HashMap<String, u64>,
    tag_totals: Vec<(Tag, u64)>,
}

impl Lexicon {
    fn from_counts(counts: HashMap<String, HashMap<Tag, u64>>) -> Lexicon {
        let mut entries = HashMap::with_capacity(counts.len());
        let mut total_counts = HashMap::with_capacity(counts.len());
        let mut tag_totals: HashMap<Tag, u64> = HashMap::new();
        for (word, tags) in counts {
            let mut list: Vec<(Tag, u64)> = tags.into_iter().collect();
            sort_by_frequency(&mut list);
            let total = list.iter().map(|(_, c)| c).sum();
            for (tag, c) in &list {
                *tag_totals.entry(tag.clone()).or_default() += c;
            }
            total_counts.insert(word.clone(), total);
            entries.insert(word, list);
        }
        let mut tag_totals: Vec<(Tag, u64)> = tag_totals.into_iter().collect();
        sort_by_frequency(&mut tag_totals);
        Lexicon {
            entries,
            total_counts,
            tag_totals,
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn most_frequent(&self, word: &str) -> Option<&Tag> {
        self.entries.get(word).and_then(|l| l.first()).map(|(t, _)| t)
    }

    /// Tags observed for `word`, most frequent first.
    pub fn tags_of(&self, word: &str) -> Option<&[(Tag, u64)]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    pub fn count(&self, word: &str) -> u64 {
        self.total_counts.get(word).copied().unwrap_or(0)
    }

    pub fn word_count(&self) -> usize {
        self.entries.len()
    }

    /// Tag frequencies over the whole corpus, most frequent first.
    pub fn tag_totals(&self) -> &[(Tag, u64)] {
        &self.tag_totals
    }

    /// The most frequent tag in the corpus.
    pub fn most_frequent_tag(&self) -> Option<&Tag> {
        self.tag_totals.first().map(|(t, _)| t)
    }

    pub fn has_tag(&self, label: &str) -> bool {
        self.tag_totals.iter().any(|(t, _)| t.as_str() == label)
    }

    /// Words in ascending order.
    pub fn words(&self) -> Vec<&str> {
        let mut words: Vec<&str> = self.entries.keys().map(String::as_str).collect();
        words.sort_unstable();
        words
    }

    /// `word TAB tag TAB count` lines, words ascending, tags in frequency order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for word in self.words() {
            for (tag, count) in &self.entries[word] {
                let _ = writeln!(out, "{word}\t{tag}\t{count}");
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Lexicon, CorpusError> {
        let mut counts: HashMap<String, HashMap<Tag, u64>> = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let err = |reason: &str| CorpusError::LexiconFormat {
                line: idx + 1,
                reason: reason.to_string(),
            };
            let mut fields = line.split('\t');
            let (Some(word), Some(tag), Some(count), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(err("expected `word<TAB>tag<TAB>count`"));
            };
            if word.is_empty() {
                return Err(err("empty word"));
            }
            let tag = Tag::new(tag).ok_or_else(|| err("invalid tag"))?;
            let count: u64 = count.parse().map_err(|_| err("count is not a number"))?;
            if count == 0 {
                return Err(err("count must be positive"));
            }
            *counts
                .entry(word.to_string())
                .or_default()
                .entry(tag)
                .or_default() += count;
        }
        if counts.is_empty() {
            return Err(CorpusError::Empty);
        }
        Ok(Lexicon::from_counts(counts))
    }
}

fn sort_by_frequency(list: &mut [(Tag, u64)]) {
    list.sort_by(|(ta, ca), (tb, cb)| cb.cmp(ca).then_with(|| ta.cmp(tb)));
}

/// Count every (word, tag) pair of a tagged corpus. Untagged tokens are ignored.
pub fn build_lexicon(corpus: &TaggedCorpus) -> Result<Lexicon, CorpusError> {
    let mut counts: HashMap<String, HashMap<Tag, u64>> = HashMap::new();
    for token in corpus.tokens() {
        if let Some(tag) = &token.tag {
            *counts
                .entry(token.word.clone())
                .or_default()
                .entry(tag.clone())
                .or_default() += 1;
        }
    }
    if counts.is_empty() {
        return Err(CorpusError::Empty);
    }
    Ok(Lexicon::from_counts(counts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UnknownCount {
    pub total: usize,
    pub unknown: usize,
}

impl UnknownCount {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.unknown as f64 / self.total as f64
        }
    }
}

/// Tokens of `test` whose word never occurs in the training lexicon.
pub fn count_unknown(test: &TaggedCorpus, train_lexicon: &Lexicon) -> UnknownCount {
    let mut c = UnknownCount::default();
    for token in test.tokens() {
        c.total += 1;
        if !train_lexicon.contains(&token.word) {
            c.unknown += 1;
        }
    }
    c
}
