//! Seeded synthetic corpora for tests, benchmarks and the speed protocol.

use std::collections::{BTreeMap, HashMap};

use rand::seq::IndexedRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{build_lexicon, Sentence, TaggedCorpus};
use crate::features::ClusterMap;

const PRONOUNS: &[&str] = &["tôi", "anh", "chị", "họ", "chúng_tôi", "em", "nó", "bà"];
const VERBS: &[&str] = &["đọc", "viết", "mua", "bán", "xem", "làm", "ăn", "thích", "cần", "đi"];
const NOUNS: &[&str] = &[
    "sách", "báo", "nhà", "xe", "gạo", "cá", "áo", "ghế", "trường", "chợ", "bút", "điện_thoại",
];
const ADJECTIVES: &[&str] = &["mới", "cũ", "đẹp", "to", "nhỏ", "rẻ", "ngon"];
const CLASSIFIERS: &[&str] = &["cái", "con", "chiếc", "quyển"];
const PREPOSITIONS: &[&str] = &["ở", "trong", "trên", "với"];
const ADVERBS: &[&str] = &["đã", "sẽ", "đang", "cũng"];
/// Words read as N after a classifier or preposition and as V after a pronoun
/// or adverb.
const AMBIGUOUS: &[&str] = &["bàn", "cưa", "cày", "đá", "khoá", "sơn"];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pick<'a>(r: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
    pool.choose(r).expect("pools are non-empty")
}

fn clause(r: &mut ChaCha8Rng, out: &mut Vec<(String, String)>) {
    // Annotation noise: one ambiguous token in twenty carries the other tag.
    let noisy = r.random_bool(0.05);
    let mut push = |w: &str, t: &str| {
        let t = match (noisy && AMBIGUOUS.contains(&w), t) {
            (true, "N") => "V",
            (true, "V") => "N",
            _ => t,
        };
        out.push((w.to_string(), t.to_string()))
    };
    match r.random_range(0..5) {
        0 => {
            push(pick(r, PRONOUNS), "P");
            push(pick(r, VERBS), "V");
            push(pick(r, NOUNS), "N");
            push(pick(r, ADJECTIVES), "A");
        }
        1 => {
            push(pick(r, PRONOUNS), "P");
            if r.random_bool(0.5) {
                push(pick(r, ADVERBS), "R");
            }
            push(pick(r, AMBIGUOUS), "V");
            match r.random_range(0..3) {
                0 => push(pick(r, NOUNS), "N"),
                1 => push(pick(r, PRONOUNS), "P"),
                _ => {}
            }
        }
        2 => {
            push(pick(r, CLASSIFIERS), "Nc");
            push(pick(r, AMBIGUOUS), "N");
            if r.random_bool(0.5) {
                push(pick(r, NOUNS), "N");
            }
            push(pick(r, ADJECTIVES), "A");
        }
        3 => {
            push(pick(r, PRONOUNS), "P");
            push(pick(r, VERBS), "V");
            push(pick(r, PREPOSITIONS), "E");
            push(pick(r, AMBIGUOUS), "N");
        }
        _ => {
            push(pick(r, NOUNS), "N");
            push(pick(r, ADJECTIVES), "A");
            let n = r.random_range(1..1000);
            push(&n.to_string(), "M");
            push(pick(r, CLASSIFIERS), "Nc");
        }
    }
}

fn ambiguous_sentence(r: &mut ChaCha8Rng, max_clauses: usize) -> Sentence {
    let mut pairs = Vec::new();
    let clauses = r.random_range(1..=max_clauses);
    for i in 0..clauses {
        if i > 0 {
            pairs.push((",".to_string(), "CH".to_string()));
        }
        clause(r, &mut pairs);
    }
    pairs.push((".".to_string(), "CH".to_string()));
    Sentence::from_pairs(&pairs)
}

/// Clause-grammar corpus in which a set of words is N or V depending on the
/// context, so a most-frequent-tag baseline makes systematic errors. Some
/// of those tokens carry the wrong tag on purpose.
pub fn ambiguous_corpus(sentences: usize, seed: u64) -> TaggedCorpus {
    let mut r = rng(seed);
    let s = (0..sentences).map(|_| ambiguous_sentence(&mut r, 3)).collect();
    TaggedCorpus::new(s, format!("synthetic-ambiguous-{seed}"))
}

/// Tag-selecting last syllables.
const SUFFIX_CLASSES: &[(&str, &[&str])] = &[
    ("N", &["nhà", "viên", "sinh", "trường", "phẩm"]),
    ("V", &["làm", "hoá", "chạy", "nghĩ", "viết"]),
    ("A", &["đẹp", "lành", "mạnh", "tươi", "nhanh"]),
    ("R", &["đã", "vẫn", "luôn", "mãi", "hẳn"]),
];

const ONSETS: &[&str] = &["b", "c", "d", "đ", "g", "h", "kh", "l", "m", "n", "ng", "nh", "ph", "s", "t", "th", "tr", "v", "x"];
const RHYMES: &[&str] = &["a", "ai", "an", "ang", "ao", "e", "em", "i", "inh", "o", "ong", "u", "ung", "ư", "ương", "iêu", "ơi", "ôn"];

fn suffix_word(r: &mut ChaCha8Rng, first: String) -> (String, String) {
    let (tag, lasts) = SUFFIX_CLASSES[r.random_range(0..SUFFIX_CLASSES.len())];
    (format!("{first}_{}", pick(r, lasts)), tag.to_string())
}

/// Corpus where each word's last syllable alone determines its tag and
/// neighbouring tags are independent. About `oov_rate` of the tokens are
/// words that occur exactly once, so they are unknown wherever they land.
pub fn suffix_corpus(sentences: usize, oov_rate: f64, seed: u64) -> TaggedCorpus {
    let mut r = rng(seed);
    let mut vocab = Vec::new();
    for _ in 0..60 {
        let first = format!("{}{}", pick(&mut r, ONSETS), pick(&mut r, RHYMES));
        vocab.push(suffix_word(&mut r, first));
    }
    let mut fresh = 0usize;
    let mut out = Vec::with_capacity(sentences);
    for _ in 0..sentences {
        let len = r.random_range(6..=12);
        let mut pairs = Vec::with_capacity(len);
        for _ in 0..len {
            if r.random_bool(oov_rate) {
                // A counter-derived first syllable keeps every fresh word unique.
                fresh += 1;
                let first = format!("{}{}{}", ONSETS[fresh % ONSETS.len()], RHYMES[(fresh / ONSETS.len()) % RHYMES.len()], fresh);
                pairs.push(suffix_word(&mut r, first));
            } else {
                pairs.push(vocab.choose(&mut r).unwrap().clone());
            }
        }
        out.push(Sentence::from_pairs(&pairs));
    }
    TaggedCorpus::new(out, format!("synthetic-suffix-{seed}"))
}

/// Corpus of words that carry a single tag each.
pub fn unambiguous_corpus(sentences: usize, seed: u64) -> TaggedCorpus {
    let mut r = rng(seed);
    let pools: [(&str, &[&str]); 4] = [("P", PRONOUNS), ("V", VERBS), ("N", NOUNS), ("A", ADJECTIVES)];
    let out = (0..sentences)
        .map(|_| {
            let len = r.random_range(3..=9);
            let pairs: Vec<(&str, &str)> = (0..len)
                .map(|_| {
                    let (tag, pool) = pools[r.random_range(0..pools.len())];
                    (pick(&mut r, pool), tag)
                })
                .collect();
            Sentence::from_pairs(&pairs)
        })
        .collect();
    TaggedCorpus::new(out, format!("synthetic-unambiguous-{seed}"))
}

/// The classic "bàn" ambiguity: 30 sentences, a third with the verb reading.
/// Right contexts are identical, so only the left context separates them.
pub fn ban_corpus() -> TaggedCorpus {
    let mut s = Vec::with_capacity(30);
    for i in 0..30 {
        let pairs: &[(&str, &str)] = if i % 3 == 0 {
            &[("họ", "P"), ("ngồi", "V"), ("quanh", "E"), ("bàn", "V"), ("gỗ", "N"), (".", ".")]
        } else {
            &[("cái", "Nc"), ("bàn", "N"), ("gỗ", "N"), (".", ".")]
        };
        s.push(Sentence::from_pairs(pairs));
    }
    TaggedCorpus::new(s, "synthetic-ban")
}

/// Untagged sentences of about 25 words each, `words` words in total, drawn
/// from the ambiguous grammar. 250k words matches the usual speed test.
pub fn raw_corpus(words: usize, seed: u64) -> Vec<Vec<String>> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    let mut total = 0;
    while total < words {
        let s = ambiguous_sentence(&mut r, 9);
        let mut w: Vec<String> = s.tokens.into_iter().map(|t| t.word).collect();
        w.truncate(words - total);
        total += w.len();
        out.push(w);
    }
    out
}

/// Bit-string clusters for every word of `corpus`: the first four bits encode
/// the word's majority tag, the rest are random.
pub fn clusters_for(corpus: &TaggedCorpus, seed: u64) -> ClusterMap {
    let mut r = rng(seed);
    let lexicon = build_lexicon(corpus).expect("corpus is tagged");
    let tag_codes: BTreeMap<&str, usize> = lexicon
        .tag_totals()
        .iter()
        .enumerate()
        .map(|(i, (t, _))| (t.as_str(), i % 16))
        .collect();
    let mut assignments = HashMap::new();
    for word in lexicon.words() {
        let code = tag_codes[lexicon.most_frequent(word).unwrap().as_str()];
        let mut bits = format!("{code:04b}");
        for _ in 0..8 {
            bits.push(if r.random_bool(0.5) { '1' } else { '0' });
        }
        assignments.insert(word.to_string(), bits);
    }
    ClusterMap::new(assignments)
}
