//! Repairs for the annotation errors known to occur in the treebank.

use std::fmt::Write as _;

use super::{Sentence, Tag, TagSet, TaggedCorpus, Token};
use crate::shape;

/// The six repair rules, applied in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RepairRule {
    /// `VN/Np` becomes `VN/Ny`.
    AbbreviationTag,
    /// `<number>/M tuổi/Nu` becomes `<number>/M tuổi/N`.
    AgeNounTag,
    /// Runs of underscores inside a word collapse to one.
    DoubleUnderscore,
    /// A token made only of punctuation marks is split into one token per mark.
    JoinedPunctuation,
    /// The Icelandic eth `ð` becomes the Vietnamese `đ`.
    IcelandicEth,
    /// `w/T1/T2` keeps the first valid tag.
    MultipleTags,
}

impl RepairRule {
    pub const ALL: [RepairRule; 6] = [
        RepairRule::AbbreviationTag,
        RepairRule::AgeNounTag,
        RepairRule::DoubleUnderscore,
        RepairRule::JoinedPunctuation,
        RepairRule::IcelandicEth,
        RepairRule::MultipleTags,
    ];

    pub fn id(self) -> &'static str {
        match self {
            RepairRule::AbbreviationTag => "R1",
            RepairRule::AgeNounTag => "R2",
            RepairRule::DoubleUnderscore => "R3",
            RepairRule::JoinedPunctuation => "R4",
            RepairRule::IcelandicEth => "R5",
            RepairRule::MultipleTags => "R6",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            RepairRule::AbbreviationTag => "VN/Np -> VN/Ny",
            RepairRule::AgeNounTag => "<number>/M tuổi/Nu -> <number>/M tuổi/N",
            RepairRule::DoubleUnderscore => "repeated underscore between syllables",
            RepairRule::JoinedPunctuation => "punctuation marks joined in one token",
            RepairRule::IcelandicEth => "ð -> đ",
            RepairRule::MultipleTags => "more than one tag on a word",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// A token changed in a way that deserves a manual look.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlaggedToken {
    pub rule: RepairRule,
    pub sentence: usize,
    pub token: usize,
    pub original: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CleanReport {
    counts: [usize; 6],
    pub flagged: Vec<FlaggedToken>,
}

impl CleanReport {
    pub fn count(&self, rule: RepairRule) -> usize {
        self.counts[rule.index()]
    }

    pub fn counts(&self) -> [usize; 6] {
        self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    fn bump(&mut self, rule: RepairRule) {
        self.counts[rule.index()] += 1;
    }

    /// Two-column table: rule id and number of occurrences, followed by any
    /// tokens flagged for review.
    pub fn render_table(&self) -> String {
        let mut out = String::from("rule\toccurrences\n");
        for rule in RepairRule::ALL {
            let _ = writeln!(out, "{}\t{}", rule.id(), self.count(rule));
        }
        if !self.flagged.is_empty() {
            out.push_str("\n# flagged for review (rule, sentence, token, original)\n");
            for f in &self.flagged {
                let _ = writeln!(
                    out,
                    "# {}\t{}\t{}\t{}",
                    f.rule.id(),
                    f.sentence + 1,
                    f.token + 1,
                    f.original
                );
            }
        }
        out
    }
}

/// Applies the repair rules against a tagset (used to recognise valid tags
/// for the multiple-tag repair).
#[derive(Debug, Clone, Default)]
pub struct Cleaner {
    tagset: TagSet,
}

const MAX_PASSES: usize = 8;

impl Cleaner {
    pub fn new(tagset: TagSet) -> Cleaner {
        Cleaner { tagset }
    }

    /// Apply every rule, in order, repeating whole passes until nothing
    /// changes so that the result is a fixpoint.
    pub fn clean(&self, corpus: &TaggedCorpus) -> (TaggedCorpus, CleanReport) {
        let mut report = CleanReport::default();
        let mut current = corpus.clone();
        for _ in 0..MAX_PASSES {
            let before = report.total();
            for (si, sentence) in current.sentences.iter_mut().enumerate() {
                self.clean_sentence(si, sentence, &mut report);
            }
            if report.total() == before {
                break;
            }
        }
        (current, report)
    }

    fn clean_sentence(&self, si: usize, sentence: &mut Sentence, report: &mut CleanReport) {
        let tokens = &mut sentence.tokens;

        for t in tokens.iter_mut() {
            if t.word == "VN" && tag_is(t, "Np") {
                t.tag = Tag::new("Ny");
                report.bump(RepairRule::AbbreviationTag);
            }
        }

        for i in 1..tokens.len() {
            let prev = &tokens[i - 1];
            if tag_is(prev, "M") && shape::is_number(&prev.word) {
                let cur = &mut tokens[i];
                if cur.word == "tuổi" && tag_is(cur, "Nu") {
                    cur.tag = Tag::new("N");
                    report.bump(RepairRule::AgeNounTag);
                }
            }
        }

        for t in tokens.iter_mut() {
            if t.word.contains("__") {
                t.word = collapse_underscores(&t.word);
                report.bump(RepairRule::DoubleUnderscore);
            }
        }

        if tokens
            .iter()
            .any(|t| t.word.chars().nth(1).is_some() && shape::is_all_punctuation(&t.word))
        {
            let mut split = Vec::with_capacity(tokens.len() + 2);
            for (ti, t) in tokens.drain(..).enumerate() {
                let n = t.word.chars().count();
                if n >= 2 && shape::is_all_punctuation(&t.word) {
                    report.bump(RepairRule::JoinedPunctuation);
                    if n > 2 {
                        report.flagged.push(FlaggedToken {
                            rule: RepairRule::JoinedPunctuation,
                            sentence: si,
                            token: ti,
                            original: token_text(&t),
                        });
                    }
                    for c in t.word.chars() {
                        split.push(Token {
                            word: c.to_string(),
                            tag: t.tag.clone(),
                        });
                    }
                } else {
                    split.push(t);
                }
            }
            *tokens = split;
        }

        for t in tokens.iter_mut() {
            if t.word.contains('ð') {
                t.word = t.word.replace('ð', "đ");
                report.bump(RepairRule::IcelandicEth);
            }
        }

        for (ti, t) in tokens.iter_mut().enumerate() {
            if let Some((word, tag)) = self.split_extra_tags(t) {
                let original = token_text(t);
                t.word = word;
                t.tag = Some(tag);
                report.bump(RepairRule::MultipleTags);
                report.flagged.push(FlaggedToken {
                    rule: RepairRule::MultipleTags,
                    sentence: si,
                    token: ti,
                    original,
                });
            }
        }
    }

    // For `w/T1/.../Tn` (word `w/T1/...`, tag `Tn`) where every trailing
    // segment is a known tag, return `(w, T1)`.
    fn split_extra_tags(&self, token: &Token) -> Option<(String, Tag)> {
        let tag = token.tag.as_ref()?;
        if !self.tagset.is_known(tag.as_str()) || !token.word.contains('/') {
            return None;
        }
        let segments: Vec<&str> = token.word.split('/').collect();
        let mut first_tag = segments.len();
        while first_tag > 1 && self.tagset.is_known(segments[first_tag - 1]) {
            first_tag -= 1;
        }
        if first_tag == segments.len() {
            return None;
        }
        let word = segments[..first_tag].join("/");
        if word.is_empty() {
            return None;
        }
        Some((word, Tag::new(segments[first_tag])?))
    }
}

/// Clean with the built-in open tagset.
pub fn clean_corpus(corpus: &TaggedCorpus) -> (TaggedCorpus, CleanReport) {
    Cleaner::default().clean(corpus)
}

fn tag_is(token: &Token, label: &str) -> bool {
    token.tag.as_ref().is_some_and(|t| t.as_str() == label)
}

fn token_text(t: &Token) -> String {
    match &t.tag {
        Some(tag) => format!("{}/{}", t.word, tag),
        None => t.word.clone(),
    }
}

fn collapse_underscores(word: &str) -> String {
    let mut out = String::with_capacity(word.len());
    let mut prev_joiner = false;
    for c in word.chars() {
        let joiner = c == shape::SYLLABLE_JOINER;
        if !(joiner && prev_joiner) {
            out.push(c);
        }
        prev_joiner = joiner;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_slash_format, write_slash_format};

    fn clean_text(text: &str) -> (String, CleanReport) {
        let c = parse_slash_format(text, &TagSet::default()).unwrap();
        let (cleaned, report) = clean_corpus(&c);
        (write_slash_format(&cleaned), report)
    }

    #[test]
    fn abbreviation() {
        let (out, rep) = clean_text("VN/Np thắng/V");
        assert_eq!(out, "VN/Ny thắng/V\n");
        assert_eq!(rep.counts(), [1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn age_noun() {
        let (out, rep) = clean_text("21/M tuổi/Nu");
        assert_eq!(out, "21/M tuổi/N\n");
        assert_eq!(rep.count(RepairRule::AgeNounTag), 1);
        // Not after a numeral: untouched.
        let (out, rep) = clean_text("hai/M tuổi/Nu");
        assert_eq!(out, "hai/M tuổi/Nu\n");
        assert_eq!(rep.total(), 0);
    }

    #[test]
    fn underscores() {
        let (out, rep) = clean_text("học__sinh/N một___hai/M");
        assert_eq!(out, "học_sinh/N một_hai/M\n");
        assert_eq!(rep.count(RepairRule::DoubleUnderscore), 2);
    }

    #[test]
    fn joined_punctuation() {
        let (out, rep) = clean_text("đi/V ?!/?");
        assert_eq!(out, "đi/V ?/? !/?\n");
        assert_eq!(rep.count(RepairRule::JoinedPunctuation), 1);
        assert!(rep.flagged.is_empty());

        let (out, rep) = clean_text("a/N .../...");
        assert_eq!(out, "a/N ./... ./... ./...\n");
        assert_eq!(rep.count(RepairRule::JoinedPunctuation), 1);
        assert_eq!(rep.flagged.len(), 1);
    }

    #[test]
    fn eth() {
        let (out, rep) = clean_text("ðường/N");
        assert_eq!(out, "đường/N\n");
        assert_eq!(rep.count(RepairRule::IcelandicEth), 1);
    }

    #[test]
    fn multiple_tags() {
        let (out, rep) = clean_text("bàn/N/V");
        assert_eq!(out, "bàn/N\n");
        assert_eq!(rep.count(RepairRule::MultipleTags), 1);
        assert_eq!(rep.flagged[0].original, "bàn/N/V");
        // A slash inside a word that is not followed by a tag is left alone.
        let (out, rep) = clean_text("km/h/Nu a/b/N");
        assert_eq!(out, "km/h/Nu a/b/N\n");
        assert_eq!(rep.total(), 0);
    }

    #[test]
    fn clean_corpus_is_fixpoint() {
        let text = "học_sinh/N đi/V học/V ./.\n";
        let (out, rep) = clean_text(text);
        assert_eq!(out, text);
        assert_eq!(rep.counts(), [0; 6]);
    }

    #[test]
    fn cascading_repairs_reach_fixpoint() {
        // R6 exposes VN/Np, which R1 then fixes on the next pass.
        let (out, rep) = clean_text("VN/Np/V");
        assert_eq!(out, "VN/Ny\n");
        assert_eq!(rep.count(RepairRule::MultipleTags), 1);
        assert_eq!(rep.count(RepairRule::AbbreviationTag), 1);
        let (again, rep2) = clean_text(&out);
        assert_eq!(again, out);
        assert_eq!(rep2.total(), 0);
    }

    #[test]
    fn report_table_layout() {
        let (_, rep) = clean_text("VN/Np");
        assert_eq!(
            rep.render_table(),
            "rule\toccurrences\nR1\t1\nR2\t0\nR3\t0\nR4\t0\nR5\t0\nR6\t0\n"
        );
    }
}
