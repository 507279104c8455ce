use std::fmt;

use crate::corpus::Tag;
use crate::features::Context;
use crate::shape;

/// One position of an object that a rule can test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    /// Word at an offset in -2..=2.
    Word(i8),
    /// Initial tag at an offset in -2..=2.
    Tag(i8),
    /// Character suffix of the current word, length 1..=4.
    Suffix(u8),
}

impl Slot {
    pub fn name(self) -> String {
        fn off(o: i8) -> String {
            if o > 0 {
                format!("+{o}")
            } else {
                o.to_string()
            }
        }
        match self {
            Slot::Word(o) => format!("w{}", off(o)),
            Slot::Tag(o) => format!("t{}", off(o)),
            Slot::Suffix(k) => format!("suf{k}"),
        }
    }

    pub fn parse(name: &str) -> Option<Slot> {
        let offset = |s: &str| -> Option<i8> {
            let o: i8 = match s.strip_prefix('+') {
                Some(rest) if !rest.starts_with('-') => rest.parse().ok()?,
                _ => s.parse().ok()?,
            };
            (-2..=2).contains(&o).then_some(o)
        };
        if let Some(k) = name.strip_prefix("suf") {
            let k: u8 = k.parse().ok()?;
            return (1..=4).contains(&k).then_some(Slot::Suffix(k));
        }
        if let Some(o) = name.strip_prefix('w') {
            return offset(o).map(Slot::Word);
        }
        if let Some(o) = name.strip_prefix('t') {
            return offset(o).map(Slot::Tag);
        }
        None
    }

    /// Value of the slot in a context; `None` for a suffix the word is too
    /// short to have.
    pub fn value<'a>(self, ctx: &Context<'a>) -> Option<&'a str> {
        match self {
            Slot::Word(o) => Some(ctx.word(o as isize)),
            Slot::Tag(o) => Some(ctx.tag(o as isize)),
            Slot::Suffix(k) => shape::char_suffix(ctx.current(), k as usize),
        }
    }
}

use Slot::{Suffix as S, Tag as T, Word as W};

/// Rule templates: words, word bigrams, word trigrams, tags, tag bigrams,
/// tag/word combinations and suffixes of the current word.
pub const TEMPLATES: [&[Slot]; 30] = [
    &[W(-2)],
    &[W(-1)],
    &[W(0)],
    &[W(1)],
    &[W(2)],
    &[W(-2), W(0)],
    &[W(-1), W(0)],
    &[W(-1), W(1)],
    &[W(0), W(1)],
    &[W(0), W(2)],
    &[W(-2), W(-1), W(0)],
    &[W(-1), W(0), W(1)],
    &[W(0), W(1), W(2)],
    &[T(-2)],
    &[T(-1)],
    &[T(0)],
    &[T(1)],
    &[T(2)],
    &[T(-2), T(-1)],
    &[T(-1), T(1)],
    &[T(1), T(2)],
    &[T(-1), W(0)],
    &[W(0), T(1)],
    &[T(-1), W(0), T(1)],
    &[T(-2), T(-1), W(0)],
    &[W(0), T(1), T(2)],
    &[S(1)],
    &[S(2)],
    &[S(3)],
    &[S(4)],
];

/// A conjunction of slot tests. Each slot appears at most once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleCondition {
    conjuncts: Vec<(Slot, String)>,
}

impl RuleCondition {
    /// `None` when empty or when a slot repeats.
    pub fn new(conjuncts: Vec<(Slot, String)>) -> Option<RuleCondition> {
        if conjuncts.is_empty() {
            return None;
        }
        for (i, (s, _)) in conjuncts.iter().enumerate() {
            if conjuncts[..i].iter().any(|(p, _)| p == s) {
                return None;
            }
        }
        Some(RuleCondition { conjuncts })
    }

    /// `t0 = tag`, the form of the first-layer rules.
    pub fn current_tag(tag: &str) -> RuleCondition {
        RuleCondition {
            conjuncts: vec![(Slot::Tag(0), tag.to_string())],
        }
    }

    pub fn conjuncts(&self) -> &[(Slot, String)] {
        &self.conjuncts
    }

    pub fn fires(&self, ctx: &Context<'_>) -> bool {
        self.conjuncts
            .iter()
            .all(|(slot, v)| slot.value(ctx) == Some(v.as_str()))
    }
}

pub(crate) fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            ' ' => out.push_str("\\s"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn unescape(value: &str) -> Option<String> {
    let mut out = String::with_capacity(value.len());
    let mut chars = value.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        out.push(match chars.next()? {
            '\\' => '\\',
            's' => ' ',
            't' => '\t',
            'n' => '\n',
            _ => return None,
        });
    }
    Some(out)
}

/// Written `slot=value & slot=value`, values escaped so they hold no spaces.
impl fmt::Display for RuleCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (slot, v)) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{}={}", slot.name(), escape(v))?;
        }
        Ok(())
    }
}

impl std::str::FromStr for RuleCondition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut conjuncts = Vec::new();
        for (i, tok) in s.split_whitespace().enumerate() {
            if i % 2 == 1 {
                if tok != "&" {
                    return Err(format!("expected `&`, found `{tok}`"));
                }
                continue;
            }
            let (name, value) = tok
                .split_once('=')
                .ok_or_else(|| format!("expected slot=value, found `{tok}`"))?;
            let slot = Slot::parse(name).ok_or_else(|| format!("unknown slot `{name}`"))?;
            let value = unescape(value).ok_or_else(|| format!("bad escape in `{value}`"))?;
            conjuncts.push((slot, value));
        }
        if s.split_whitespace().count().is_multiple_of(2) {
            return Err("condition ends with `&` or is empty".into());
        }
        RuleCondition::new(conjuncts).ok_or_else(|| "repeated slot".to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub condition: RuleCondition,
    pub conclusion: Tag,
}

/// Every template instantiated on `ctx`, concluding `correct`. Suffix
/// templates are skipped when the word is not longer than the suffix.
pub fn generate_candidates(ctx: &Context<'_>, correct: &Tag) -> Vec<Rule> {
    let mut out = Vec::with_capacity(TEMPLATES.len());
    'templates: for template in TEMPLATES {
        let mut conjuncts = Vec::with_capacity(template.len());
        for &slot in template {
            match slot.value(ctx) {
                Some(v) => conjuncts.push((slot, v.to_string())),
                None => continue 'templates,
            }
        }
        out.push(Rule {
            condition: RuleCondition { conjuncts },
            conclusion: correct.clone(),
        });
    }
    out
}
