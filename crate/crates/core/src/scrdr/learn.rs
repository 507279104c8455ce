//! Failure-driven growth of the exception tree.
//!
//! Every training token becomes an object: its five-word window, the initial
//! tags of that window and the gold tag. Each node of the tree owns the
//! objects for which it is the last fired node. Working through the nodes
//! first-in first-out, the learner repeatedly picks the candidate rule with
//! the largest net error reduction among the node's objects and attaches it
//! as the node's newest exception; the objects the rule fires on move to the
//! new node, which is queued in turn.

use std::collections::{HashMap, VecDeque};

use super::rule::{Rule, RuleCondition, Slot, TEMPLATES};
use super::tree::ScrdrTree;
use super::{InitialTagger, ScrdrError};
use crate::corpus::{Tag, TaggedCorpus};
use crate::features::Context;
use crate::shape;

const ABSENT: u32 = u32::MAX;

/// A training token with symbols interned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Object {
    pub words: [u32; 5],
    pub tags: [u32; 5],
    /// Character suffixes of length 1..=4 of the current word, or absent.
    pub suffixes: [u32; 4],
    pub correct: u32,
    pub position: usize,
    pub sentence_length: usize,
}

impl Object {
    pub fn initial(&self) -> u32 {
        self.tags[2]
    }

    fn value(&self, slot: Slot) -> u32 {
        match slot {
            Slot::Word(o) => self.words[(o + 2) as usize],
            Slot::Tag(o) => self.tags[(o + 2) as usize],
            Slot::Suffix(k) => self.suffixes[k as usize - 1],
        }
    }
}

/// One object per training token, in corpus order.
#[derive(Debug, Clone, Default)]
pub struct ObjectDictionary {
    symbols: Vec<String>,
    ids: HashMap<String, u32>,
    objects: Vec<Object>,
}

impl ObjectDictionary {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.symbols.len() as u32;
        self.symbols.push(s.to_string());
        self.ids.insert(s.to_string(), id);
        id
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    pub fn symbol(&self, id: u32) -> &str {
        &self.symbols[id as usize]
    }

    pub fn initial_tag(&self, i: usize) -> &str {
        self.symbol(self.objects[i].initial())
    }

    pub fn correct_tag(&self, i: usize) -> &str {
        self.symbol(self.objects[i].correct)
    }

    /// The object's window as a feature context.
    pub fn context(&self, i: usize) -> Context<'_> {
        let o = &self.objects[i];
        Context {
            words: o.words.map(|w| self.symbol(w)),
            tags: o.tags.map(|t| self.symbol(t)),
            position: o.position,
            sentence_length: o.sentence_length,
        }
    }

    /// Objects whose initial tag differs from the gold tag.
    pub fn error_count(&self) -> usize {
        self.objects.iter().filter(|o| o.initial() != o.correct).count()
    }
}

pub fn build_object_dictionary(
    train: &TaggedCorpus,
    tagger: &InitialTagger,
) -> Result<ObjectDictionary, ScrdrError> {
    let mut dict = ObjectDictionary::default();
    for (si, s) in train.sentences.iter().enumerate() {
        let words = s.words();
        let initial: Vec<&str> = tagger.tag_words(&words).into_iter().map(Tag::as_str).collect();
        for (pos, tok) in s.tokens.iter().enumerate() {
            let gold = tok.tag.as_ref().ok_or(ScrdrError::UntaggedToken(si))?;
            let ctx = Context::new(&words, &initial, pos);
            let mut o = Object {
                words: [0; 5],
                tags: [0; 5],
                suffixes: [ABSENT; 4],
                correct: dict.intern(gold.as_str()),
                position: pos,
                sentence_length: words.len(),
            };
            for i in 0..5 {
                o.words[i] = dict.intern(ctx.words[i]);
                o.tags[i] = dict.intern(ctx.tags[i]);
            }
            for k in 1..=4 {
                if let Some(suf) = shape::char_suffix(ctx.current(), k) {
                    o.suffixes[k - 1] = dict.intern(suf);
                }
            }
            dict.objects.push(o);
        }
    }
    Ok(dict)
}

/// Attachment constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowParams {
    /// The rule must fire on at least this many of the node's objects.
    pub min_fired: usize,
    /// Net error reduction required to attach a rule; at least 1.
    pub min_gain: usize,
    /// Deepest exception level a rule may be attached at.
    pub max_depth: usize,
}

impl Default for GrowParams {
    fn default() -> Self {
        GrowParams {
            min_fired: 2,
            min_gain: 2,
            max_depth: 6,
        }
    }
}

impl GrowParams {
    pub fn validate(&self) -> Result<(), ScrdrError> {
        if self.min_gain == 0 {
            return Err(ScrdrError::InvalidParams("min_gain must be at least 1".into()));
        }
        if self.max_depth < 1 {
            return Err(ScrdrError::InvalidParams("max_depth must be at least 1".into()));
        }
        Ok(())
    }
}

/// Bookkeeping for one attached rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attachment {
    pub node: usize,
    pub parent: usize,
    pub net: usize,
    pub corrected: usize,
    pub broken: usize,
    pub fired: usize,
    /// Training errors of the whole tree right after the attachment.
    pub errors_after: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GrowthLog {
    pub initial_errors: usize,
    pub attachments: Vec<Attachment>,
}

impl GrowthLog {
    pub fn final_errors(&self) -> usize {
        self.attachments
            .last()
            .map_or(self.initial_errors, |a| a.errors_after)
    }
}

// Template index plus up to three slot values.
type CondKey = (u8, [u32; 3]);

fn key_of(o: &Object, template: usize) -> Option<CondKey> {
    let mut vals = [ABSENT; 3];
    for (v, &slot) in vals.iter_mut().zip(TEMPLATES[template]) {
        *v = o.value(slot);
        if *v == ABSENT {
            return None;
        }
    }
    Some((template as u8, vals))
}

fn fires(o: &Object, key: &CondKey) -> bool {
    TEMPLATES[key.0 as usize]
        .iter()
        .zip(key.1)
        .all(|(&slot, v)| o.value(slot) == v)
}

fn condition_of(dict: &ObjectDictionary, key: &CondKey) -> RuleCondition {
    let conjuncts = TEMPLATES[key.0 as usize]
        .iter()
        .zip(key.1)
        .map(|(&slot, v)| (slot, dict.symbol(v).to_string()))
        .collect();
    RuleCondition::new(conjuncts).expect("templates have distinct slots")
}

#[derive(Default)]
struct Counter {
    fired: u32,
    by_tag: Vec<(u32, u32)>,
}

struct Choice {
    key: CondKey,
    conclusion: u32,
    corrected: usize,
    broken: usize,
    fired: usize,
}

/// Best rule for objects currently concluded as `current`, if any passes the
/// constraints.
fn select(
    dict: &ObjectDictionary,
    objects: &[u32],
    current: u32,
    params: &GrowParams,
) -> Option<Choice> {
    let mut counters: HashMap<CondKey, Counter> = HashMap::new();
    for &i in objects {
        let o = &dict.objects[i as usize];
        if o.correct == current {
            continue;
        }
        for t in 0..TEMPLATES.len() {
            if let Some(k) = key_of(o, t) {
                counters.entry(k).or_default();
            }
        }
    }
    if counters.is_empty() {
        return None;
    }
    for &i in objects {
        let o = &dict.objects[i as usize];
        for t in 0..TEMPLATES.len() {
            let Some(k) = key_of(o, t) else { continue };
            if let Some(c) = counters.get_mut(&k) {
                c.fired += 1;
                match c.by_tag.iter_mut().find(|(tag, _)| *tag == o.correct) {
                    Some((_, n)) => *n += 1,
                    None => c.by_tag.push((o.correct, 1)),
                }
            }
        }
    }

    let mut best: Vec<Choice> = Vec::new();
    for (key, c) in &counters {
        if (c.fired as usize) < params.min_fired {
            continue;
        }
        let broken = c
            .by_tag
            .iter()
            .find(|(t, _)| *t == current)
            .map_or(0, |&(_, n)| n as usize);
        for &(tag, n) in &c.by_tag {
            let corrected = n as usize;
            if tag == current || corrected < broken + params.min_gain {
                continue;
            }
            let cand = Choice {
                key: *key,
                conclusion: tag,
                corrected,
                broken,
                fired: c.fired as usize,
            };
            let rank = |x: &Choice| (x.corrected - x.broken, std::cmp::Reverse(x.broken));
            match best.first().map(|b| rank(&cand).cmp(&rank(b))) {
                None | Some(std::cmp::Ordering::Equal) => best.push(cand),
                Some(std::cmp::Ordering::Greater) => {
                    best.clear();
                    best.push(cand);
                }
                Some(std::cmp::Ordering::Less) => {}
            }
        }
    }
    // Remaining ties: smallest serialized condition, then conclusion.
    best.into_iter()
        .map(|c| {
            let order = (condition_of(dict, &c.key).to_string(), dict.symbol(c.conclusion).to_string());
            (order, c)
        })
        .min_by(|a, b| a.0.cmp(&b.0))
        .map(|(_, c)| c)
}

/// Grow a tree over the dictionary. The tree starts with the default rule and
/// one `t0=T → T` rule per tag in the initial output.
pub fn grow_tree(dict: &ObjectDictionary, params: &GrowParams) -> Result<(ScrdrTree, GrowthLog), ScrdrError> {
    params.validate()?;
    if dict.is_empty() {
        return Err(ScrdrError::EmptyCorpus);
    }
    let initial_tags: Vec<Tag> = {
        let mut ids: Vec<u32> = dict.objects.iter().map(Object::initial).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.iter()
            .map(|&t| Tag::new(dict.symbol(t)).expect("initial tags are valid"))
            .collect()
    };
    let mut tree = ScrdrTree::with_first_layer(&initial_tags);
    let mut conclusion: Vec<u32> = vec![ABSENT];
    let mut cover: Vec<Vec<u32>> = vec![Vec::new()];
    let mut by_tag: HashMap<u32, usize> = HashMap::new();
    for id in tree.exceptions_of(ScrdrTree::ROOT) {
        let label = tree.node(id).conclusion().unwrap().as_str();
        let sym = dict.ids[label];
        by_tag.insert(sym, id);
        debug_assert_eq!(conclusion.len(), id);
        conclusion.push(sym);
        cover.push(Vec::new());
    }
    for (i, o) in dict.objects.iter().enumerate() {
        cover[by_tag[&o.initial()]].push(i as u32);
    }

    let mut log = GrowthLog {
        initial_errors: dict.error_count(),
        attachments: Vec::new(),
    };
    let mut errors = log.initial_errors;
    let mut queue: VecDeque<usize> = tree.exceptions_of(ScrdrTree::ROOT).into();
    while let Some(node) = queue.pop_front() {
        if tree.node(node).depth + 1 > params.max_depth {
            continue;
        }
        while let Some(choice) = select(dict, &cover[node], conclusion[node], params) {
            let net = choice.corrected - choice.broken;
            assert!(net >= params.min_gain, "attached rule must reduce errors");
            let rule = Rule {
                condition: condition_of(dict, &choice.key),
                conclusion: Tag::new(dict.symbol(choice.conclusion)).expect("gold tags are valid"),
            };
            let child = tree.add_exception(node, rule);
            let (moved, kept): (Vec<u32>, Vec<u32>) = cover[node]
                .iter()
                .partition(|&&i| fires(&dict.objects[i as usize], &choice.key));
            debug_assert_eq!(moved.len(), choice.fired);
            cover[node] = kept;
            cover.push(moved);
            conclusion.push(choice.conclusion);
            errors -= net;
            log.attachments.push(Attachment {
                node: child,
                parent: node,
                net,
                corrected: choice.corrected,
                broken: choice.broken,
                fired: choice.fired,
                errors_after: errors,
            });
            queue.push_back(child);
        }
    }

    // The walk over the finished tree must agree with the bookkeeping.
    let walked = (0..dict.len())
        .filter(|&i| {
            let ctx = dict.context(i);
            let tag = tree.classify(&ctx).map_or(dict.initial_tag(i), Tag::as_str);
            tag != dict.correct_tag(i)
        })
        .count();
    assert_eq!(walked, errors, "tree walk disagrees with growth bookkeeping");
    assert!(errors <= log.initial_errors);
    Ok((tree, log))
}
