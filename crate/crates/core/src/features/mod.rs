//! Feature templates over a five-word tagging window.
//!
//! Four incremental template sets drive the linear tagger: `spl` (word
//! n-grams, shape and position), `bi` (current word conjoined with the left
//! and right tags), `affix` (first and last syllable) and `ds` (Brown cluster
//! ids of the neighbouring words). Two legacy presets, `jvn` and `vn`, mirror
//! the default feature sets of older Vietnamese taggers.
//!
//! Keys are serialized as `template=value`. Template ids never contain `=`,
//! so the serialization is injective.

mod clusters;
mod context;
mod legacy;
mod templates;

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

pub use clusters::{load_cluster_file, ClusterMap, DuplicateWord, DEFAULT_PREFIXES, UNK_CLUSTER};
pub use context::{
    is_sentinel, Context, BOS1, BOS2, BOS_TAG, EOS1, EOS2, EOS_TAG, NO_TAG,
};
pub use legacy::{extract_jvn, extract_vn, NO_DICTIONARY_TAGS};

use crate::corpus::Lexicon;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FeatureError {
    #[error("unknown feature set `{0}` (expected spl, bi, affix, ds, jvn or vn)")]
    UnknownSet(String),
    #[error("empty feature set specification")]
    EmptySpec,
    #[error("feature set `ds` needs a cluster file")]
    MissingClusters,
    #[error("feature set `jvn` needs a lexicon")]
    MissingLexicon,
    #[error("cluster file line {line}: {reason}")]
    ClusterFormat { line: usize, reason: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// One named group of templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemplateSet {
    Simple,
    Bidirectional,
    Affix,
    Clusters,
    JvnMaxent,
    Vn,
}

impl TemplateSet {
    pub fn name(self) -> &'static str {
        match self {
            TemplateSet::Simple => "spl",
            TemplateSet::Bidirectional => "bi",
            TemplateSet::Affix => "affix",
            TemplateSet::Clusters => "ds",
            TemplateSet::JvnMaxent => "jvn",
            TemplateSet::Vn => "vn",
        }
    }

    /// Whether any template of the set reads a tag to the right.
    pub fn uses_right_tags(self) -> bool {
        self == TemplateSet::Bidirectional
    }

    /// Whether any template reads an already-assigned tag.
    pub fn uses_tags(self) -> bool {
        matches!(self, TemplateSet::Bidirectional | TemplateSet::Vn)
    }
}

impl FromStr for TemplateSet {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "spl" => TemplateSet::Simple,
            "bi" => TemplateSet::Bidirectional,
            "affix" => TemplateSet::Affix,
            "ds" => TemplateSet::Clusters,
            "jvn" | "jvn_maxent" => TemplateSet::JvnMaxent,
            "vn" => TemplateSet::Vn,
            other => return Err(FeatureError::UnknownSet(other.to_string())),
        })
    }
}

/// An ordered, duplicate-free combination of template sets, written
/// `spl+bi+affix+ds`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureSets(Vec<TemplateSet>);

impl FeatureSets {
    pub fn new(sets: impl IntoIterator<Item = TemplateSet>) -> FeatureSets {
        let mut out: Vec<TemplateSet> = Vec::new();
        for s in sets {
            if !out.contains(&s) {
                out.push(s);
            }
        }
        FeatureSets(out)
    }

    pub fn sets(&self) -> &[TemplateSet] {
        &self.0
    }

    pub fn contains(&self, set: TemplateSet) -> bool {
        self.0.contains(&set)
    }

    pub fn uses_right_tags(&self) -> bool {
        self.0.iter().any(|s| s.uses_right_tags())
    }

    pub fn uses_tags(&self) -> bool {
        self.0.iter().any(|s| s.uses_tags())
    }
}

impl FromStr for FeatureSets {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Err(FeatureError::EmptySpec);
        }
        let sets = s
            .split('+')
            .map(|p| p.trim().parse())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FeatureSets::new(sets))
    }
}

impl fmt::Display for FeatureSets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            f.write_str(s.name())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureKey {
    pub template_id: String,
    pub value: String,
}

impl FeatureKey {
    /// Split a serialized `template=value` key at its first `=`.
    pub fn parse(serialized: &str) -> Option<FeatureKey> {
        let (t, v) = serialized.split_once('=')?;
        Some(FeatureKey {
            template_id: t.to_string(),
            value: v.to_string(),
        })
    }
}

impl fmt::Display for FeatureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.template_id, self.value)
    }
}

/// Reusable storage for serialized keys; avoids reallocating per token.
#[derive(Debug, Default, Clone)]
pub struct KeyBuffer {
    store: Vec<String>,
    len: usize,
}

impl KeyBuffer {
    pub fn new() -> KeyBuffer {
        KeyBuffer::default()
    }

    pub fn clear(&mut self) {
        self.len = 0;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn keys(&self) -> &[String] {
        &self.store[..self.len]
    }

    fn next_slot(&mut self, template: &str) -> &mut String {
        if self.len == self.store.len() {
            self.store.push(String::with_capacity(32));
        }
        let slot = &mut self.store[self.len];
        self.len += 1;
        slot.clear();
        slot.push_str(template);
        slot.push('=');
        slot
    }

    /// Push `template=value`.
    pub fn push(&mut self, template: &str, value: &str) {
        self.next_slot(template).push_str(value);
    }

    /// Push `template=a b ...`; parts are joined by a space, which no real
    /// word contains.
    pub fn push_joined(&mut self, template: &str, parts: &[&str]) {
        let slot = self.next_slot(template);
        for (i, p) in parts.iter().enumerate() {
            if i > 0 {
                slot.push(' ');
            }
            slot.push_str(p);
        }
    }

    /// Push `template:n=value`.
    pub fn push_numbered(&mut self, template: &str, n: usize, value: &str) {
        if self.len == self.store.len() {
            self.store.push(String::with_capacity(32));
        }
        let slot = &mut self.store[self.len];
        self.len += 1;
        slot.clear();
        let _ = write!(slot, "{template}:{n}={value}");
    }

    pub fn push_bool(&mut self, template: &str, value: bool) {
        self.push(template, if value { "true" } else { "false" });
    }

    pub fn to_feature_keys(&self) -> Vec<FeatureKey> {
        self.keys()
            .iter()
            .map(|k| FeatureKey::parse(k).expect("serialized keys contain `=`"))
            .collect()
    }
}

/// Extraction switches used by the decoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractOptions {
    /// Emit templates that read tags to the right of the current word.
    pub right_tags: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { right_tags: true }
    }
}

/// Template sets bound to the resources they need.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    sets: FeatureSets,
    clusters: Option<Arc<ClusterMap>>,
    lexicon: Option<Arc<Lexicon>>,
}

impl FeatureExtractor {
    /// Fails when `ds` is requested without clusters or `jvn` without a lexicon.
    pub fn new(
        sets: FeatureSets,
        clusters: Option<Arc<ClusterMap>>,
        lexicon: Option<Arc<Lexicon>>,
    ) -> Result<FeatureExtractor, FeatureError> {
        if sets.sets().is_empty() {
            return Err(FeatureError::EmptySpec);
        }
        if sets.contains(TemplateSet::Clusters) && clusters.is_none() {
            return Err(FeatureError::MissingClusters);
        }
        if sets.contains(TemplateSet::JvnMaxent) && lexicon.is_none() {
            return Err(FeatureError::MissingLexicon);
        }
        Ok(FeatureExtractor {
            sets,
            clusters,
            lexicon,
        })
    }

    pub fn sets(&self) -> &FeatureSets {
        &self.sets
    }

    pub fn clusters(&self) -> Option<&ClusterMap> {
        self.clusters.as_deref()
    }

    pub fn lexicon(&self) -> Option<&Lexicon> {
        self.lexicon.as_deref()
    }

    pub fn extract_into(&self, ctx: &Context<'_>, opts: ExtractOptions, out: &mut KeyBuffer) {
        for &set in self.sets.sets() {
            match set {
                TemplateSet::Simple => templates::simple(ctx, out),
                TemplateSet::Bidirectional => templates::bidirectional(ctx, opts, out),
                TemplateSet::Affix => templates::affix(ctx, out),
                TemplateSet::Clusters => {
                    templates::clusters(ctx, self.clusters.as_deref().expect("checked"), out)
                }
                TemplateSet::JvnMaxent => {
                    legacy::jvn(ctx, self.lexicon.as_deref().expect("checked"), out)
                }
                TemplateSet::Vn => legacy::vn(ctx, out),
            }
        }
    }

    pub fn extract(&self, ctx: &Context<'_>) -> Vec<FeatureKey> {
        let mut buf = KeyBuffer::new();
        self.extract_into(ctx, ExtractOptions::default(), &mut buf);
        buf.to_feature_keys()
    }
}

/// Keys for a context under the `spl`/`bi`/`affix`/`ds` sets.
pub fn extract(
    ctx: &Context<'_>,
    sets: &[TemplateSet],
    clusters: Option<&ClusterMap>,
) -> Result<Vec<FeatureKey>, FeatureError> {
    let sets = FeatureSets::new(sets.iter().copied());
    if sets.contains(TemplateSet::JvnMaxent) {
        return Err(FeatureError::MissingLexicon);
    }
    let ex = FeatureExtractor::new(sets, clusters.cloned().map(Arc::new), None)?;
    Ok(ex.extract(ctx))
}
