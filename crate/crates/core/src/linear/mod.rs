//! Linear tagger over the feature engine.
//!
//! Every label gets a weight per feature key; a position is tagged with the
//! highest-scoring label. Training sees gold tags on both sides of each word.
//! Decoding is greedy, either left to right (right tags unknown) or in two
//! passes, where the second pass reads right tags from the first.

mod io;
mod train;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

pub use io::{load_model, save_model, FORMAT_VERSION, MAGIC};
pub use train::{ExampleSet, LogisticObjective, LossTrace};

use crate::corpus::{build_lexicon, CorpusError, Lexicon, Sentence, Tag, TaggedCorpus};
use crate::features::{
    ClusterMap, Context, ExtractOptions, FeatureError, FeatureExtractor, FeatureSets, KeyBuffer,
    TemplateSet, NO_TAG,
};
use crate::Tagger;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("training sentence {0} has an untagged token")]
    UntaggedToken(usize),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("model has no features")]
    EmptyModel,
    #[error("not a linear model file")]
    NotAModel,
    #[error("model format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupted model: {0}")]
    Corrupted(String),
    #[error("model file is truncated")]
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    Logistic,
    AveragedPerceptron,
}

impl Loss {
    pub fn name(self) -> &'static str {
        match self {
            Loss::Logistic => "logistic",
            Loss::AveragedPerceptron => "perceptron",
        }
    }
}

impl std::str::FromStr for Loss {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "logistic" | "maxent" => Ok(Loss::Logistic),
            "perceptron" => Ok(Loss::AveragedPerceptron),
            other => Err(format!("unknown loss `{other}` (expected logistic or perceptron)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
    pub shuffle: bool,
    pub loss: Loss,
    /// Examples per logistic update; `None` means full-batch gradient descent.
    pub batch_size: Option<usize>,
    /// Record the regularized loss after every epoch (logistic only).
    pub record_loss: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            learning_rate: 0.1,
            l2: 1e-6,
            seed: 0,
            shuffle: true,
            loss: Loss::Logistic,
            batch_size: Some(1),
            record_loss: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.epochs == 0 {
            return Err(ModelError::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(ModelError::InvalidConfig("learning rate must be positive".into()));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(ModelError::InvalidConfig("l2 must be non-negative".into()));
        }
        if self.batch_size == Some(0) {
            return Err(ModelError::InvalidConfig("batch size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeMode {
    LeftToRight,
    TwoPass,
}

impl DecodeMode {
    pub fn name(self) -> &'static str {
        match self {
            DecodeMode::LeftToRight => "left-to-right",
            DecodeMode::TwoPass => "two-pass",
        }
    }
}

impl std::str::FromStr for DecodeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left-to-right" | "ltr" => Ok(DecodeMode::LeftToRight),
            "two-pass" => Ok(DecodeMode::TwoPass),
            _ => Err(format!("unknown decode mode `{s}` (expected left-to-right or two-pass)")),
        }
    }
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct LinearModel {
    labels: Vec<Tag>,
    feature_index: HashMap<String, u32>,
    weights: Vec<f64>,
    config: TrainConfig,
    extractor: FeatureExtractor,
}

/// Per-thread buffers for decoding.
#[derive(Debug, Default)]
pub struct DecodeScratch {
    keys: KeyBuffer,
    scores: Vec<f64>,
    first: Vec<usize>,
}

impl LinearModel {
    /// Train on a tagged corpus. A lexicon for `jvn` is built from the corpus.
    pub fn train(
        corpus: &TaggedCorpus,
        sets: &FeatureSets,
        cfg: &TrainConfig,
        clusters: Option<Arc<ClusterMap>>,
    ) -> Result<LinearModel, ModelError> {
        Ok(LinearModel::train_with_trace(corpus, sets, cfg, clusters)?.0)
    }

    /// Train and return the per-epoch regularized loss when
    /// `cfg.record_loss` is set (logistic loss only).
    pub fn train_with_trace(
        corpus: &TaggedCorpus,
        sets: &FeatureSets,
        cfg: &TrainConfig,
        clusters: Option<Arc<ClusterMap>>,
    ) -> Result<(LinearModel, LossTrace), ModelError> {
        cfg.validate()?;
        if corpus.token_count() == 0 {
            return Err(ModelError::EmptyCorpus);
        }
        let lexicon = if sets.contains(TemplateSet::JvnMaxent) {
            Some(Arc::new(build_lexicon(corpus)?))
        } else {
            None
        };
        let extractor = FeatureExtractor::new(sets.clone(), clusters, lexicon)?;

        // Labels in training-frequency order, ties by label.
        let mut label_counts: HashMap<&Tag, u64> = HashMap::new();
        for (i, s) in corpus.sentences.iter().enumerate() {
            for t in &s.tokens {
                let tag = t.tag.as_ref().ok_or(ModelError::UntaggedToken(i))?;
                *label_counts.entry(tag).or_default() += 1;
            }
        }
        let mut labels: Vec<(&Tag, u64)> = label_counts.into_iter().collect();
        labels.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let labels: Vec<Tag> = labels.into_iter().map(|(t, _)| t.clone()).collect();
        let label_id: HashMap<&str, usize> =
            labels.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();

        let mut feature_index: HashMap<String, u32> = HashMap::new();
        let mut examples = ExampleSet::new();
        let mut keys = KeyBuffer::new();
        let mut ids = Vec::new();
        for s in &corpus.sentences {
            let words = s.words();
            let tags: Vec<&str> = s.tokens.iter().map(|t| t.tag.as_ref().unwrap().as_str()).collect();
            for (pos, gold) in tags.iter().enumerate() {
                let ctx = Context::new(&words, &tags, pos);
                keys.clear();
                extractor.extract_into(&ctx, ExtractOptions { right_tags: true }, &mut keys);
                ids.clear();
                for k in keys.keys() {
                    let next = feature_index.len() as u32;
                    let id = *feature_index.entry(k.clone()).or_insert(next);
                    ids.push(id);
                }
                examples.push(&ids, label_id[gold]);
            }
        }

        let (weights, trace) = train::fit(&examples, feature_index.len(), labels.len(), cfg);
        let model = LinearModel {
            labels,
            feature_index,
            weights,
            config: cfg.clone(),
            extractor,
        };
        Ok((model, trace))
    }

    pub(crate) fn from_parts(
        labels: Vec<Tag>,
        feature_index: HashMap<String, u32>,
        weights: Vec<f64>,
        config: TrainConfig,
        extractor: FeatureExtractor,
    ) -> LinearModel {
        LinearModel {
            labels,
            feature_index,
            weights,
            config,
            extractor,
        }
    }

    pub fn labels(&self) -> &[Tag] {
        &self.labels
    }

    pub fn num_features(&self) -> usize {
        self.feature_index.len()
    }

    pub fn feature_index(&self) -> &HashMap<String, u32> {
        &self.feature_index
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn feature_sets(&self) -> &FeatureSets {
        self.extractor.sets()
    }

    pub fn extractor(&self) -> &FeatureExtractor {
        &self.extractor
    }

    /// Two-pass when the feature sets read right tags, else left-to-right.
    pub fn default_mode(&self) -> DecodeMode {
        if self.feature_sets().uses_right_tags() {
            DecodeMode::TwoPass
        } else {
            DecodeMode::LeftToRight
        }
    }

    /// Weight of a serialized feature key for a label, if both are known.
    pub fn weight(&self, key: &str, label: &str) -> Option<f64> {
        let f = *self.feature_index.get(key)? as usize;
        let l = self.labels.iter().position(|t| t.as_str() == label)?;
        Some(self.weights[f * self.labels.len() + l])
    }

    /// Scores of every label for one context; unseen keys contribute nothing.
    pub fn score_into(&self, ctx: &Context<'_>, opts: ExtractOptions, scratch: &mut DecodeScratch) {
        let l = self.labels.len();
        scratch.keys.clear();
        self.extractor.extract_into(ctx, opts, &mut scratch.keys);
        scratch.scores.clear();
        scratch.scores.resize(l, 0.0);
        for k in scratch.keys.keys() {
            if let Some(&f) = self.feature_index.get(k) {
                let row = &self.weights[f as usize * l..(f as usize + 1) * l];
                for (s, w) in scratch.scores.iter_mut().zip(row) {
                    *s += w;
                }
            }
        }
    }

    pub fn scores(&self, ctx: &Context<'_>, opts: ExtractOptions) -> Vec<f64> {
        let mut scratch = DecodeScratch::default();
        self.score_into(ctx, opts, &mut scratch);
        scratch.scores
    }

    /// Keys extracted at a context that the model knows about.
    pub fn active_keys(&self, ctx: &Context<'_>, opts: ExtractOptions) -> Vec<String> {
        let mut keys = KeyBuffer::new();
        self.extractor.extract_into(ctx, opts, &mut keys);
        keys.keys()
            .iter()
            .filter(|k| self.feature_index.contains_key(*k))
            .cloned()
            .collect()
    }

    // One greedy pass. `right` supplies right-context tags when present.
    fn greedy_pass(
        &self,
        words: &[&str],
        right: Option<&[usize]>,
        scratch: &mut DecodeScratch,
        out: &mut Vec<usize>,
    ) {
        out.clear();
        let n = words.len();
        let opts = ExtractOptions {
            right_tags: right.is_some(),
        };
        let mut tags: Vec<&str> = vec![NO_TAG; n];
        if let Some(r) = right {
            for (t, &i) in tags.iter_mut().zip(r) {
                *t = self.labels[i].as_str();
            }
        }
        for pos in 0..n {
            let ctx = Context::new(words, &tags, pos);
            self.score_into(&ctx, opts, scratch);
            let best = argmax(&scratch.scores);
            out.push(best);
            tags[pos] = self.labels[best].as_str();
        }
    }

    /// Label indices for a sentence.
    pub fn decode_indices(&self, words: &[&str], mode: DecodeMode, scratch: &mut DecodeScratch) -> Vec<usize> {
        let mut out = Vec::with_capacity(words.len());
        if words.is_empty() {
            return out;
        }
        let mut first = std::mem::take(&mut scratch.first);
        match mode {
            DecodeMode::LeftToRight => self.greedy_pass(words, None, scratch, &mut out),
            DecodeMode::TwoPass => {
                self.greedy_pass(words, None, scratch, &mut first);
                self.greedy_pass(words, Some(&first), scratch, &mut out);
            }
        }
        scratch.first = first;
        out
    }

    pub fn decode_words(&self, words: &[&str], mode: DecodeMode) -> Vec<&Tag> {
        let mut scratch = DecodeScratch::default();
        self.decode_indices(words, mode, &mut scratch)
            .into_iter()
            .map(|i| &self.labels[i])
            .collect()
    }

    /// Tag a sentence; existing tags are replaced.
    pub fn decode(&self, sentence: &Sentence, mode: DecodeMode) -> Sentence {
        let tags: Vec<Tag> = self
            .decode_words(&sentence.words(), mode)
            .into_iter()
            .cloned()
            .collect();
        sentence.with_tags(&tags)
    }

    /// Training-set accuracy under a decode mode.
    pub fn accuracy_on(&self, corpus: &TaggedCorpus, mode: DecodeMode) -> f64 {
        let mut scratch = DecodeScratch::default();
        let (mut total, mut correct) = (0usize, 0usize);
        for s in &corpus.sentences {
            let predicted = self.decode_indices(&s.words(), mode, &mut scratch);
            for (t, p) in s.tokens.iter().zip(predicted) {
                total += 1;
                if t.tag.as_ref() == Some(&self.labels[p]) {
                    correct += 1;
                }
            }
        }
        correct as f64 / total.max(1) as f64
    }

    pub fn lexicon(&self) -> Option<&Lexicon> {
        self.extractor.lexicon()
    }
}

/// A linear model paired with a decode mode.
#[derive(Debug, Clone)]
pub struct LinearTagger {
    pub model: Arc<LinearModel>,
    pub mode: DecodeMode,
}

impl LinearTagger {
    pub fn new(model: LinearModel) -> LinearTagger {
        let mode = model.default_mode();
        LinearTagger {
            model: Arc::new(model),
            mode,
        }
    }

    pub fn with_mode(mut self, mode: DecodeMode) -> LinearTagger {
        self.mode = mode;
        self
    }
}

impl Tagger for LinearModel {
    fn tag<'s>(&'s self, words: &[&str]) -> Vec<&'s Tag> {
        self.decode_words(words, self.default_mode())
    }

    fn name(&self) -> String {
        format!("linear[{}]", self.feature_sets())
    }
}

impl Tagger for LinearTagger {
    fn tag<'s>(&'s self, words: &[&str]) -> Vec<&'s Tag> {
        self.model.decode_words(words, self.mode)
    }

    fn name(&self) -> String {
        format!("linear[{}, {}]", self.model.feature_sets(), self.mode.name())
    }
}
