//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use vnpos::linear::{LinearModel, LinearTagger, TrainConfig};
use vnpos::scrdr::{GrowParams, ScrdrTagger};
use vnpos::synth;

pub const TRAIN_SENTENCES: usize = 2000;
pub const SEED: u64 = 42;

/// Rule tagger and full-feature linear tagger trained on the same corpus.
pub fn trained_taggers() -> (ScrdrTagger, LinearTagger) {
    let train = synth::ambiguous_corpus(TRAIN_SENTENCES, SEED);
    let clusters = Arc::new(synth::clusters_for(&train, SEED));
    let (scrdr, _) = ScrdrTagger::train(&train, &GrowParams::default()).expect("synthetic corpus trains");
    let model = LinearModel::train(
        &train,
        &"spl+bi+affix+ds".parse().unwrap(),
        &TrainConfig::default(),
        Some(clusters),
    )
    .expect("synthetic corpus trains");
    (scrdr, LinearTagger::new(model))
}

/// Raw sentences of about `words` words.
pub fn raw(words: usize) -> Vec<Vec<String>> {
    synth::raw_corpus(words, SEED + 1)
}

pub fn borrowed(raw: &[Vec<String>]) -> Vec<Vec<&str>> {
    raw.iter().map(|s| s.iter().map(String::as_str).collect()).collect()
}
