//! Evaluation protocol: token accuracy, k-fold cross-validation, throughput
//! and the feature ablation table.
//!
//! Cross-validation accuracy is micro-averaged: correct tokens over all
//! folds divided by total tokens over all folds. A token is unknown when its
//! word is absent from the lexicon of the fold's training part.

mod ablate;
mod speed;

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

pub use ablate::{ablate, AblationReport, AblationRow, REFERENCE_NOTE};
pub use speed::{measure_speed, Clock, MonotonicClock, SpeedReport};

use crate::corpus::{build_lexicon, split_kfold_with, CorpusError, FoldMode, Lexicon, TaggedCorpus};
use crate::features::{ClusterMap, FeatureSets};
use crate::linear::{DecodeMode, LinearModel, LinearTagger, ModelError, TrainConfig};
use crate::scrdr::{GrowParams, ScrdrError, ScrdrTagger};
use crate::Tagger;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("sentence {sentence}: prediction and gold are not aligned ({detail})")]
    Misaligned { sentence: usize, detail: String },
    #[error("sentence {sentence}, token {token}: prediction has no tag")]
    UntaggedPrediction { sentence: usize, token: usize },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Linear(#[from] ModelError),
    #[error(transparent)]
    Scrdr(#[from] ScrdrError),
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<EvalError>,
    },
    #[error("speed corpus is empty")]
    EmptySpeedCorpus,
    #[error("at least 3 repetitions are needed, got {0}")]
    TooFewRepetitions(usize),
}

/// Token counts for one test set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub total: usize,
    pub correct: usize,
    pub unknown: usize,
    pub unknown_correct: usize,
}

impl Counts {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.correct as f64 / self.total as f64
    }

    /// `None` when there are no unknown tokens.
    pub fn unknown_accuracy(&self) -> Option<f64> {
        (self.unknown > 0).then(|| self.unknown_correct as f64 / self.unknown as f64)
    }

    fn add(&mut self, other: &Counts) {
        self.total += other.total;
        self.correct += other.correct;
        self.unknown += other.unknown;
        self.unknown_correct += other.unknown_correct;
    }
}

/// Compare a tagged prediction with gold, token by token.
pub fn evaluate(pred: &TaggedCorpus, gold: &TaggedCorpus, train_lexicon: &Lexicon) -> Result<Counts, EvalError> {
    if pred.len() != gold.len() {
        return Err(EvalError::Misaligned {
            sentence: pred.len().min(gold.len()),
            detail: format!("{} predicted sentences, {} gold", pred.len(), gold.len()),
        });
    }
    let mut c = Counts::default();
    for (si, (p, g)) in pred.sentences.iter().zip(&gold.sentences).enumerate() {
        if p.len() != g.len() {
            return Err(EvalError::Misaligned {
                sentence: si,
                detail: format!("{} predicted tokens, {} gold", p.len(), g.len()),
            });
        }
        for (ti, (pt, gt)) in p.tokens.iter().zip(&g.tokens).enumerate() {
            if pt.word != gt.word {
                return Err(EvalError::Misaligned {
                    sentence: si,
                    detail: format!("token {ti} is `{}` in prediction, `{}` in gold", pt.word, gt.word),
                });
            }
            let ptag = pt.tag.as_ref().ok_or(EvalError::UntaggedPrediction { sentence: si, token: ti })?;
            let hit = gt.tag.as_ref() == Some(ptag);
            c.total += 1;
            c.correct += hit as usize;
            if !train_lexicon.contains(&gt.word) {
                c.unknown += 1;
                c.unknown_correct += hit as usize;
            }
        }
    }
    Ok(c)
}

/// What to train in each fold.
#[derive(Debug, Clone)]
pub enum TaggerConfig {
    Linear {
        sets: FeatureSets,
        train: TrainConfig,
        clusters: Option<Arc<ClusterMap>>,
        /// Defaults to two-pass when the sets read right tags.
        mode: Option<DecodeMode>,
    },
    Scrdr { params: GrowParams },
}

impl TaggerConfig {
    pub fn linear(sets: FeatureSets, train: TrainConfig, clusters: Option<Arc<ClusterMap>>) -> TaggerConfig {
        TaggerConfig::Linear {
            sets,
            train,
            clusters,
            mode: None,
        }
    }

    pub fn tagger_id(&self) -> &'static str {
        match self {
            TaggerConfig::Linear { .. } => "linear",
            TaggerConfig::Scrdr { .. } => "scrdr",
        }
    }

    pub fn feature_label(&self) -> String {
        match self {
            TaggerConfig::Linear { sets, .. } => sets.to_string(),
            TaggerConfig::Scrdr { .. } => "rules".to_string(),
        }
    }

    pub fn train(&self, corpus: &TaggedCorpus) -> Result<Box<dyn Tagger>, EvalError> {
        Ok(match self {
            TaggerConfig::Linear {
                sets,
                train,
                clusters,
                mode,
            } => {
                let model = LinearModel::train(corpus, sets, train, clusters.clone())?;
                let tagger = LinearTagger::new(model);
                let mode = mode.unwrap_or(tagger.mode);
                Box::new(tagger.with_mode(mode))
            }
            TaggerConfig::Scrdr { params } => Box::new(ScrdrTagger::train(corpus, params)?.0),
        })
    }
}

/// Tag every sentence of `corpus` with `tagger`.
pub fn tag_corpus(tagger: &dyn Tagger, corpus: &TaggedCorpus) -> TaggedCorpus {
    TaggedCorpus::new(
        corpus.sentences.iter().map(|s| tagger.tag_sentence(s)).collect(),
        corpus.source_id.clone(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldRow {
    pub fold: usize,
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub tagger_id: String,
    pub feature_sets: String,
    pub totals: Counts,
    pub folds: Vec<FoldRow>,
}

impl EvalReport {
    pub fn overall_acc(&self) -> f64 {
        self.totals.accuracy()
    }

    pub fn unknown_acc(&self) -> Option<f64> {
        self.totals.unknown_accuracy()
    }

    pub fn total_tokens(&self) -> usize {
        self.totals.total
    }

    pub fn unknown_tokens(&self) -> usize {
        self.totals.unknown
    }

    /// One line per fold plus a total line, as CSV.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "tagger",
            "features",
            "fold",
            "tokens",
            "unknown_tokens",
            "correct",
            "unknown_correct",
            "overall_pct",
            "unknown_pct",
        ])
        .unwrap();
        let rows = self
            .folds
            .iter()
            .map(|f| (f.fold.to_string(), f.counts))
            .chain(std::iter::once(("all".to_string(), self.totals)));
        for (fold, c) in rows {
            w.write_record([
                self.tagger_id.as_str(),
                self.feature_sets.as_str(),
                &fold,
                &c.total.to_string(),
                &c.unknown.to_string(),
                &c.correct.to_string(),
                &c.unknown_correct.to_string(),
                &pct(Some(c.accuracy())),
                &pct(c.unknown_accuracy()),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "tagger: {}  features: {}", self.tagger_id, self.feature_sets);
        let _ = writeln!(out, "{:<6} {:>10} {:>10} {:>8} {:>8}", "fold", "words", "unknown", "Ovr.", "Unk.");
        for f in &self.folds {
            let c = f.counts;
            let _ = writeln!(
                out,
                "{:<6} {:>10} {:>10} {:>8} {:>8}",
                f.fold + 1,
                c.total,
                c.unknown,
                pct(Some(c.accuracy())),
                pct(c.unknown_accuracy())
            );
        }
        let c = self.totals;
        let _ = writeln!(
            out,
            "{:<6} {:>10} {:>10} {:>8} {:>8}",
            "all",
            c.total,
            c.unknown,
            pct(Some(c.accuracy())),
            pct(c.unknown_accuracy())
        );
        out.push_str("Accuracy is micro-averaged over tokens across folds.\n");
        out
    }
}

/// Percentage with two decimals, `-` when absent.
pub fn pct(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{:.2}", x * 100.0),
        None => "-".to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvOptions {
    pub mode: FoldMode,
    /// Run folds on separate threads.
    pub parallel: bool,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            mode: FoldMode::Shuffled,
            parallel: false,
        }
    }
}

fn run_fold(
    corpus: &TaggedCorpus,
    plan: &crate::corpus::FoldPlan,
    fold: usize,
    cfg: &TaggerConfig,
) -> Result<FoldRow, EvalError> {
    let wrap = |e: EvalError| EvalError::Fold {
        fold,
        source: Box::new(e),
    };
    let (train, test) = plan.split(corpus, fold).map_err(|e| wrap(e.into()))?;
    let tagger = cfg.train(&train).map_err(wrap)?;
    let lexicon = build_lexicon(&train).map_err(|e| wrap(e.into()))?;
    let pred = tag_corpus(tagger.as_ref(), &test);
    let counts = evaluate(&pred, &test, &lexicon).map_err(wrap)?;
    Ok(FoldRow { fold, counts })
}

/// Train on k-1 folds and test on the remaining one, for every fold.
pub fn crossvalidate(
    corpus: &TaggedCorpus,
    k: usize,
    seed: u64,
    cfg: &TaggerConfig,
    opts: CvOptions,
) -> Result<EvalReport, EvalError> {
    let plan = split_kfold_with(corpus.len(), k, seed, opts.mode)?;
    let rows: Vec<Result<FoldRow, EvalError>> = if opts.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..k)
                .map(|fold| {
                    let plan = &plan;
                    s.spawn(move || run_fold(corpus, plan, fold, cfg))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("fold thread panicked"))
                .collect()
        })
    } else {
        (0..k).map(|fold| run_fold(corpus, &plan, fold, cfg)).collect()
    };
    let folds = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut totals = Counts::default();
    for f in &folds {
        totals.add(&f.counts);
    }
    Ok(EvalReport {
        tagger_id: cfg.tagger_id().to_string(),
        feature_sets: cfg.feature_label(),
        totals,
        folds,
    })
}
