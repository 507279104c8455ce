//! Optimizers for the linear tagger.
//!
//! Examples are sparse binary feature vectors. The multinomial logistic loss
//! is `mean_i(-log p(y_i | x_i)) + l2/2 * |w|^2`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Loss, TrainConfig};

/// Feature ids of every example, stored back to back.
#[derive(Debug, Clone, Default)]
pub struct ExampleSet {
    features: Vec<u32>,
    offsets: Vec<usize>,
    labels: Vec<usize>,
}

impl ExampleSet {
    pub fn new() -> ExampleSet {
        ExampleSet {
            features: Vec::new(),
            offsets: vec![0],
            labels: Vec::new(),
        }
    }

    /// Add one example; duplicate feature ids are merged.
    pub fn push(&mut self, features: &[u32], label: usize) {
        let start = self.features.len();
        self.features.extend_from_slice(features);
        self.features[start..].sort_unstable();
        let mut unique = start;
        for i in start..self.features.len() {
            if i == start || self.features[i] != self.features[unique - 1] {
                self.features[unique] = self.features[i];
                unique += 1;
            }
        }
        self.features.truncate(unique);
        self.offsets.push(self.features.len());
        self.labels.push(label);
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self, i: usize) -> &[u32] {
        &self.features[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }
}

fn scores_into(weights: &[f64], features: &[u32], num_labels: usize, scale: f64, out: &mut [f64]) {
    out.iter_mut().for_each(|s| *s = 0.0);
    for &f in features {
        let row = &weights[f as usize * num_labels..(f as usize + 1) * num_labels];
        for (s, w) in out.iter_mut().zip(row) {
            *s += w;
        }
    }
    if scale != 1.0 {
        out.iter_mut().for_each(|s| *s *= scale);
    }
}

/// In-place softmax; returns log of the partition function.
fn softmax(scores: &mut [f64]) -> f64 {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        z += *s;
    }
    scores.iter_mut().for_each(|s| *s /= z);
    max + z.ln()
}

/// Regularized multinomial logistic objective over an example set.
pub struct LogisticObjective<'a> {
    pub examples: &'a ExampleSet,
    pub num_features: usize,
    pub num_labels: usize,
    pub l2: f64,
}

impl LogisticObjective<'_> {
    pub fn loss(&self, weights: &[f64]) -> f64 {
        let mut scores = vec![0.0; self.num_labels];
        let mut nll = 0.0;
        for i in 0..self.examples.len() {
            scores_into(weights, self.examples.features(i), self.num_labels, 1.0, &mut scores);
            let gold = scores[self.examples.label(i)];
            let log_z = softmax(&mut scores);
            nll += log_z - gold;
        }
        let n = self.examples.len().max(1) as f64;
        nll / n + 0.5 * self.l2 * weights.iter().map(|w| w * w).sum::<f64>()
    }

    pub fn gradient(&self, weights: &[f64]) -> Vec<f64> {
        let mut grad: Vec<f64> = weights.iter().map(|w| self.l2 * w).collect();
        let indices: Vec<usize> = (0..self.examples.len()).collect();
        self.accumulate_nll_gradient(weights, &indices, &mut grad);
        grad
    }

    // Adds mean_{i in batch} d(-log p)/dw to `grad`.
    fn accumulate_nll_gradient(&self, weights: &[f64], batch: &[usize], grad: &mut [f64]) {
        let l = self.num_labels;
        let n = batch.len().max(1) as f64;
        let mut probs = vec![0.0; l];
        for &i in batch {
            let feats = self.examples.features(i);
            scores_into(weights, feats, l, 1.0, &mut probs);
            softmax(&mut probs);
            probs[self.examples.label(i)] -= 1.0;
            for &f in feats {
                let row = &mut grad[f as usize * l..(f as usize + 1) * l];
                for (g, p) in row.iter_mut().zip(&probs) {
                    *g += p / n;
                }
            }
        }
    }
}

/// Per-epoch regularized loss recorded during logistic training.
pub type LossTrace = Vec<f64>;

pub(super) fn fit(
    examples: &ExampleSet,
    num_features: usize,
    num_labels: usize,
    cfg: &TrainConfig,
) -> (Vec<f64>, LossTrace) {
    match cfg.loss {
        Loss::Logistic => match cfg.batch_size {
            Some(1) => sgd(examples, num_features, num_labels, cfg),
            batch => minibatch(examples, num_features, num_labels, cfg, batch),
        },
        Loss::AveragedPerceptron => (perceptron(examples, num_features, num_labels, cfg), Vec::new()),
    }
}

fn epoch_order(rng: &mut ChaCha8Rng, n: usize, shuffle: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    if shuffle {
        order.shuffle(rng);
    }
    order
}

// Online SGD. The weight vector is kept as `scale * v` so the L2 shrink
// step touches one number instead of every weight.
fn sgd(
    examples: &ExampleSet,
    num_features: usize,
    num_labels: usize,
    cfg: &TrainConfig,
) -> (Vec<f64>, LossTrace) {
    let l = num_labels;
    let mut v = vec![0.0; num_features * l];
    let mut scale = 1.0;
    let mut probs = vec![0.0; l];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut trace = Vec::with_capacity(cfg.epochs);
    let objective = LogisticObjective {
        examples,
        num_features,
        num_labels,
        l2: cfg.l2,
    };
    let shrink = 1.0 - cfg.learning_rate * cfg.l2;
    for _ in 0..cfg.epochs {
        for i in epoch_order(&mut rng, examples.len(), cfg.shuffle) {
            let feats = examples.features(i);
            scores_into(&v, feats, l, scale, &mut probs);
            softmax(&mut probs);
            probs[examples.label(i)] -= 1.0;
            if shrink != 1.0 {
                scale *= shrink;
            }
            let step = cfg.learning_rate / scale;
            for &f in feats {
                let row = &mut v[f as usize * l..(f as usize + 1) * l];
                for (w, g) in row.iter_mut().zip(&probs) {
                    *w -= step * g;
                }
            }
            if scale < 1e-9 {
                v.iter_mut().for_each(|w| *w *= scale);
                scale = 1.0;
            }
        }
        if cfg.record_loss {
            let w: Vec<f64> = v.iter().map(|x| x * scale).collect();
            trace.push(objective.loss(&w));
        }
    }
    v.iter_mut().for_each(|w| *w *= scale);
    (v, trace)
}

// Mini-batch (or full-batch when `batch` is None) gradient descent with a
// dense L2 step.
fn minibatch(
    examples: &ExampleSet,
    num_features: usize,
    num_labels: usize,
    cfg: &TrainConfig,
    batch: Option<usize>,
) -> (Vec<f64>, LossTrace) {
    let objective = LogisticObjective {
        examples,
        num_features,
        num_labels,
        l2: cfg.l2,
    };
    let mut w = vec![0.0; num_features * num_labels];
    let mut grad = vec![0.0; w.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut trace = Vec::with_capacity(cfg.epochs);
    let size = batch.unwrap_or(examples.len()).max(1);
    for _ in 0..cfg.epochs {
        let order = epoch_order(&mut rng, examples.len(), cfg.shuffle && batch.is_some());
        for chunk in order.chunks(size) {
            for (g, x) in grad.iter_mut().zip(&w) {
                *g = cfg.l2 * x;
            }
            objective.accumulate_nll_gradient(&w, chunk, &mut grad);
            for (x, g) in w.iter_mut().zip(&grad) {
                *x -= cfg.learning_rate * g;
            }
        }
        if cfg.record_loss {
            trace.push(objective.loss(&w));
        }
    }
    (w, trace)
}

fn perceptron(
    examples: &ExampleSet,
    num_features: usize,
    num_labels: usize,
    cfg: &TrainConfig,
) -> Vec<f64> {
    let l = num_labels;
    let size = num_features * l;
    let mut w = vec![0.0; size];
    let mut totals = vec![0.0; size];
    let mut stamps = vec![0u64; size];
    let mut scores = vec![0.0; l];
    let mut clock: u64 = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut update = |w: &mut [f64], idx: usize, delta: f64, clock: u64| {
        totals[idx] += (clock - stamps[idx]) as f64 * w[idx];
        stamps[idx] = clock;
        w[idx] += delta;
    };

    for _ in 0..cfg.epochs {
        for i in epoch_order(&mut rng, examples.len(), cfg.shuffle) {
            clock += 1;
            let feats = examples.features(i);
            scores_into(&w, feats, l, 1.0, &mut scores);
            let guess = super::argmax(&scores);
            let gold = examples.label(i);
            if guess != gold {
                for &f in feats {
                    let base = f as usize * l;
                    update(&mut w, base + gold, 1.0, clock);
                    update(&mut w, base + guess, -1.0, clock);
                }
            }
        }
    }
    for idx in 0..size {
        totals[idx] += (clock - stamps[idx]) as f64 * w[idx];
    }
    let denom = clock.max(1) as f64;
    totals.iter().map(|t| t / denom).collect()
}
