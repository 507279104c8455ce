use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CorpusError, TaggedCorpus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FoldMode {
    /// Sentences are shuffled with the seed before being cut into folds.
    #[default]
    Shuffled,
    /// Folds are contiguous blocks in corpus order; the seed is unused.
    Contiguous,
}

/// Assignment of every sentence index to exactly one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub mode: FoldMode,
    assignments: Vec<usize>,
}

impl FoldPlan {
    /// Fold index of each sentence.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn fold_of(&self, sentence: usize) -> usize {
        self.assignments[sentence]
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    /// Held-out sentence indices of `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    /// Training sentence indices for `fold`, ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    /// `(train, test)` corpora for one fold.
    pub fn split(
        &self,
        corpus: &TaggedCorpus,
        fold: usize,
    ) -> Result<(TaggedCorpus, TaggedCorpus), CorpusError> {
        if fold >= self.k {
            return Err(CorpusError::FoldOutOfRange { fold, k: self.k });
        }
        let id = |part: &str| format!("{}#fold{}-{part}", corpus.source_id, fold + 1);
        Ok((
            corpus.select(&self.train_indices(fold), id("train")),
            corpus.select(&self.test_indices(fold), id("test")),
        ))
    }
}

/// Shuffled k-fold partition with fold sizes differing by at most one.
pub fn split_kfold(corpus: &TaggedCorpus, k: usize, seed: u64) -> Result<FoldPlan, CorpusError> {
    split_kfold_with(corpus.len(), k, seed, FoldMode::Shuffled)
}

pub fn split_kfold_with(
    sentences: usize,
    k: usize,
    seed: u64,
    mode: FoldMode,
) -> Result<FoldPlan, CorpusError> {
    if k < 2 {
        return Err(CorpusError::InvalidFoldCount(k));
    }
    if k > sentences {
        return Err(CorpusError::TooFewSentences { sentences, k });
    }
    let mut order: Vec<usize> = (0..sentences).collect();
    if mode == FoldMode::Shuffled {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
    }
    let (base, extra) = (sentences / k, sentences % k);
    let mut assignments = vec![0; sentences];
    let mut pos = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        for &sentence in &order[pos..pos + size] {
            assignments[sentence] = fold;
        }
        pos += size;
    }
    Ok(FoldPlan {
        k,
        seed,
        mode,
        assignments,
    })
}
