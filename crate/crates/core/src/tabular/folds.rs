use rand_chacha::ChaCha8Rng;

use super::{DataError, Dataset};
use crate::rng;

/// Fold assignments for repeated stratified k-fold cross-validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub passes: usize,
    pub folds: usize,
    pub seed: u64,
    /// `assignments[pass][instance]` is the fold holding that instance.
    pub assignments: Vec<Vec<usize>>,
}

impl FoldPlan {
    pub fn test_indices(&self, pass: usize, fold: usize) -> Vec<usize> {
        self.assignments[pass]
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_indices(&self, pass: usize, fold: usize) -> Vec<usize> {
        self.assignments[pass]
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Stratified fold plan.
///
/// Each pass draws one permutation of the instances from a single ChaCha8
/// stream seeded with `seed` (passes consume the stream in order). Instances
/// are then listed class by class (class id ascending, permuted order within a
/// class) and dealt to folds round-robin, so per-class fold counts differ by at
/// most one and fold sizes stay balanced.
pub fn stratified_folds(ds: &Dataset, passes: usize, folds: usize, seed: u64) -> Result<FoldPlan, DataError> {
    check_shape(ds.instance_count(), passes, folds)?;
    let mut rng = rng::seeded(seed);
    let assignments = (0..passes)
        .map(|_| stratified_pass(ds.class_labels(), ds.class_count(), folds, &mut rng))
        .collect();
    Ok(FoldPlan {
        passes,
        folds,
        seed,
        assignments,
    })
}

pub(crate) fn check_shape(instances: usize, passes: usize, folds: usize) -> Result<(), DataError> {
    if folds < 2 {
        return Err(DataError::InvalidFolds(format!("folds must be at least 2, got {folds}")));
    }
    if passes < 1 {
        return Err(DataError::InvalidFolds("passes must be at least 1".into()));
    }
    if instances < folds {
        return Err(DataError::TooFewInstances { instances, folds });
    }
    Ok(())
}

pub(crate) fn stratified_pass(labels: &[u32], class_count: usize, folds: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let order = rng::permutation(rng, labels.len());
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); class_count];
    for i in order {
        by_class[labels[i] as usize].push(i);
    }
    let mut assignment = vec![0; labels.len()];
    for (slot, i) in by_class.into_iter().flatten().enumerate() {
        assignment[i] = slot % folds;
    }
    assignment
}
