use rand::seq::SliceRandom;

use crate::nn::init::seeded_rng;

use super::DataError;

/// K-fold assignment: a seeded shuffle followed by round-robin fold labels,
/// so fold sizes differ by at most one and every episode lands in exactly
/// one fold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    assignments: Vec<usize>,
    pub k: usize,
    pub seed: u64,
}

pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldPlan, DataError> {
    if k < 2 {
        return Err(DataError::Config(format!("k must be at least 2, got {k}")));
    }
    if n < k {
        return Err(DataError::Config(format!("need at least k={k} episodes, got {n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded_rng(seed));
    let mut assignments = vec![0usize; n];
    for (pos, &idx) in order.iter().enumerate() {
        assignments[idx] = pos % k;
    }
    Ok(FoldPlan {
        assignments,
        k,
        seed,
    })
}

impl FoldPlan {
    /// Fold index per episode.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// Episode indices held out for validation in `fold`.
    pub fn validation_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    /// Episode indices used for training in `fold`.
    pub fn training_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_split_has_equal_folds() {
        let plan = kfold_split(10, 5, 3).unwrap();
        assert_eq!(plan.fold_sizes(), vec![2; 5]);
    }

    #[test]
    fn remainder_spreads_by_one() {
        let plan = kfold_split(11, 5, 3).unwrap();
        let mut sizes = plan.fold_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 2, 3]);
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(kfold_split(23, 4, 7).unwrap(), kfold_split(23, 4, 7).unwrap());
        assert_ne!(
            kfold_split(23, 4, 7).unwrap().assignments(),
            kfold_split(23, 4, 8).unwrap().assignments()
        );
    }

    #[test]
    fn coverage_is_exact() {
        let plan = kfold_split(17, 5, 1).unwrap();
        let mut seen = vec![false; 17];
        for fold in 0..5 {
            for i in plan.validation_indices(fold) {
                assert!(!seen[i], "episode {i} in two folds");
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        // Train/validation partition per fold.
        for fold in 0..5 {
            let train = plan.training_indices(fold);
            let val = plan.validation_indices(fold);
            assert_eq!(train.len() + val.len(), 17);
            assert!(train.iter().all(|i| !val.contains(i)));
        }
    }

    #[test]
    fn too_few_episodes_is_config_error() {
        assert!(matches!(kfold_split(3, 5, 0), Err(DataError::Config(_))));
        assert!(matches!(kfold_split(10, 1, 0), Err(DataError::Config(_))));
    }
}
