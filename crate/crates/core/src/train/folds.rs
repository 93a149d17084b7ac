use alloc::vec;
use alloc::vec::Vec;

use crate::text::Label;
use crate::{Error, Result, Rng};

/// `k` disjoint test folds covering every sample index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub folds: Vec<Vec<usize>>,
    /// `[real, fake]` counts per fold.
    pub class_counts: Vec<[usize; 2]>,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> &[usize] {
        &self.folds[fold]
    }

    /// Every index outside `fold`, ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .folds
            .iter()
            .enumerate()
            .filter(|(f, _)| *f != fold)
            .flat_map(|(_, idx)| idx.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        self.folds.iter().map(Vec::len).collect()
    }

    /// Checks that the folds partition `0..n`.
    pub fn verify_partition(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for idx in self.folds.iter().flatten() {
            if *idx >= n || seen[*idx] {
                return Err(Error::InvalidArgument(alloc::format!(
                    "fold plan is not a partition: index {idx} repeated or out of range"
                )));
            }
            seen[*idx] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidArgument(alloc::format!(
                "fold plan is not a partition: index {missing} missing"
            )));
        }
        Ok(())
    }
}

/// Stratified k-fold assignment.
///
/// Each class's indices are shuffled with a generator derived from `seed`,
/// then dealt round-robin over the folds. The deal for the fake class
/// continues where the real class stopped, so overall fold sizes also
/// differ by at most one.
pub fn stratified_kfold(labels: &[Label], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidArgument(alloc::format!("k must be at least 2, got {k}")));
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, l) in labels.iter().enumerate() {
        by_class[l.class_index()].push(i);
    }
    for (class, members) in by_class.iter().enumerate() {
        if members.len() < k {
            return Err(Error::ClassTooSmall {
                class: class as u8,
                count: members.len(),
                k,
            });
        }
    }
    let mut folds = vec![Vec::new(); k];
    let mut class_counts = vec![[0usize; 2]; k];
    let mut next = 0;
    for (class, members) in by_class.iter_mut().enumerate() {
        Rng::derive(seed, class as u64).shuffle(members);
        for &i in members.iter() {
            folds[next].push(i);
            class_counts[next][class] += 1;
            next = (next + 1) % k;
        }
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(FoldPlan { k, folds, class_counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(real: usize, fake: usize) -> Vec<Label> {
        let mut v = vec![Label::Real; real];
        v.extend(vec![Label::Fake; fake]);
        v
    }

    #[test]
    fn ten_balanced_samples() {
        let plan = stratified_kfold(&labels(5, 5), 5, 1).unwrap();
        assert_eq!(plan.fold_sizes(), vec![2; 5]);
        assert!(plan.class_counts.iter().all(|c| *c == [1, 1]));
        plan.verify_partition(10).unwrap();
    }

    #[test]
    fn seeded() {
        let l = labels(37, 41);
        assert_eq!(stratified_kfold(&l, 5, 9).unwrap(), stratified_kfold(&l, 5, 9).unwrap());
        assert_ne!(stratified_kfold(&l, 5, 9).unwrap(), stratified_kfold(&l, 5, 10).unwrap());
    }

    #[test]
    fn uneven_classes_stay_balanced() {
        for (r, f, k) in [(13, 29, 5), (7, 7, 3), (100, 3, 3), (11, 12, 4)] {
            let plan = stratified_kfold(&labels(r, f), k, 0).unwrap();
            plan.verify_partition(r + f).unwrap();
            let sizes = plan.fold_sizes();
            assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            for c in 0..2 {
                let per: Vec<usize> = plan.class_counts.iter().map(|x| x[c]).collect();
                assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
            }
        }
    }

    #[test]
    fn too_few_per_class() {
        assert_eq!(
            stratified_kfold(&labels(10, 4), 5, 0),
            Err(Error::ClassTooSmall { class: 1, count: 4, k: 5 })
        );
        assert!(stratified_kfold(&labels(10, 10), 1, 0).is_err());
    }

    #[test]
    fn train_indices_complement_test() {
        let plan = stratified_kfold(&labels(6, 9), 3, 2).unwrap();
        for f in 0..3 {
            let train = plan.train_indices(f);
            assert_eq!(train.len() + plan.test_indices(f).len(), 15);
            assert!(plan.test_indices(f).iter().all(|i| !train.contains(i)));
        }
    }
}
