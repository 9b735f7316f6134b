use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::ClassLabels;
use crate::error::{Error, Result};

/// Ordered `(train, test)` index pairs. Both sides are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    splits: Vec<(Vec<usize>, Vec<usize>)>,
}

impl SplitPlan {
    /// Builds a plan from explicit pairs; each side is sorted.
    pub fn new(splits: Vec<(Vec<usize>, Vec<usize>)>) -> Self {
        let splits = splits
            .into_iter()
            .map(|(mut tr, mut te)| {
                tr.sort_unstable();
                te.sort_unstable();
                (tr, te)
            })
            .collect();
        SplitPlan { splits }
    }

    /// Plan whose test sets are `folds` and train sets their complements in `0..n`.
    fn from_test_sets(n: usize, folds: Vec<Vec<usize>>) -> Self {
        let splits = folds
            .into_iter()
            .map(|mut test| {
                test.sort_unstable();
                let mut in_test = vec![false; n];
                test.iter().for_each(|&i| in_test[i] = true);
                let train = (0..n).filter(|&i| !in_test[i]).collect();
                (train, test)
            })
            .collect();
        SplitPlan { splits }
    }

    pub fn len(&self) -> usize {
        self.splits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.splits.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], &[usize])> + '_ {
        self.splits.iter().map(|(a, b)| (a.as_slice(), b.as_slice()))
    }

    pub fn split(&self, i: usize) -> (&[usize], &[usize]) {
        let (a, b) = &self.splits[i];
        (a, b)
    }

    pub fn test_sets(&self) -> Vec<&[usize]> {
        self.splits.iter().map(|(_, t)| t.as_slice()).collect()
    }

    pub(crate) fn check_range(&self, n: usize) -> Result<()> {
        for (s, (train, test)) in self.splits.iter().enumerate() {
            if let Some(&bad) = train.iter().chain(test).find(|&&i| i >= n) {
                return Err(Error::ShapeMismatch(format!(
                    "split {s} references index {bad} but only {n} samples exist"
                )));
            }
            if train.is_empty() || test.is_empty() {
                return Err(Error::ShapeMismatch(format!("split {s} has an empty side")));
            }
        }
        Ok(())
    }
}

fn permutation(n: usize, shuffle: bool, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    if shuffle {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    order
}

/// Fold sizes for `n` items in `k` folds, larger folds first.
fn fold_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|f| n / k + usize::from(f < n % k)).collect()
}

/// K-fold splitting. Unshuffled folds are contiguous index ranges.
pub fn kfold(n: usize, k: usize, shuffle: bool, seed: u64) -> Result<SplitPlan> {
    if k < 2 || k > n {
        return Err(Error::BadK { n, k });
    }
    let order = permutation(n, shuffle, seed);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for size in fold_sizes(n, k) {
        folds.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(SplitPlan::from_test_sets(n, folds))
}

pub fn leave_one_out(n: usize) -> Result<SplitPlan> {
    if n < 2 {
        return Err(Error::BadK { n, k: n });
    }
    Ok(SplitPlan::from_test_sets(n, (0..n).map(|i| vec![i]).collect()))
}

/// K-fold splitting that balances every class across folds.
///
/// Each class is cut into `k` contiguous chunks whose sizes differ by at
/// most one; the folds receiving the larger chunks rotate from class to
/// class so total fold sizes also stay within one. A single class
/// reproduces [`kfold`].
pub fn stratified_kfold(y: &ClassLabels, k: usize, shuffle: bool, seed: u64) -> Result<SplitPlan> {
    let n = y.len();
    if k < 2 || k > n {
        return Err(Error::BadK { n, k });
    }
    let counts = y.counts();
    for code in y.present_codes() {
        if counts[code] < k {
            return Err(Error::ClassTooSmall {
                class: y.classes()[code].clone(),
                count: counts[code],
                k,
            });
        }
    }
    let order = permutation(n, shuffle, seed);
    let mut folds = vec![Vec::new(); k];
    let mut offset = 0;
    for code in y.present_codes() {
        let members: Vec<usize> = order.iter().copied().filter(|&i| y.codes()[i] == code).collect();
        let (base, extra) = (members.len() / k, members.len() % k);
        let mut start = 0;
        for (f, fold) in folds.iter_mut().enumerate() {
            let gets_extra = (f + k - offset) % k < extra;
            let size = base + usize::from(gets_extra);
            fold.extend_from_slice(&members[start..start + size]);
            start += size;
        }
        offset = (offset + extra) % k;
    }
    Ok(SplitPlan::from_test_sets(n, folds))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contiguous_halves() {
        let plan = kfold(4, 2, false, 0).unwrap();
        assert_eq!(plan.test_sets(), vec![&[0, 1][..], &[2, 3][..]]);
        assert_eq!(plan.split(0).0, &[2, 3]);
    }

    #[test]
    fn remainder_goes_to_first_folds() {
        let plan = kfold(5, 2, false, 0).unwrap();
        let sizes: Vec<usize> = plan.test_sets().iter().map(|t| t.len()).collect();
        assert_eq!(sizes, vec![3, 2]);
    }

    #[test]
    fn bad_k() {
        assert_eq!(kfold(3, 1, false, 0).unwrap_err(), Error::BadK { n: 3, k: 1 });
        assert_eq!(kfold(3, 4, false, 0).unwrap_err(), Error::BadK { n: 3, k: 4 });
        assert!(leave_one_out(1).is_err());
    }

    #[test]
    fn loo_matches_kfold_n() {
        let loo = leave_one_out(3).unwrap();
        assert_eq!(loo.test_sets(), vec![&[0][..], &[1][..], &[2][..]]);
        assert_eq!(loo, kfold(3, 3, false, 0).unwrap());
        assert!(loo.iter().all(|(tr, _)| tr.len() == 2));
    }

    #[test]
    fn stratified_small_example() {
        let y = ClassLabels::from_ids(["a", "a", "b", "b"]);
        let plan = stratified_kfold(&y, 2, false, 0).unwrap();
        for test in plan.test_sets() {
            let ids: Vec<&str> = test.iter().map(|&i| y.id(i)).collect();
            assert_eq!(ids, vec!["a", "b"]);
        }
    }

    #[test]
    fn stratified_single_class_is_kfold() {
        let y = ClassLabels::from_ids(["z"; 7]);
        for k in 2..=7 {
            assert_eq!(stratified_kfold(&y, k, false, 0).unwrap(), kfold(7, k, false, 0).unwrap());
            assert_eq!(stratified_kfold(&y, k, true, 9).unwrap(), kfold(7, k, true, 9).unwrap());
        }
    }

    #[test]
    fn stratified_three_balanced_classes() {
        let ids: Vec<String> = (0..30).map(|i| format!("c{}", i % 3)).collect();
        let y = ClassLabels::from_ids(&ids);
        let plan = stratified_kfold(&y, 5, true, 4).unwrap();
        for test in plan.test_sets() {
            let mut hist = [0; 3];
            test.iter().for_each(|&i| hist[y.codes()[i]] += 1);
            assert_eq!(hist, [2, 2, 2]);
        }
    }

    #[test]
    fn class_too_small() {
        let y = ClassLabels::from_ids(["a", "a", "a", "b"]);
        assert!(matches!(
            stratified_kfold(&y, 2, false, 0),
            Err(Error::ClassTooSmall { count: 1, k: 2, .. })
        ));
    }
}
