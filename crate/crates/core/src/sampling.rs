//! Seeded shuffling and splitting. All randomness in the crate comes from
//! here so that a seed fully determines every run.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn shuffled_indices(n: usize, rng: &mut Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx
}

/// Splits `0..n` into (train, test) index lists. The test share is
/// `round(n * test_fraction)`, kept to at least one item on each side when
/// `n >= 2` and `test_fraction > 0`. Both lists are returned sorted.
pub fn holdout_split(n: usize, test_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut n_test = (n as f64 * test_fraction).round() as usize;
    if n >= 2 && test_fraction > 0.0 {
        n_test = n_test.clamp(1, n - 1);
    }
    n_test = n_test.min(n);
    let idx = shuffled_indices(n, &mut rng(seed));
    let mut test = idx[..n_test].to_vec();
    let mut train = idx[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    (train, test)
}

/// Assigns each of `n` items to one of `k` folds; fold sizes differ by at
/// most one.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let idx = shuffled_indices(n, &mut rng(seed));
    let mut folds = vec![0; n];
    for (pos, item) in idx.into_iter().enumerate() {
        folds[item] = pos % k;
    }
    folds
}

/// Like [`fold_assignment`], but deals items out class by class so every
/// fold gets a near-equal share of each class. Overall fold sizes still
/// differ by at most one.
pub fn stratified_folds(classes: &[usize], k: usize, seed: u64) -> Vec<usize> {
    let mut idx = shuffled_indices(classes.len(), &mut rng(seed));
    idx.sort_by_key(|&i| classes[i]);
    let mut folds = vec![0; classes.len()];
    for (pos, item) in idx.into_iter().enumerate() {
        folds[item] = pos % k;
    }
    folds
}
