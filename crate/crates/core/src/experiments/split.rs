//! Seeded train/test splitting.

use rand::Rng;

use crate::error::{Error, Result};
use crate::seeding;

/// Uniform random split without stratification.
///
/// The items are permuted by a seeded Fisher-Yates shuffle; the first
/// `round(n * train_fraction)` land in the training set (clamped so neither
/// side is empty) and the remainder in the test set. Deterministic given
/// the seed; both halves keep the shuffled order.
pub fn split_train_test<T: Clone>(
    items: &[T],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<T>, Vec<T>)> {
    if items.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 items to split, got {}",
            items.len()
        )));
    }
    if !(train_fraction.is_finite() && train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let n = items.len();
    let n_train = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = seeding::rng(seed);
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let train = order[..n_train].iter().map(|&i| items[i].clone()).collect();
    let test = order[n_train..].iter().map(|&i| items[i].clone()).collect();
    Ok((train, test))
}
