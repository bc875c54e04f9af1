use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::identify::BitString;

use super::{EmpiricalScDist, ScError};

/// Longest strings whose comparison orders are enumerated exhaustively.
pub const MAX_ENUMERATED_LENGTH: usize = 10;

fn differing_positions(a: &BitString, b: &BitString) -> Result<Vec<bool>, ScError> {
    if a.len() != b.len() {
        return Err(ScError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(ScError::EmptyLength);
    }
    Ok(a.bits().iter().zip(b.bits()).map(|(x, y)| x != y).collect())
}

fn stopping_index(order: &[usize], differs: &[bool]) -> usize {
    order
        .iter()
        .position(|&k| differs[k])
        .map_or(order.len(), |p| p + 1)
}

/// Visits all `ℓ!` comparison orders (Heap's algorithm) and records the index
/// of the first differing comparison, or `ℓ` when the strings are equal.
pub fn enumerate_orderings_oracle(
    a: &BitString,
    b: &BitString,
) -> Result<EmpiricalScDist, ScError> {
    let differs = differing_positions(a, b)?;
    let n = differs.len();
    if n > MAX_ENUMERATED_LENGTH {
        return Err(ScError::TooLong(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut dist = EmpiricalScDist::new();
    dist.record(stopping_index(&order, &differs));
    let mut c = vec![0usize; n];
    let mut k = 1;
    while k < n {
        if c[k] < k {
            if k % 2 == 0 {
                order.swap(0, k);
            } else {
                order.swap(c[k], k);
            }
            dist.record(stopping_index(&order, &differs));
            c[k] += 1;
            k = 1;
        } else {
            c[k] = 0;
            k += 1;
        }
    }
    Ok(dist)
}

/// Draws comparison orders uniformly at random without replacement.
pub fn mc_pairwise_oracle(
    a: &BitString,
    b: &BitString,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalScDist, ScError> {
    let differs = differing_positions(a, b)?;
    if trials == 0 {
        return Err(ScError::NoTrials);
    }
    let n = differs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dist = EmpiricalScDist::new();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..trials {
        let mut stop = n;
        for step in 0..n {
            let pick = rng.random_range(step..n);
            order.swap(step, pick);
            if differs[order[step]] {
                stop = step + 1;
                break;
            }
        }
        dist.record(stop);
    }
    Ok(dist)
}

/// Compares unbounded strings at fresh positions, each pair differing with
/// probability `p`, until the first difference.
pub fn mc_geometric_oracle(p: f64, trials: u64, seed: u64) -> Result<EmpiricalScDist, ScError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ScError::Probability(p));
    }
    if p == 0.0 {
        return Err(ScError::NeverHalts);
    }
    if trials == 0 {
        return Err(ScError::NoTrials);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dist = EmpiricalScDist::new();
    for _ in 0..trials {
        let mut i = 1;
        while !rng.random_bool(p) {
            i += 1;
        }
        dist.record(i);
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scdist::{pairwise_pmf, PairwiseScDist};
    use num_rational::BigRational;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn oracle_examples() {
        let d = enumerate_orderings_oracle(&bs("00"), &bs("01")).unwrap();
        assert_eq!(d.pmf_exact(1), BigRational::new(1.into(), 2.into()));
        assert_eq!(d.pmf_exact(2), BigRational::new(1.into(), 2.into()));
        let d = enumerate_orderings_oracle(&bs("0101"), &bs("0101")).unwrap();
        assert_eq!((d.count(4), d.trials()), (24, 24));
        let d = enumerate_orderings_oracle(&bs("0000"), &bs("1111")).unwrap();
        assert_eq!(d.count(1), 24);
        assert!(enumerate_orderings_oracle(&bs("0"), &bs("01")).is_err());
        assert!(enumerate_orderings_oracle(&bs("00000000000"), &bs("00000000000")).is_err());
    }

    #[test]
    fn enumeration_visits_every_order_once() {
        let d = enumerate_orderings_oracle(&bs("0000000"), &bs("0110100")).unwrap();
        assert_eq!(d.trials(), 5040);
        let exact = PairwiseScDist::new(7, 3).unwrap();
        for i in 1..=5 {
            assert_eq!(d.pmf_exact(i), exact.pmf_exact(i));
        }
    }

    #[test]
    fn monte_carlo_is_seeded_and_close() {
        let (a, b) = (bs("0000"), bs("0011"));
        assert_eq!(
            mc_pairwise_oracle(&a, &b, 1000, 5).unwrap(),
            mc_pairwise_oracle(&a, &b, 1000, 5).unwrap()
        );
        let d = mc_pairwise_oracle(&a, &b, 100_000, 5).unwrap();
        assert!(d.total_variation(|i| pairwise_pmf(4, 2, i).unwrap()) < 0.01);
        assert_eq!(mc_pairwise_oracle(&a, &b, 0, 5), Err(ScError::NoTrials));
        assert_eq!(mc_geometric_oracle(0.0, 10, 5), Err(ScError::NeverHalts));
    }
}
