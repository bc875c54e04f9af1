//! Sample-complexity distributions for comparing two strings symbol by symbol
//! in a uniformly random order: without replacement over `L` positions of
//! which `K` differ, and the geometric limit for unbounded strings.

mod oracle;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

pub use oracle::{
    enumerate_orderings_oracle, mc_geometric_oracle, mc_pairwise_oracle, MAX_ENUMERATED_LENGTH,
};

/// Lengths up to which the pairwise formulas are evaluated as exact rationals
/// before converting to floating point.
pub const EXACT_LENGTH_LIMIT: usize = 20;
/// Truncation threshold for series moments.
pub const SERIES_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScError {
    #[error("K = {differing} exceeds L = {length}")]
    TooManyDiffering { length: usize, differing: usize },
    #[error("strings must be non-empty")]
    EmptyLength,
    #[error("K = 0: identical strings always need all L comparisons; use pairwise_verification")]
    Degenerate,
    #[error("p = 0: no comparison ever differs, so the comparison never halts")]
    NeverHalts,
    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("moment order must be at least 1")]
    MomentOrder,
    #[error("strings differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("length {0} exceeds the enumeration limit of {MAX_ENUMERATED_LENGTH}")]
    TooLong(usize),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("empirical distribution has no observations")]
    Empty,
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// `n! / m!` for `n >= m`.
fn falling(n: usize, m: usize) -> BigUint {
    (m as u64 + 1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn check_pairwise(length: usize, differing: usize) -> Result<(), ScError> {
    if length == 0 {
        return Err(ScError::EmptyLength);
    }
    if differing > length {
        return Err(ScError::TooManyDiffering { length, differing });
    }
    Ok(())
}

/// `P(i)` comparisons until the first differing pair, exactly.
///
/// For `1 <= i <= L-K` this is `(L-K)!/L! · ((L-i+1)!/(L-K-i+1)! − (L-i)!/(L-K-i)!)`;
/// the final point `i = L-K+1` carries the remaining mass `1/C(L, K)`.
/// Outside that support the probability is zero.
pub fn pairwise_pmf_exact(
    length: usize,
    differing: usize,
    i: usize,
) -> Result<BigRational, ScError> {
    check_pairwise(length, differing)?;
    if differing == 0 {
        return Err(ScError::Degenerate);
    }
    let (l, k) = (length, differing);
    if i == 0 || i > l - k + 1 {
        return Ok(BigRational::zero());
    }
    if i == l - k + 1 {
        return Ok(BigRational::one() - pairwise_cdf_exact(l, k, l - k)?);
    }
    let lead = ratio(factorial(l - k), factorial(l));
    let a = falling(l - i + 1, l - k - i + 1);
    let b = falling(l - i, l - k - i);
    Ok(lead * ratio(a - b, BigUint::one()))
}

/// `P(stop <= i) = 1 − (L-K)!(L-i)! / (L!(L-K-i)!)` for `0 <= i <= L-K`, and 1
/// from `L-K+1` on.
pub fn pairwise_cdf_exact(
    length: usize,
    differing: usize,
    i: usize,
) -> Result<BigRational, ScError> {
    check_pairwise(length, differing)?;
    if differing == 0 {
        return Err(ScError::Degenerate);
    }
    let (l, k) = (length, differing);
    if i > l - k {
        return Ok(BigRational::one());
    }
    let num = factorial(l - k) * factorial(l - i);
    let den = factorial(l) * factorial(l - k - i);
    Ok(BigRational::one() - ratio(num, den))
}

/// Floating-point [`pairwise_pmf_exact`]; exact rationals up to
/// [`EXACT_LENGTH_LIMIT`], log-factorials beyond.
pub fn pairwise_pmf(length: usize, differing: usize, i: usize) -> Result<f64, ScError> {
    if length <= EXACT_LENGTH_LIMIT {
        return Ok(to_f64(&pairwise_pmf_exact(length, differing, i)?));
    }
    check_pairwise(length, differing)?;
    if differing == 0 {
        return Err(ScError::Degenerate);
    }
    let (l, k) = (length, differing);
    if i == 0 || i > l - k + 1 {
        return Ok(0.0);
    }
    // P(i) = S(i-1) − S(i) with survival S(i) = (L-K)!(L-i)! / (L!(L-K-i)!)
    Ok(pairwise_survival_ln(l, k, i - 1).exp() - pairwise_survival_ln(l, k, i).exp())
}

fn pairwise_survival_ln(l: usize, k: usize, i: usize) -> f64 {
    if i > l - k {
        return f64::NEG_INFINITY;
    }
    ln_factorial(l - k) + ln_factorial(l - i) - ln_factorial(l) - ln_factorial(l - k - i)
}

pub fn pairwise_cdf(length: usize, differing: usize, i: usize) -> Result<f64, ScError> {
    if length <= EXACT_LENGTH_LIMIT {
        return Ok(to_f64(&pairwise_cdf_exact(length, differing, i)?));
    }
    check_pairwise(length, differing)?;
    if differing == 0 {
        return Err(ScError::Degenerate);
    }
    Ok(1.0 - pairwise_survival_ln(length, differing, i).exp())
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Point mass at `L`: equal strings need every comparison to be verified.
pub fn pairwise_verification(length: usize) -> Result<ScDist, ScError> {
    if length == 0 {
        return Err(ScError::EmptyLength);
    }
    Ok(ScDist::PointMass(length))
}

/// `(1-p)^(i-1) p`.
pub fn geometric_pmf(p: f64, i: usize) -> Result<f64, ScError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ScError::Probability(p));
    }
    if p == 0.0 {
        return Err(ScError::NeverHalts);
    }
    if i == 0 {
        return Ok(0.0);
    }
    Ok((1.0 - p).powi(i as i32 - 1) * p)
}

/// Comparisons until the first differing pair in random order over `L`
/// positions, `K` of which differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairwiseScDist {
    pub length: usize,
    pub differing: usize,
}

impl PairwiseScDist {
    pub fn new(length: usize, differing: usize) -> Result<Self, ScError> {
        check_pairwise(length, differing)?;
        Ok(Self { length, differing })
    }

    /// Largest possible stopping index.
    pub fn max_index(&self) -> usize {
        if self.differing == 0 {
            self.length
        } else {
            self.length - self.differing + 1
        }
    }

    pub fn pmf_exact(&self, i: usize) -> BigRational {
        if self.differing == 0 {
            return if i == self.length {
                BigRational::one()
            } else {
                BigRational::zero()
            };
        }
        pairwise_pmf_exact(self.length, self.differing, i).expect("validated")
    }

    pub fn cdf_exact(&self, i: usize) -> BigRational {
        if self.differing == 0 {
            return if i >= self.length {
                BigRational::one()
            } else {
                BigRational::zero()
            };
        }
        pairwise_cdf_exact(self.length, self.differing, i).expect("validated")
    }
}

/// Comparisons until the first differing pair when each comparison differs
/// independently with probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricScDist {
    pub p: f64,
}

impl GeometricScDist {
    pub fn new(p: f64) -> Result<Self, ScError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ScError::Probability(p));
        }
        Ok(Self { p })
    }

    pub fn pmf(&self, i: usize) -> Result<f64, ScError> {
        geometric_pmf(self.p, i)
    }

    pub fn cdf(&self, i: usize) -> Result<f64, ScError> {
        Ok(1.0 - self.survival(i)?)
    }

    /// `P(stop > i) = (1-p)^i`.
    pub fn survival(&self, i: usize) -> Result<f64, ScError> {
        if self.p == 0.0 {
            return Err(ScError::NeverHalts);
        }
        Ok((1.0 - self.p).powi(i as i32))
    }
}

/// Observed stopping indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EmpiricalScDist {
    counts: BTreeMap<usize, u64>,
    trials: u64,
}

impl EmpiricalScDist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, i: usize) {
        *self.counts.entry(i).or_default() += 1;
        self.trials += 1;
    }

    pub fn merge(&mut self, other: &EmpiricalScDist) {
        for (&i, &c) in &other.counts {
            *self.counts.entry(i).or_default() += c;
        }
        self.trials += other.trials;
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts.get(&i).copied().unwrap_or(0)
    }

    pub fn pmf_exact(&self, i: usize) -> BigRational {
        if self.trials == 0 {
            return BigRational::zero();
        }
        BigRational::new(self.count(i).into(), self.trials.into())
    }

    pub fn pmf(&self, i: usize) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.count(i) as f64 / self.trials as f64
    }

    pub fn max_index(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    /// Total variation distance to a reference law on the positive integers.
    /// Reference mass beyond the largest observed index is counted in full.
    pub fn total_variation(&self, reference: impl Fn(usize) -> f64) -> f64 {
        let Some(max) = self.max_index() else {
            return 1.0;
        };
        let mut diff = 0.0;
        let mut covered = 0.0;
        for i in 0..=max {
            let q = reference(i);
            covered += q;
            diff += (self.pmf(i) - q).abs();
        }
        0.5 * (diff + (1.0 - covered).max(0.0))
    }
}

/// Any of the stopping-index laws, for uniform moment and table queries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ScDist {
    Pairwise(PairwiseScDist),
    PointMass(usize),
    Geometric(GeometricScDist),
    Empirical(EmpiricalScDist),
}

/// `E[i^m]`: exact for finite supports, series truncated once the remaining
/// tail bound falls below [`SERIES_TOLERANCE`] for the geometric law.
pub fn dist_moments(dist: &ScDist, m: u32) -> Result<f64, ScError> {
    if let Some(exact) = dist_moments_exact(dist, m)? {
        return Ok(to_f64(&exact));
    }
    let ScDist::Geometric(g) = dist else {
        unreachable!("only the geometric law lacks an exact moment")
    };
    if g.p == 0.0 {
        return Err(ScError::NeverHalts);
    }
    if g.p == 1.0 {
        return Ok(1.0);
    }
    let q = 1.0 - g.p;
    let mut total = 0.0;
    let mut i = 1usize;
    loop {
        let term = (i as f64).powi(m as i32) * q.powi(i as i32 - 1) * g.p;
        total += term;
        // terms decay geometrically once i^m growth is dominated by q^i;
        // the tail after i is at most term · ratio / (1 − ratio)
        let ratio = ((i + 1) as f64 / i as f64).powi(m as i32) * q;
        if ratio < 1.0 && term * ratio / (1.0 - ratio) < SERIES_TOLERANCE * total.max(1.0) {
            return Ok(total);
        }
        i += 1;
    }
}

/// Exact rational moment for finite-support laws; `None` for the geometric law.
pub fn dist_moments_exact(dist: &ScDist, m: u32) -> Result<Option<BigRational>, ScError> {
    if m == 0 {
        return Err(ScError::MomentOrder);
    }
    let pow = |i: usize| BigRational::from_integer(num_bigint::BigInt::from(i).pow(m));
    Ok(match dist {
        ScDist::PointMass(l) => Some(pow(*l)),
        ScDist::Pairwise(d) => Some(
            (1..=d.max_index())
                .map(|i| pow(i) * d.pmf_exact(i))
                .fold(BigRational::zero(), |a, b| a + b),
        ),
        ScDist::Empirical(e) => {
            if e.trials == 0 {
                return Err(ScError::Empty);
            }
            Some(
                e.counts
                    .keys()
                    .map(|&i| pow(i) * e.pmf_exact(i))
                    .fold(BigRational::zero(), |a, b| a + b),
            )
        }
        ScDist::Geometric(g) => {
            if g.p == 0.0 {
                return Err(ScError::NeverHalts);
            }
            None
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub i: usize,
    pub pmf: f64,
    pub cdf: f64,
}

/// `(i, pmf, cdf)` rows. Finite laws cover their support; the geometric law
/// runs until its CDF is within [`SERIES_TOLERANCE`] of 1 or `max_rows` rows.
pub fn pmf_table(dist: &ScDist, max_rows: usize) -> Result<Vec<TableRow>, ScError> {
    let mut rows = Vec::new();
    match dist {
        ScDist::Pairwise(d) => {
            for i in 1..=d.max_index() {
                rows.push(TableRow {
                    i,
                    pmf: to_f64(&d.pmf_exact(i)),
                    cdf: to_f64(&d.cdf_exact(i)),
                });
            }
        }
        ScDist::PointMass(l) => rows.push(TableRow {
            i: *l,
            pmf: 1.0,
            cdf: 1.0,
        }),
        ScDist::Geometric(g) => {
            for i in 1..=max_rows {
                let cdf = g.cdf(i)?;
                rows.push(TableRow {
                    i,
                    pmf: g.pmf(i)?,
                    cdf,
                });
                if 1.0 - cdf < SERIES_TOLERANCE {
                    break;
                }
            }
        }
        ScDist::Empirical(e) => {
            let mut cum = 0u64;
            for (&i, &c) in &e.counts {
                cum += c;
                rows.push(TableRow {
                    i,
                    pmf: c as f64 / e.trials as f64,
                    cdf: cum as f64 / e.trials as f64,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pmf_examples() {
        assert_eq!(pairwise_pmf_exact(4, 2, 1).unwrap(), q(1, 2));
        assert_eq!(pairwise_pmf_exact(4, 2, 2).unwrap(), q(1, 3));
        assert_eq!(pairwise_pmf_exact(4, 2, 3).unwrap(), q(1, 6));
        assert_eq!(pairwise_pmf_exact(4, 2, 4).unwrap(), q(0, 1));
        assert_eq!(pairwise_pmf_exact(4, 2, 0).unwrap(), q(0, 1));
        assert_eq!(pairwise_pmf_exact(4, 0, 1), Err(ScError::Degenerate));
        assert!(pairwise_pmf_exact(4, 5, 1).is_err());
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(pairwise_cdf_exact(2, 1, 1).unwrap(), q(1, 2));
        assert_eq!(pairwise_cdf_exact(4, 2, 2).unwrap(), q(5, 6));
        for l in 1..=8 {
            assert_eq!(pairwise_cdf_exact(l, l, 1).unwrap(), q(1, 1));
        }
    }

    #[test]
    fn verification_point_mass() {
        for l in [1, 5] {
            let d = pairwise_verification(l).unwrap();
            assert_eq!(d, ScDist::PointMass(l));
            assert_eq!(dist_moments(&d, 1).unwrap(), l as f64);
        }
        let d = ScDist::Pairwise(PairwiseScDist::new(5, 0).unwrap());
        assert_eq!(dist_moments_exact(&d, 1).unwrap().unwrap(), q(5, 1));
    }

    #[test]
    fn geometric_examples() {
        assert_eq!(geometric_pmf(0.5, 1).unwrap(), 0.5);
        assert_eq!(geometric_pmf(0.5, 3).unwrap(), 0.125);
        assert_eq!(geometric_pmf(1.0, 1).unwrap(), 1.0);
        assert_eq!(geometric_pmf(0.0, 1), Err(ScError::NeverHalts));
        let g = ScDist::Geometric(GeometricScDist::new(0.5).unwrap());
        assert_abs_diff_eq!(dist_moments(&g, 1).unwrap(), 2.0, epsilon = 1e-11);
        // E[i^2] = (2 − p)/p^2
        assert_abs_diff_eq!(dist_moments(&g, 2).unwrap(), 6.0, epsilon = 1e-10);
        let g = ScDist::Geometric(GeometricScDist::new(0.1).unwrap());
        assert_abs_diff_eq!(dist_moments(&g, 1).unwrap(), 10.0, epsilon = 1e-9);
        assert_abs_diff_eq!(dist_moments(&g, 2).unwrap(), 190.0, epsilon = 1e-8);
        let never = ScDist::Geometric(GeometricScDist::new(0.0).unwrap());
        assert_eq!(dist_moments(&never, 1), Err(ScError::NeverHalts));
    }

    #[test]
    fn pairwise_mean() {
        let d = ScDist::Pairwise(PairwiseScDist::new(4, 2).unwrap());
        assert_eq!(dist_moments_exact(&d, 1).unwrap().unwrap(), q(5, 3));
    }

    #[test]
    fn float_path_matches_exact_beyond_limit() {
        for l in [21usize, 25, 40] {
            for k in [1usize, 3, l / 2, l] {
                for i in 1..=l - k + 1 {
                    let exact = to_f64(&pairwise_pmf_exact(l, k, i).unwrap());
                    assert_abs_diff_eq!(pairwise_pmf(l, k, i).unwrap(), exact, epsilon = 1e-9);
                    let exact = to_f64(&pairwise_cdf_exact(l, k, i).unwrap());
                    assert_abs_diff_eq!(pairwise_cdf(l, k, i).unwrap(), exact, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn table_rows() {
        let rows = pmf_table(&ScDist::Pairwise(PairwiseScDist::new(4, 2).unwrap()), 0).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2].cdf, 1.0);
        let rows = pmf_table(&ScDist::Geometric(GeometricScDist::new(0.5).unwrap()), 1000).unwrap();
        assert!(rows.len() < 60);
    }

    proptest! {
        #[test]
        fn pmf_normalised_and_cdf_consistent(l in 1usize..=20, k_frac in 0.0f64..=1.0) {
            let k = ((l as f64 * k_frac).round() as usize).clamp(1, l);
            let mut cum = BigRational::zero();
            for i in 1..=l - k + 1 {
                let p = pairwise_pmf_exact(l, k, i).unwrap();
                prop_assert!(p >= BigRational::zero());
                cum += p;
                if i <= l - k {
                    prop_assert_eq!(&cum, &pairwise_cdf_exact(l, k, i).unwrap());
                }
            }
            prop_assert_eq!(cum, BigRational::one());
        }

        #[test]
        fn geometric_is_memoryless(p in 0.01f64..=1.0, s in 0usize..50, t in 0usize..50) {
            let g = GeometricScDist::new(p).unwrap();
            let surv = |n: usize| g.survival(n).unwrap();
            let lhs = if surv(s) > 0.0 { surv(s + t) / surv(s) } else { 0.0 };
            let rhs = if surv(s) > 0.0 { surv(t) } else { 0.0 };
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
