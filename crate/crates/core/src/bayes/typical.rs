//! Typical-set bounds and the novelty test built on them.
//!
//! The bounds at level `ℓ` bracket `2^(-tH̄)` by a factor `ℓ` on each side.
//! Membership tests widen the slack with `t` (level `ℓ^t`), so a sequence is
//! typical when its per-symbol surprisal lies within `-log2 ℓ` of the
//! entropy rate.

use serde::{Deserialize, Serialize};

use super::{BayesError, HypothesisSet};
use crate::process::{rate_divergences, ProcessSpec};

fn check_level(level: f64) -> Result<(), BayesError> {
    if level > 0.0 && level <= 1.0 {
        Ok(())
    } else {
        Err(BayesError::Level(level))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypicalBounds {
    pub lower: f64,
    pub upper: f64,
    pub log2_lower: f64,
    pub log2_upper: f64,
}

/// `(2^(-tH̄ + log2 ℓ), 2^(-tH̄ - log2 ℓ))`.
pub fn typical_set_bounds(
    spec: &ProcessSpec,
    t: usize,
    level: f64,
) -> Result<TypicalBounds, BayesError> {
    check_level(level)?;
    let h = spec.entropy_rate()?;
    Ok(bounds_from(h, t, level))
}

fn bounds_from(h: f64, t: usize, level: f64) -> TypicalBounds {
    let centre = -(t as f64) * h;
    let slack = level.log2();
    let (log2_lower, log2_upper) = (centre + slack, centre - slack);
    TypicalBounds {
        lower: log2_lower.exp2(),
        upper: log2_upper.exp2(),
        log2_lower,
        log2_upper,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Typicality {
    Typical,
    /// Less probable than the lower bound.
    AtypicalImprobable,
    /// More probable than the upper bound.
    AtypicalProbable,
    /// Too few observations to judge.
    WarmUp,
}

/// Observations needed before a typicality judgement at `level` is trusted:
/// `⌈H̄ - log2 level⌉`.
pub fn warm_up(entropy_rate: f64, level: f64) -> usize {
    (entropy_rate - level.log2()).ceil().max(0.0) as usize
}

pub(crate) fn typical_membership_from_log2(
    log2_prob: f64,
    t: usize,
    entropy_rate: f64,
    level: f64,
    warm: usize,
) -> Typicality {
    if log2_prob == f64::NEG_INFINITY {
        return Typicality::AtypicalImprobable;
    }
    if t < warm {
        return Typicality::WarmUp;
    }
    let tf = t as f64;
    let excess = -log2_prob - tf * entropy_rate;
    let slack = -tf * level.log2();
    // sub-ulp rounding in the accumulated log-likelihood must not flip a boundary case
    let tol = 1e-9 * (1.0 + tf * entropy_rate);
    if excess > slack + tol {
        Typicality::AtypicalImprobable
    } else if excess < -slack - tol {
        Typicality::AtypicalProbable
    } else {
        Typicality::Typical
    }
}

/// Classifies `observations` against the typical set of `spec` at level
/// `level^t`. Sequences impossible under `spec` are improbable at any length.
pub fn typical_membership(
    spec: &ProcessSpec,
    observations: &[usize],
    level: f64,
) -> Result<Typicality, BayesError> {
    check_level(level)?;
    spec.check_symbols(observations)?;
    let h = spec.entropy_rate()?;
    Ok(typical_membership_from_log2(
        spec.log2_prob(observations),
        observations.len(),
        h,
        level,
        warm_up(h, level),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FalsificationBounds {
    pub lower: f64,
    /// `None` when the entropy rate does not exceed the slack.
    pub upper: Option<f64>,
    pub cross_entropy_rate: f64,
    pub entropy_rate: f64,
    pub eps_q: f64,
}

/// Bracket `H⊗/(H̄ + ε_q) ≤ t ≤ H⊗/(H̄ - ε_q)` on the observations needed to
/// reject `hypothesis` when data come from `ideal`, with `ε_q = -log2 q`,
/// `H⊗` the per-symbol cross entropy and `H̄` the ideal's entropy rate.
pub fn falsification_bounds(
    ideal: &ProcessSpec,
    hypothesis: &ProcessSpec,
    q: f64,
) -> Result<FalsificationBounds, BayesError> {
    if q == 0.0 {
        return Err(BayesError::NonHalting);
    }
    check_level(q)?;
    let cross = rate_divergences(ideal, hypothesis)?.cross_entropy_rate;
    if !cross.is_finite() {
        return Err(BayesError::Config {
            field: "hypothesis",
            message: "cross-entropy rate against the ideal is infinite".into(),
        });
    }
    let h = ideal.entropy_rate()?;
    let eps = -q.log2();
    let ratio = |num: f64, den: f64| {
        if den > 0.0 {
            num / den
        } else if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    Ok(FalsificationBounds {
        lower: ratio(cross, h + eps),
        upper: (h > eps).then(|| ratio(cross, h - eps)),
        cross_entropy_rate: cross,
        entropy_rate: h,
        eps_q: eps,
    })
}

/// Bracket for rejecting every member: the largest member bracket on each
/// side, unbounded above if any member's is.
pub fn set_falsification_bounds(
    ideal: &ProcessSpec,
    set: &HypothesisSet,
    q: f64,
) -> Result<(f64, Option<f64>), BayesError> {
    let mut lower = 0.0f64;
    let mut upper = Some(0.0f64);
    for m in set.members() {
        let b = falsification_bounds(ideal, m, q)?;
        lower = lower.max(b.lower);
        upper = match (upper, b.upper) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
    }
    Ok((lower, upper))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypicalBoundsRow {
    pub t: usize,
    pub verify_lower: f64,
    pub verify_upper: f64,
    pub falsify_lower: f64,
    pub falsify_upper: f64,
}

/// Typical-set thresholds at the verification level `p` and falsification
/// level `q` for `t = 1..=t_max`. With `q < p` the `q` band strictly contains
/// the `p` band; the gap between them is the undetermined region.
pub fn typical_bounds_table(
    spec: &ProcessSpec,
    p: f64,
    q: f64,
    t_max: usize,
) -> Result<Vec<TypicalBoundsRow>, BayesError> {
    check_level(p)?;
    check_level(q)?;
    if q > p {
        return Err(BayesError::Config {
            field: "q",
            message: format!("q = {q} exceeds p = {p}"),
        });
    }
    let h = spec.entropy_rate()?;
    Ok((1..=t_max)
        .map(|t| {
            let v = bounds_from(h, t, p);
            let f = bounds_from(h, t, q);
            TypicalBoundsRow {
                t,
                verify_lower: v.lower,
                verify_upper: v.upper,
                falsify_lower: f.lower,
                falsify_upper: f.upper,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn bern(p: f64) -> ProcessSpec {
        ProcessSpec::bernoulli(p).unwrap()
    }

    #[test]
    fn fair_bit_bounds() {
        let b = typical_set_bounds(&bern(0.5), 1, 0.7).unwrap();
        assert_abs_diff_eq!(b.lower, 0.35, epsilon = 1e-15);
        assert_abs_diff_eq!(b.upper, 0.5 / 0.7, epsilon = 1e-15);
        let b = typical_set_bounds(&bern(0.3), 5, 1.0).unwrap();
        assert_eq!(b.lower, b.upper);
        assert!(typical_set_bounds(&bern(0.5), 1, 0.0).is_err());
        assert!(typical_set_bounds(&bern(0.5), 1, 1.5).is_err());
    }

    #[test]
    fn membership_examples() {
        let fair = bern(0.5);
        for level in [0.01, 0.5, 1.0] {
            assert_eq!(
                typical_membership(&fair, &[0; 50], level).unwrap(),
                Typicality::Typical
            );
        }
        assert_eq!(
            typical_membership(&bern(0.1), &[1; 100], 0.6).unwrap(),
            Typicality::AtypicalImprobable
        );
        assert_eq!(
            typical_membership(&bern(0.1), &[0; 100], 0.9).unwrap(),
            Typicality::AtypicalProbable
        );
        assert_eq!(
            typical_membership(&bern(0.1), &[1], 0.6).unwrap(),
            Typicality::WarmUp
        );
        assert_eq!(
            typical_membership(&bern(0.0), &[1], 0.6).unwrap(),
            Typicality::AtypicalImprobable
        );
    }

    #[test]
    fn falsification_examples() {
        let b = falsification_bounds(&bern(0.5), &bern(0.9), 0.5).unwrap();
        assert_abs_diff_eq!(b.cross_entropy_rate, 1.7369655941662062, epsilon = 1e-12);
        assert_abs_diff_eq!(b.lower, 1.7369655941662062 / 2.0, epsilon = 1e-12);
        assert_eq!(b.upper, None);
        let b = falsification_bounds(&bern(0.3), &bern(0.3), 1.0).unwrap();
        assert_eq!(Some(b.lower), b.upper);
        assert_abs_diff_eq!(b.lower, 1.0, epsilon = 1e-12);
        let b = falsification_bounds(&bern(0.3), &bern(0.3), 0.9).unwrap();
        assert!(b.lower <= 1.0 && b.upper.unwrap() >= 1.0);
        assert_eq!(
            falsification_bounds(&bern(0.5), &bern(0.9), 0.0),
            Err(BayesError::NonHalting)
        );
        assert!(falsification_bounds(&bern(0.5), &bern(1.0), 0.5).is_err());
    }

    #[test]
    fn table_has_undetermined_band() {
        let rows = typical_bounds_table(&bern(0.5), 0.7, 0.6, 10).unwrap();
        assert_eq!(rows.len(), 10);
        for r in &rows {
            assert!(r.falsify_lower < r.verify_lower && r.verify_upper < r.falsify_upper);
        }
        assert!(typical_bounds_table(&bern(0.5), 0.6, 0.7, 10).is_err());
    }

    proptest! {
        #[test]
        fn bounds_decay_geometrically(p in 0.01f64..0.99, t in 0usize..200, level in 0.01f64..=1.0) {
            let spec = bern(p);
            let h = spec.entropy_rate().unwrap();
            let a = typical_set_bounds(&spec, t, level).unwrap();
            let b = typical_set_bounds(&spec, t + 1, level).unwrap();
            prop_assert!(a.lower <= a.upper);
            prop_assert!((b.log2_lower - a.log2_lower + h).abs() < 1e-9);
            prop_assert!((b.log2_upper - a.log2_upper + h).abs() < 1e-9);
        }
    }
}
