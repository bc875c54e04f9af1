//! Expected posterior surprisal of the true member as a function of the
//! number of observations, and the sample counts at which it first drops to
//! `-log2 p`.

use serde::{Deserialize, Serialize};

use super::enumerate::for_each_class;
use super::mc::mc_surprisal_samples;
use super::{equivalence_groups, log2_sum_exp2, BayesError, HypothesisSet};
use crate::info::{enumeration_size, ProbVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Largest horizon tried before giving up.
    pub max_t: usize,
    /// Sequences per Monte Carlo estimate when enumeration is refused.
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_t: 100_000,
            mc_samples: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvalMethod {
    Exact,
    /// `half_width` is the 95% half-width at the reported horizon.
    MonteCarlo {
        samples: usize,
        half_width: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ExpectedSampleComplexity {
    Reached {
        /// Linear interpolation between the last horizon above the threshold
        /// and the first at or below it.
        t: f64,
        integer_t: usize,
        method: EvalMethod,
    },
    /// The limiting expected surprisal stays above `-log2 p`, or the search
    /// ran out of horizon (`horizon` set).
    Unreachable {
        ceiling: f64,
        horizon: Option<usize>,
    },
}

/// Terms of the expected posterior surprisal at one horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluatorPoint {
    pub t: usize,
    /// `E[-log2 P(Θ_t = φ)]` under the ideal member `φ`.
    pub expected_surprisal: f64,
    /// `H⊗` between the ideal's sequence law and the prior predictive law.
    pub cross_entropy: f64,
    /// Entropy of the ideal's length-`t` sequences.
    pub block_entropy: f64,
    /// `-log2` of the ideal's prior mass.
    pub prior_surprisal: f64,
}

impl EvaluatorPoint {
    /// `prior surprisal + block entropy - cross entropy`, equal to
    /// `expected_surprisal` up to rounding.
    pub fn decomposed(&self) -> f64 {
        self.prior_surprisal + self.block_entropy - self.cross_entropy
    }
}

fn check_member(set: &HypothesisSet, ideal: usize, prior: &ProbVector) -> Result<(), BayesError> {
    set.check_prior(prior)?;
    if ideal >= set.len() {
        return Err(BayesError::NotMember(ideal));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<(), BayesError> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(BayesError::Config {
            field: "p",
            message: format!("{p} must lie in (0, 1]"),
        })
    }
}

struct Accumulated {
    /// Per member `φ`: expected surprisal, cross entropy, block entropy.
    per_member: Vec<[f64; 3]>,
}

fn accumulate(
    set: &HypothesisSet,
    prior: &ProbVector,
    t: usize,
    members: &[usize],
) -> Result<Accumulated, BayesError> {
    let specs: Vec<_> = set.members().iter().collect();
    let log_prior: Vec<f64> = prior.probs().iter().map(|p| p.log2()).collect();
    let mut per_member = vec![[0.0; 3]; members.len()];
    for_each_class(&specs, t, |log_mult, logp| {
        let mix = log2_sum_exp2(log_prior.iter().zip(logp).map(|(a, b)| a + b));
        for (acc, &phi) in per_member.iter_mut().zip(members) {
            if logp[phi] == f64::NEG_INFINITY {
                continue;
            }
            let w = (log_mult + logp[phi]).exp2();
            acc[0] += w * -(log_prior[phi] + logp[phi] - mix);
            acc[1] += w * -mix;
            acc[2] += w * -logp[phi];
        }
    })?;
    Ok(Accumulated { per_member })
}

/// Exact terms of the expected surprisal at horizon `t`.
pub fn evaluator_point(
    set: &HypothesisSet,
    ideal: usize,
    prior: &ProbVector,
    t: usize,
) -> Result<EvaluatorPoint, BayesError> {
    check_member(set, ideal, prior)?;
    let acc = accumulate(set, prior, t, &[ideal])?;
    let [expected_surprisal, cross_entropy, block_entropy] = acc.per_member[0];
    Ok(EvaluatorPoint {
        t,
        expected_surprisal,
        cross_entropy,
        block_entropy,
        prior_surprisal: -prior.get(ideal).log2(),
    })
}

/// `H(Θ | X^t)`: the prior-weighted expected posterior surprisal of the
/// member that generated the data.
pub fn predictive_conditional_entropy(
    set: &HypothesisSet,
    prior: &ProbVector,
    t: usize,
) -> Result<f64, BayesError> {
    set.check_prior(prior)?;
    let members: Vec<usize> = (0..set.len()).filter(|&m| prior.get(m) > 0.0).collect();
    let acc = accumulate(set, prior, t, &members)?;
    Ok(members
        .iter()
        .zip(&acc.per_member)
        .map(|(&m, a)| prior.get(m) * a[0])
        .sum())
}

/// An estimate of a nonincreasing curve at one horizon.
#[derive(Debug, Clone, Copy)]
struct CurvePoint {
    value: f64,
    method: EvalMethod,
}

fn search(
    start: f64,
    threshold: f64,
    ceiling: f64,
    max_t: usize,
    mut eval: impl FnMut(usize) -> Result<CurvePoint, BayesError>,
) -> Result<ExpectedSampleComplexity, BayesError> {
    if start <= threshold {
        return Ok(ExpectedSampleComplexity::Reached {
            t: 0.0,
            integer_t: 0,
            method: EvalMethod::Exact,
        });
    }
    if ceiling > threshold + 1e-12 {
        return Ok(ExpectedSampleComplexity::Unreachable {
            ceiling,
            horizon: None,
        });
    }
    let (mut lo, mut lo_value) = (0usize, start);
    let mut hi = 1usize;
    let mut hi_point = loop {
        let point = eval(hi)?;
        if point.value <= threshold {
            break point;
        }
        if hi >= max_t {
            return Ok(ExpectedSampleComplexity::Unreachable {
                ceiling,
                horizon: Some(max_t),
            });
        }
        lo = hi;
        lo_value = point.value;
        hi = (hi * 2).min(max_t);
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let point = eval(mid)?;
        if point.value <= threshold {
            hi = mid;
            hi_point = point;
        } else {
            lo = mid;
            lo_value = point.value;
        }
    }
    let span = lo_value - hi_point.value;
    let frac = if span > 0.0 {
        (lo_value - threshold) / span
    } else {
        1.0
    };
    Ok(ExpectedSampleComplexity::Reached {
        t: lo as f64 + frac.clamp(0.0, 1.0),
        integer_t: hi,
        method: hi_point.method,
    })
}

fn mc_point(samples: &[f64]) -> CurvePoint {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    CurvePoint {
        value: mean,
        method: EvalMethod::MonteCarlo {
            samples: samples.len(),
            half_width: 1.96 * (var / n).sqrt(),
        },
    }
}

/// Smallest horizon at which the expected posterior surprisal of `ideal`
/// drops to `-log2 p`. Exact enumeration is used whenever it is accepted,
/// Monte Carlo otherwise.
pub fn expected_sc_evaluator(
    set: &HypothesisSet,
    ideal: usize,
    prior: &ProbVector,
    p: f64,
    opts: &SearchOptions,
) -> Result<ExpectedSampleComplexity, BayesError> {
    check_member(set, ideal, prior)?;
    check_p(p)?;
    let threshold = -p.log2();
    let start = -prior.get(ideal).log2();
    let group = equivalence_groups(set, 0.0)?
        .into_iter()
        .find(|g| g.contains(&ideal))
        .expect("every member is grouped");
    let group_mass: f64 = group.iter().map(|&m| prior.get(m)).sum();
    let ceiling = -(prior.get(ideal) / group_mass).log2();
    search(
        start,
        threshold,
        ceiling,
        opts.max_t,
        |t| match evaluator_point(set, ideal, prior, t) {
            Ok(point) => Ok(CurvePoint {
                value: point.expected_surprisal,
                method: EvalMethod::Exact,
            }),
            Err(BayesError::HorizonTooLarge { .. }) => {
                let samples =
                    mc_surprisal_samples(set, ideal, prior, &[t], opts.mc_samples, opts.seed)?;
                Ok(mc_point(&samples[0]))
            }
            Err(e) => Err(e),
        },
    )
}

/// Smallest horizon at which `H(Θ | X^t)` drops to `-log2 p`, the
/// predictor-side counterpart of [`expected_sc_evaluator`] averaged over the
/// prior.
pub fn expected_sc_predictive(
    set: &HypothesisSet,
    prior: &ProbVector,
    p: f64,
    opts: &SearchOptions,
) -> Result<ExpectedSampleComplexity, BayesError> {
    set.check_prior(prior)?;
    check_p(p)?;
    let threshold = -p.log2();
    let start: f64 = prior
        .probs()
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|w| -w * w.log2())
        .sum();
    let ceiling: f64 = equivalence_groups(set, 0.0)?
        .iter()
        .map(|g| {
            let mass: f64 = g.iter().map(|&m| prior.get(m)).sum();
            g.iter()
                .map(|&m| prior.get(m))
                .filter(|&w| w > 0.0)
                .map(|w| -w * (w / mass).log2())
                .sum::<f64>()
        })
        .sum();
    search(
        start,
        threshold,
        ceiling,
        opts.max_t,
        |t| match predictive_conditional_entropy(set, prior, t) {
            Ok(value) => Ok(CurvePoint {
                value,
                method: EvalMethod::Exact,
            }),
            Err(BayesError::HorizonTooLarge { .. }) => {
                let mut value = 0.0;
                let mut var = 0.0;
                for m in (0..set.len()).filter(|&m| prior.get(m) > 0.0) {
                    let samples = mc_surprisal_samples(
                        set,
                        m,
                        prior,
                        &[t],
                        opts.mc_samples,
                        opts.seed ^ m as u64,
                    )?;
                    let point = mc_point(&samples[0]);
                    let w = prior.get(m);
                    value += w * point.value;
                    if let EvalMethod::MonteCarlo { half_width, .. } = point.method {
                        var += (w * half_width / 1.96).powi(2);
                    }
                }
                Ok(CurvePoint {
                    value,
                    method: EvalMethod::MonteCarlo {
                        samples: opts.mc_samples,
                        half_width: 1.96 * var.sqrt(),
                    },
                })
            }
            Err(e) => Err(e),
        },
    )
}

/// Raw moments `E[(-log2 P(Θ_t = φ))^m]` for `m = 1..=max_m`, by enumeration
/// of every length-`t` sequence weighted by the ideal's law.
pub fn surprisal_moments(
    set: &HypothesisSet,
    ideal: usize,
    prior: &ProbVector,
    t: usize,
    max_m: u32,
) -> Result<Vec<f64>, BayesError> {
    check_member(set, ideal, prior)?;
    enumeration_size(set.alphabet_size(), t).map_err(|_| BayesError::HorizonTooLarge {
        sequences: (set.alphabet_size() as f64).powi(t as i32),
        limit: crate::info::MAX_ENUMERATION,
    })?;
    let specs: Vec<_> = set.members().iter().collect();
    let log_prior: Vec<f64> = prior.probs().iter().map(|p| p.log2()).collect();
    let mut moments = vec![0.0; max_m as usize];
    for_each_class(&specs, t, |log_mult, logp| {
        if logp[ideal] == f64::NEG_INFINITY {
            return;
        }
        let mix = log2_sum_exp2(log_prior.iter().zip(logp).map(|(a, b)| a + b));
        // clamp the rounding residue when the posterior is 1
        let s = (mix - log_prior[ideal] - logp[ideal]).max(0.0);
        let w = (log_mult + logp[ideal]).exp2();
        let mut power = 1.0;
        for slot in moments.iter_mut() {
            power *= s;
            *slot += w * power;
        }
    })?;
    Ok(moments)
}

pub fn surprisal_moment(
    set: &HypothesisSet,
    ideal: usize,
    prior: &ProbVector,
    t: usize,
    m: u32,
) -> Result<f64, BayesError> {
    if m == 0 {
        return Err(BayesError::Config {
            field: "m",
            message: "moment order starts at 1".into(),
        });
    }
    Ok(surprisal_moments(set, ideal, prior, t, m)?[m as usize - 1])
}

/// A product-form expression for the `m`-th raw moment built from the prior
/// surprisal `I`, the block entropy, the cross entropy against the prior
/// predictive, and the unweighted surprisal totals `S = Σ_x -log2 P(x)` and
/// `Ŝ = Σ_x -log2 P̂(x)` over all length-`t` sequences:
///
/// `((-1)^(m+1) (H + I) + (-1)^m H⊗) · ((-1)^(m-1) (I^(m-1) + S^(m-1)) + (-1)^m Ŝ^(m-1))`
///
/// It agrees with [`surprisal_moments`] at `m = 1` only; kept as a
/// diagnostic.
pub fn closed_form_surprisal_moment(
    set: &HypothesisSet,
    ideal: usize,
    prior: &ProbVector,
    t: usize,
    m: u32,
) -> Result<f64, BayesError> {
    if m == 0 {
        return Err(BayesError::Config {
            field: "m",
            message: "moment order starts at 1".into(),
        });
    }
    let point = evaluator_point(set, ideal, prior, t)?;
    let specs: Vec<_> = set.members().iter().collect();
    let log_prior: Vec<f64> = prior.probs().iter().map(|p| p.log2()).collect();
    let (mut total, mut total_pred) = (0.0, 0.0);
    for_each_class(&specs, t, |log_mult, logp| {
        let mult = log_mult.exp2();
        let mix = log2_sum_exp2(log_prior.iter().zip(logp).map(|(a, b)| a + b));
        total += mult * -logp[ideal];
        total_pred += mult * -mix;
    })?;
    let sign = |k: i64| if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let mi = m as i64;
    let e = (m - 1) as i32;
    let first = sign(mi + 1) * (point.block_entropy + point.prior_surprisal)
        + sign(mi) * point.cross_entropy;
    let second = sign(mi - 1) * (point.prior_surprisal.powi(e) + total.powi(e))
        + sign(mi) * total_pred.powi(e);
    Ok(first * second)
}
