//! Information measures over finite discrete distributions and finite-memory
//! processes.
//!
//! Every quantity is reported in bits. The convention `0 · log 0 = 0` holds
//! throughout, and measures that diverge because of a support mismatch
//! (`P_i > 0` where `Q_i = 0`) return `f64::INFINITY` instead of failing.

use std::collections::VecDeque;

use thiserror::Error;

use crate::process::{MarkovSpec, ProcessSpec};

/// Tolerance on the total mass of a [`ProbVector`] or [`JointTable`].
pub const MASS_TOLERANCE: f64 = 1e-12;
/// Tolerance used when comparing two floating-point information measures.
pub const COMPARISON_TOLERANCE: f64 = 1e-9;
/// L1 convergence threshold for the stationary-distribution power iteration.
pub const STATIONARY_TOLERANCE: f64 = 1e-12;
/// Largest number of sequences any enumeration is allowed to visit.
pub const MAX_ENUMERATION: usize = 1 << 20;

const MAX_POWER_ITERATIONS: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("a distribution needs at least one symbol")]
    Empty,
    #[error("alphabet sizes differ: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("joint table rows have unequal lengths")]
    Ragged,
    #[error("enumerating {sequences} sequences exceeds the limit of {limit}; use the entropy rate instead")]
    HorizonTooLarge { sequences: f64, limit: usize },
    #[error("context graph is reducible: contexts {unreachable:?} cannot be reached from context {from:?}")]
    Reducible {
        from: Vec<usize>,
        unreachable: Vec<Vec<usize>>,
    },
    #[error("stationary distribution did not converge after {0} iterations")]
    NoConvergence(usize),
}

/// A point on the probability simplex over `k` mutually exclusive symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    probs: Vec<f64>,
}

impl ProbVector {
    pub fn new(probs: Vec<f64>) -> Result<Self, InfoError> {
        if probs.is_empty() {
            return Err(InfoError::Empty);
        }
        for &p in &probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(InfoError::ProbabilityOutOfRange(p));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(InfoError::NotNormalized(total));
        }
        Ok(Self { probs })
    }

    /// Builds a vector from dyadic rationals `numerators[i] / 2^exponent`.
    /// The numerators must sum to exactly `2^exponent`.
    pub fn from_dyadic(numerators: &[u64], exponent: u32) -> Result<Self, InfoError> {
        if exponent > 63 {
            return Err(InfoError::NotNormalized(f64::NAN));
        }
        let denom = 1u128 << exponent;
        let total: u128 = numerators.iter().map(|&n| n as u128).sum();
        if total != denom {
            return Err(InfoError::NotNormalized(total as f64 / denom as f64));
        }
        let scale = (denom as f64).recip();
        Self::new(numerators.iter().map(|&n| n as f64 * scale).collect())
    }

    pub fn uniform(k: usize) -> Result<Self, InfoError> {
        if k == 0 {
            return Err(InfoError::Empty);
        }
        Ok(Self {
            probs: vec![1.0 / k as f64; k],
        })
    }

    /// Normalizes non-negative weights. Fails if they are all zero.
    pub fn from_weights(weights: &[f64]) -> Result<Self, InfoError> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty() {
            return Err(InfoError::Empty);
        }
        if !(total > 0.0) || !total.is_finite() {
            return Err(InfoError::NotNormalized(total));
        }
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        if let Some(&bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(InfoError::ProbabilityOutOfRange(bad));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn get(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }
}

/// Surprisal `-log2 p` of a single event.
///
/// `p = 0` yields `f64::INFINITY`; values outside `[0, 1]` are a domain error.
pub fn surprisal(p: f64) -> Result<f64, InfoError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(InfoError::ProbabilityOutOfRange(p));
    }
    if p == 0.0 {
        return Ok(f64::INFINITY);
    }
    // -log2(1) is -0.0
    Ok(-p.log2() + 0.0)
}

pub(crate) fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy `H(P)`.
pub fn entropy(dist: &ProbVector) -> f64 {
    entropy_of(dist.probs())
}

pub(crate) fn entropy_of(probs: &[f64]) -> f64 {
    -probs.iter().map(|&p| plogp(p)).sum::<f64>() + 0.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Divergences {
    pub cross_entropy: f64,
    pub kl: f64,
}

/// Cross entropy `H⊗(P||Q)` and relative entropy `D_KL(P||Q)`.
pub fn divergences(p: &ProbVector, q: &ProbVector) -> Result<Divergences, InfoError> {
    if p.alphabet_size() != q.alphabet_size() {
        return Err(InfoError::AlphabetMismatch(
            p.alphabet_size(),
            q.alphabet_size(),
        ));
    }
    Ok(divergences_of(p.probs(), q.probs()))
}

pub(crate) fn divergences_of(p: &[f64], q: &[f64]) -> Divergences {
    let mut cross = 0.0;
    let mut kl = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Divergences {
                cross_entropy: f64::INFINITY,
                kl: f64::INFINITY,
            };
        }
        cross -= pi * qi.log2();
        kl += pi * (pi / qi).log2();
    }
    Divergences {
        cross_entropy: cross + 0.0,
        kl: kl.max(0.0),
    }
}

/// Joint distribution over `X × Y`; rows index `X`, columns index `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    rows: usize,
    cols: usize,
    table: Vec<f64>,
}

impl JointTable {
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self, InfoError> {
        let rows = table.len();
        if rows == 0 || table[0].is_empty() {
            return Err(InfoError::Empty);
        }
        let cols = table[0].len();
        if table.iter().any(|r| r.len() != cols) {
            return Err(InfoError::Ragged);
        }
        let flat: Vec<f64> = table.into_iter().flatten().collect();
        if let Some(&bad) = flat.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(InfoError::ProbabilityOutOfRange(bad));
        }
        let total: f64 = flat.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(InfoError::NotNormalized(total));
        }
        Ok(Self {
            rows,
            cols,
            table: flat,
        })
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.table[x * self.cols + y]
    }

    pub fn marginal_x(&self) -> ProbVector {
        let probs = (0..self.rows)
            .map(|x| (0..self.cols).map(|y| self.get(x, y)).sum())
            .collect();
        ProbVector { probs }
    }

    pub fn marginal_y(&self) -> ProbVector {
        let probs = (0..self.cols)
            .map(|y| (0..self.rows).map(|x| self.get(x, y)).sum())
            .collect();
        ProbVector { probs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointMeasures {
    /// `H(X, Y)`
    pub joint_entropy: f64,
    /// `H(X | Y)`
    pub conditional_entropy: f64,
    /// `I(X; Y)`
    pub mutual_information: f64,
}

/// Joint entropy, conditional entropy `H(X|Y)` and mutual information, each
/// evaluated from its own definitional sum.
pub fn joint_measures(joint: &JointTable) -> JointMeasures {
    let px = joint.marginal_x();
    let py = joint.marginal_y();
    let mut h_xy = 0.0;
    let mut h_x_given_y = 0.0;
    let mut mi = 0.0;
    for x in 0..joint.rows {
        for y in 0..joint.cols {
            let pxy = joint.get(x, y);
            if pxy == 0.0 {
                continue;
            }
            h_xy -= pxy * pxy.log2();
            h_x_given_y -= pxy * (pxy / py.get(y)).log2();
            mi += pxy * (pxy / (px.get(x) * py.get(y))).log2();
        }
    }
    JointMeasures {
        joint_entropy: h_xy + 0.0,
        conditional_entropy: h_x_given_y.max(0.0),
        mutual_information: mi.max(0.0),
    }
}

/// The distribution a process induces over sequences of length `horizon`.
#[derive(Debug, Clone, Copy)]
pub struct SequenceDist<'a> {
    pub source: &'a ProcessSpec,
    pub horizon: usize,
}

impl<'a> SequenceDist<'a> {
    pub fn new(source: &'a ProcessSpec, horizon: usize) -> Self {
        Self { source, horizon }
    }

    /// Probabilities of every sequence, indexed in base `k` with the first
    /// symbol most significant.
    pub fn probabilities(&self) -> Result<Vec<f64>, InfoError> {
        self.source.sequence_probabilities(self.horizon)
    }
}

/// Checks `k^t <= MAX_ENUMERATION` and returns `k^t`.
pub fn enumeration_size(alphabet: usize, horizon: usize) -> Result<usize, InfoError> {
    let size = (alphabet as f64).powi(horizon as i32);
    if size > MAX_ENUMERATION as f64 {
        return Err(InfoError::HorizonTooLarge {
            sequences: size,
            limit: MAX_ENUMERATION,
        });
    }
    Ok(alphabet.pow(horizon as u32))
}

/// Block entropy `H(X_1 … X_t)` by enumeration of every length-`t` sequence.
pub fn block_entropy(dist: &SequenceDist<'_>) -> Result<f64, InfoError> {
    Ok(entropy_of(&dist.probabilities()?))
}

/// Stationary distribution of the context chain of an `L`-memory process whose
/// rows give `P(next symbol | context)`, contexts indexed oldest-symbol-first.
///
/// Fails with [`InfoError::Reducible`] when the context graph is not strongly
/// connected. The iteration runs on the lazy chain `(I + P) / 2` so periodic
/// chains converge too; it stops once successive iterates differ by less than
/// [`STATIONARY_TOLERANCE`] in L1.
pub fn stationary_contexts(
    alphabet: usize,
    memory: usize,
    rows: &[&[f64]],
) -> Result<Vec<f64>, InfoError> {
    let n = alphabet.pow(memory as u32);
    debug_assert_eq!(rows.len(), n);
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let next = |ctx: usize, s: usize| (ctx * alphabet + s) % n;

    // strong connectivity: everything reachable from 0 and 0 reachable from everything
    let reach = |reverse: bool| {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(c) = queue.pop_front() {
            for d in 0..n {
                if seen[d] {
                    continue;
                }
                let edge = if reverse {
                    (0..alphabet).any(|s| next(d, s) == c && rows[d][s] > 0.0)
                } else {
                    (0..alphabet).any(|s| next(c, s) == d && rows[c][s] > 0.0)
                };
                if edge {
                    seen[d] = true;
                    queue.push_back(d);
                }
            }
        }
        seen
    };
    let forward = reach(false);
    if forward.iter().any(|s| !s) {
        return Err(InfoError::Reducible {
            from: context_symbols(0, alphabet, memory),
            unreachable: (0..n)
                .filter(|&c| !forward[c])
                .map(|c| context_symbols(c, alphabet, memory))
                .collect(),
        });
    }
    let backward = reach(true);
    if let Some(c) = (0..n).find(|&c| !backward[c]) {
        return Err(InfoError::Reducible {
            from: context_symbols(c, alphabet, memory),
            unreachable: vec![context_symbols(0, alphabet, memory)],
        });
    }

    let mut pi = vec![1.0 / n as f64; n];
    let mut step = vec![0.0; n];
    for _ in 0..MAX_POWER_ITERATIONS {
        step.iter_mut().zip(&pi).for_each(|(s, &p)| *s = 0.5 * p);
        for c in 0..n {
            for s in 0..alphabet {
                step[next(c, s)] += 0.5 * pi[c] * rows[c][s];
            }
        }
        let total: f64 = step.iter().sum();
        step.iter_mut().for_each(|s| *s /= total);
        let change: f64 = step.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut step);
        if change < STATIONARY_TOLERANCE {
            return Ok(pi);
        }
    }
    Err(InfoError::NoConvergence(MAX_POWER_ITERATIONS))
}

/// Decodes a context index into its symbols, oldest first.
pub fn context_symbols(index: usize, alphabet: usize, memory: usize) -> Vec<usize> {
    let mut out = vec![0; memory];
    let mut rest = index;
    for slot in out.iter_mut().rev() {
        *slot = rest % alphabet;
        rest /= alphabet;
    }
    out
}

/// Encodes context symbols (oldest first) into an index.
pub fn context_index(symbols: &[usize], alphabet: usize) -> usize {
    symbols.iter().fold(0, |acc, &s| acc * alphabet + s)
}

/// Entropy rate: the stationary-context-weighted conditional entropy
/// `H(X_t | X_{t-L} … X_{t-1})`.
pub fn entropy_rate(spec: &MarkovSpec) -> Result<f64, InfoError> {
    let rows = spec.transition_rows();
    let pi = stationary_contexts(spec.alphabet_size(), spec.memory(), &rows)?;
    Ok(pi
        .iter()
        .zip(&rows)
        .map(|(w, row)| w * entropy_of(row))
        .sum::<f64>()
        + 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{IidSpec, InitialContext};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pv(p: &[f64]) -> ProbVector {
        ProbVector::new(p.to_vec()).unwrap()
    }

    // binary entropy from its definitional sum, evaluated independently of `entropy`
    fn h2(p: f64) -> f64 {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }

    #[test]
    fn surprisal_examples() {
        assert_eq!(surprisal(0.5).unwrap(), 1.0);
        assert_eq!(surprisal(1.0).unwrap(), 0.0);
        assert_eq!(surprisal(0.25).unwrap(), 2.0);
        assert_eq!(surprisal(0.0).unwrap(), f64::INFINITY);
        assert!(surprisal(1.5).is_err());
        assert!(surprisal(-0.1).is_err());
        assert!(surprisal(f64::NAN).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&pv(&[0.5, 0.5])), 1.0);
        assert_eq!(entropy(&pv(&[1.0, 0.0])), 0.0);
        // 50-digit evaluation of -(0.7 log2 0.7 + 0.3 log2 0.3)
        assert_abs_diff_eq!(
            entropy(&pv(&[0.7, 0.3])),
            0.881_290_899_230_692_1,
            epsilon = 1e-15
        );
    }

    #[test]
    fn invalid_vectors_rejected() {
        assert!(matches!(
            ProbVector::new(vec![0.5, 0.6]),
            Err(InfoError::NotNormalized(_))
        ));
        assert!(matches!(
            ProbVector::new(vec![1.5, -0.5]),
            Err(InfoError::ProbabilityOutOfRange(_))
        ));
        assert!(matches!(ProbVector::new(vec![]), Err(InfoError::Empty)));
        assert!(ProbVector::from_dyadic(&[1, 2], 2).is_err());
        assert_eq!(
            ProbVector::from_dyadic(&[1, 3], 2).unwrap().probs(),
            &[0.25, 0.75]
        );
    }

    #[test]
    fn divergence_examples() {
        let d = divergences(&pv(&[0.5, 0.5]), &pv(&[0.5, 0.5])).unwrap();
        assert_eq!((d.cross_entropy, d.kl), (1.0, 0.0));
        let d = divergences(&pv(&[1.0, 0.0]), &pv(&[0.5, 0.5])).unwrap();
        assert_eq!((d.cross_entropy, d.kl), (1.0, 1.0));
        let d = divergences(&pv(&[0.7, 0.3]), &pv(&[0.5, 0.5])).unwrap();
        assert_abs_diff_eq!(d.cross_entropy, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.kl, 0.118_709_100_769_307_3, epsilon = 1e-15);
        assert_abs_diff_eq!(d.kl, 1.0 - h2(0.7), epsilon = 1e-15);
    }

    #[test]
    fn absolute_continuity_violation_is_infinite() {
        let d = divergences(&pv(&[0.5, 0.5]), &pv(&[1.0, 0.0])).unwrap();
        assert_eq!(d.kl, f64::INFINITY);
        assert_eq!(d.cross_entropy, f64::INFINITY);
        assert!(divergences(&pv(&[1.0]), &pv(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn joint_examples() {
        let ind = JointTable::new(vec![vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        let m = joint_measures(&ind);
        assert_abs_diff_eq!(m.joint_entropy, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.conditional_entropy, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.mutual_information, 0.0, epsilon = 1e-15);

        let diag = JointTable::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let m = joint_measures(&diag);
        assert_abs_diff_eq!(m.joint_entropy, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.conditional_entropy, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.mutual_information, 1.0, epsilon = 1e-15);

        let j = JointTable::new(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let m = joint_measures(&j);
        // -(2·0.4 log2 0.4 + 2·0.1 log2 0.1)
        assert_abs_diff_eq!(m.joint_entropy, 1.721_928_094_887_362_3, epsilon = 1e-14);
        let hx = entropy(&j.marginal_x());
        let hy = entropy(&j.marginal_y());
        assert_abs_diff_eq!(
            m.mutual_information,
            hx + hy - m.joint_entropy,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            m.mutual_information,
            0.278_071_905_112_637_7,
            epsilon = 1e-14
        );
    }

    #[test]
    fn ragged_table_rejected() {
        assert_eq!(
            JointTable::new(vec![vec![0.5, 0.5], vec![0.0]]),
            Err(InfoError::Ragged)
        );
    }

    #[test]
    fn block_entropy_examples() {
        let fair = ProcessSpec::Iid(IidSpec::bernoulli(0.5).unwrap());
        assert_abs_diff_eq!(
            block_entropy(&SequenceDist::new(&fair, 3)).unwrap(),
            3.0,
            epsilon = 1e-12
        );
        let constant = ProcessSpec::Iid(IidSpec::new(&[1.0, 0.0]).unwrap());
        assert_eq!(
            block_entropy(&SequenceDist::new(&constant, 10)).unwrap(),
            0.0
        );
        let biased = ProcessSpec::Iid(IidSpec::new(&[0.7, 0.3]).unwrap());
        // definitional sum over the four sequences 00, 01, 10, 11
        let probs = [0.49, 0.21, 0.21, 0.09];
        let oracle: f64 = -probs.iter().map(|p: &f64| p * p.log2()).sum::<f64>();
        let got = block_entropy(&SequenceDist::new(&biased, 2)).unwrap();
        assert_abs_diff_eq!(got, oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(got, 2.0 * 0.881_290_899_230_692_1, epsilon = 1e-12);
    }

    #[test]
    fn block_entropy_refuses_large_horizon() {
        let fair = ProcessSpec::Iid(IidSpec::bernoulli(0.5).unwrap());
        assert!(matches!(
            block_entropy(&SequenceDist::new(&fair, 21)),
            Err(InfoError::HorizonTooLarge { .. })
        ));
    }

    fn two_state(a: f64, b: f64) -> MarkovSpec {
        MarkovSpec::with_stationary_init(
            2,
            1,
            vec![
                IidSpec::new(&[a, 1.0 - a]).unwrap(),
                IidSpec::new(&[b, 1.0 - b]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn entropy_rate_examples() {
        let iid = MarkovSpec::iid(IidSpec::bernoulli(0.5).unwrap());
        assert_eq!(entropy_rate(&iid).unwrap(), 1.0);

        let alternator = MarkovSpec::new(
            2,
            1,
            vec![
                IidSpec::new(&[0.0, 1.0]).unwrap(),
                IidSpec::new(&[1.0, 0.0]).unwrap(),
            ],
            InitialContext::Fixed(vec![0]),
        )
        .unwrap();
        assert_eq!(entropy_rate(&alternator).unwrap(), 0.0);

        // stationary law of 0→[0.9,0.1], 1→[0.2,0.8] solves 0.1·π0 = 0.2·π1, so π = (2/3, 1/3)
        let m = two_state(0.9, 0.2);
        let oracle = 2.0 / 3.0 * h2(0.9) + 1.0 / 3.0 * h2(0.2);
        assert_abs_diff_eq!(entropy_rate(&m).unwrap(), oracle, epsilon = 1e-10);
        assert_abs_diff_eq!(
            entropy_rate(&m).unwrap(),
            0.553_306_427_355_308_2,
            epsilon = 1e-10
        );
    }

    #[test]
    fn reducible_chain_names_unreachable_contexts() {
        // context 0 always emits 1 and context 1 always emits 1: context 0 is transient
        let m = MarkovSpec::new(
            2,
            1,
            vec![
                IidSpec::new(&[0.0, 1.0]).unwrap(),
                IidSpec::new(&[0.0, 1.0]).unwrap(),
            ],
            InitialContext::Fixed(vec![1]),
        )
        .unwrap();
        match entropy_rate(&m) {
            Err(InfoError::Reducible { from, unreachable }) => {
                assert_eq!(from, vec![1]);
                assert_eq!(unreachable, vec![vec![0]]);
            }
            other => panic!("expected reducible error, got {other:?}"),
        }
    }

    #[test]
    fn entropy_rate_matches_block_difference() {
        let m = two_state(0.9, 0.2);
        let spec = ProcessSpec::Markov(m.clone());
        let h2b = block_entropy(&SequenceDist::new(&spec, 2)).unwrap();
        let h1b = block_entropy(&SequenceDist::new(&spec, 1)).unwrap();
        assert_abs_diff_eq!(h2b - h1b, entropy_rate(&m).unwrap(), epsilon = 1e-6);

        let m2 = MarkovSpec::with_stationary_init(
            2,
            2,
            vec![
                IidSpec::new(&[0.6, 0.4]).unwrap(),
                IidSpec::new(&[0.125, 0.875]).unwrap(),
                IidSpec::new(&[0.5, 0.5]).unwrap(),
                IidSpec::new(&[0.95, 0.05]).unwrap(),
            ],
        )
        .unwrap();
        let spec = ProcessSpec::Markov(m2.clone());
        let h3 = block_entropy(&SequenceDist::new(&spec, 3)).unwrap();
        let h2 = block_entropy(&SequenceDist::new(&spec, 2)).unwrap();
        assert_abs_diff_eq!(h3 - h2, entropy_rate(&m2).unwrap(), epsilon = 1e-6);
    }

    fn simplex(k: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, k).prop_filter_map("zero mass", |w| {
            let total: f64 = w.iter().sum();
            (total > 1e-6).then(|| w.iter().map(|x| x / total).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn kl_is_nonnegative((p, q) in (1usize..6).prop_flat_map(|k| (simplex(k), simplex(k)))) {
            let p = ProbVector::from_weights(&p).unwrap();
            let q = ProbVector::from_weights(&q).unwrap();
            let d = divergences(&p, &q).unwrap();
            prop_assert!(d.kl >= 0.0);
            if d.kl.is_finite() {
                prop_assert!((d.cross_entropy - entropy(&p) - d.kl).abs() < 1e-9);
            }
        }

        #[test]
        fn joint_identities(rows in 1usize..5, cols in 1usize..5, w in prop::collection::vec(0.0f64..1.0, 16)) {
            let cells = &w[..rows * cols];
            let total: f64 = cells.iter().sum();
            prop_assume!(total > 1e-6);
            let table: Vec<Vec<f64>> = cells.chunks(cols).map(|r| r.iter().map(|x| x / total).collect()).collect();
            let Ok(j) = JointTable::new(table) else { return Ok(()); };
            let m = joint_measures(&j);
            let hx = entropy(&j.marginal_x());
            let hy = entropy(&j.marginal_y());
            prop_assert!(m.mutual_information >= 0.0);
            prop_assert!((m.joint_entropy - (hy + m.conditional_entropy)).abs() < 1e-9);
            prop_assert!((m.mutual_information - (hx - m.conditional_entropy)).abs() < 1e-9);
            prop_assert!((m.mutual_information - (hx + hy - m.joint_entropy)).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn block_entropy_is_additive_for_iid(p in simplex(3), t in 1usize..=12) {
            let spec = ProcessSpec::Iid(IidSpec::new(&p).unwrap());
            let h = spec.entropy_rate().unwrap();
            let hb = block_entropy(&SequenceDist::new(&spec, t)).unwrap();
            prop_assert!((hb - t as f64 * h).abs() < 1e-9);
        }
    }
}
