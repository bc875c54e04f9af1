//! Sequential Bayesian identification over a finite set of process
//! hypotheses: posterior updates, the verification / falsification stopping
//! rule, typical-set tests, analytic expected sample complexity and Monte
//! Carlo validation.

mod enumerate;
mod expected;
mod mc;
mod stop;
mod typical;

use thiserror::Error;

use crate::info::{InfoError, ProbVector};
use crate::process::{symmetric_kl_rate, ProcessError, ProcessSpec};

pub use expected::{
    closed_form_surprisal_moment, evaluator_point, expected_sc_evaluator, expected_sc_predictive,
    predictive_conditional_entropy, surprisal_moment, surprisal_moments, EvalMethod,
    EvaluatorPoint, ExpectedSampleComplexity, SearchOptions,
};
pub use mc::{
    mc_sample_complexity, mc_surprisal_moments, trace_trial, DecisionHistogram, McSampleComplexity,
    MomentEstimate, TraceRow, TrialOutcome,
};
pub use stop::{check_stop, Decision, DecisionKind, StoppingConfig, StoppingRule};
pub use typical::{
    falsification_bounds, set_falsification_bounds, typical_bounds_table, typical_membership,
    typical_set_bounds, warm_up, FalsificationBounds, TypicalBounds, TypicalBoundsRow, Typicality,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BayesError {
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error("a hypothesis set needs at least one member")]
    EmptySet,
    #[error("member {index} has alphabet {found}, expected {expected}")]
    AlphabetMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("member {index} has memory {found}, expected {expected}")]
    MemoryMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("{0} labels given for {1} members")]
    LabelCount(usize, usize),
    #[error("prior has {0} entries for {1} members")]
    PriorLength(usize, usize),
    #[error("{field}: {message}")]
    Config {
        field: &'static str,
        message: String,
    },
    #[error("symbol {symbol} is outside the alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },
    #[error(
        "every hypothesis assigns the observations probability zero; the posterior is undefined"
    )]
    Terminal,
    #[error("ideal index {0} is not a member of the set; use falsification_bounds for misspecified sets")]
    NotMember(usize),
    #[error("q = 0: exhaustive falsification would need infinitely many observations")]
    NonHalting,
    #[error("level {0} must lie in (0, 1]")]
    Level(f64),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("enumerating {sequences} sequences exceeds the limit of {limit}")]
    HorizonTooLarge { sequences: f64, limit: usize },
}

/// A finite list of candidate processes sharing an alphabet and memory.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisSet {
    members: Vec<ProcessSpec>,
    labels: Vec<String>,
}

impl HypothesisSet {
    pub fn new(members: Vec<ProcessSpec>) -> Result<Self, BayesError> {
        let labels = (1..=members.len()).map(|i| format!("h{i}")).collect();
        Self::with_labels(members, labels)
    }

    pub fn with_labels(members: Vec<ProcessSpec>, labels: Vec<String>) -> Result<Self, BayesError> {
        let first = members.first().ok_or(BayesError::EmptySet)?;
        let (k, l) = (first.alphabet_size(), first.memory());
        for (index, m) in members.iter().enumerate() {
            if m.alphabet_size() != k {
                return Err(BayesError::AlphabetMismatch {
                    index,
                    expected: k,
                    found: m.alphabet_size(),
                });
            }
            if m.memory() != l {
                return Err(BayesError::MemoryMismatch {
                    index,
                    expected: l,
                    found: m.memory(),
                });
            }
        }
        if labels.len() != members.len() {
            return Err(BayesError::LabelCount(labels.len(), members.len()));
        }
        Ok(Self { members, labels })
    }

    pub fn members(&self) -> &[ProcessSpec] {
        &self.members
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.members[0].alphabet_size()
    }

    pub fn memory(&self) -> usize {
        self.members[0].memory()
    }

    /// Pairs of members with identical descriptions; they can never be told
    /// apart by observations.
    pub fn identical_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.members.len();
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.members[a] == self.members[b])
            .collect()
    }

    /// Members equal to `spec`.
    pub fn matching(&self, spec: &ProcessSpec) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&i| self.members[i] == *spec)
            .collect()
    }

    pub fn uniform_prior(&self) -> ProbVector {
        ProbVector::uniform(self.members.len()).expect("non-empty")
    }

    pub(crate) fn check_prior(&self, prior: &ProbVector) -> Result<(), BayesError> {
        if prior.alphabet_size() != self.members.len() {
            return Err(BayesError::PriorLength(
                prior.alphabet_size(),
                self.members.len(),
            ));
        }
        Ok(())
    }
}

/// `log2 Σ 2^x`, `-inf` for an empty or all `-inf` input.
pub(crate) fn log2_sum_exp2(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + xs.into_iter().map(|x| (x - max).exp2()).sum::<f64>().log2()
}

/// Posterior over a hypothesis set after `t` observations, kept in log2
/// space. Updates return a new state.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorState<'a> {
    set: &'a HypothesisSet,
    log_prior: Vec<f64>,
    log_lik: Vec<f64>,
    t: usize,
    window: Vec<usize>,
    terminal: bool,
}

impl<'a> PosteriorState<'a> {
    pub fn new(set: &'a HypothesisSet, prior: &ProbVector) -> Result<Self, BayesError> {
        set.check_prior(prior)?;
        Ok(Self {
            set,
            log_prior: prior.probs().iter().map(|p| p.log2()).collect(),
            log_lik: vec![0.0; set.len()],
            t: 0,
            window: Vec::new(),
            terminal: false,
        })
    }

    pub fn set(&self) -> &'a HypothesisSet {
        self.set
    }

    /// Observations so far.
    pub fn t(&self) -> usize {
        self.t
    }

    /// True once every hypothesis has assigned the observations probability zero.
    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    /// `log2 P(x_1 … x_t | θ)` per member.
    pub fn log_likelihoods(&self) -> &[f64] {
        &self.log_lik
    }

    /// The most recent symbols, enough to condition every member.
    pub fn window(&self) -> &[usize] {
        &self.window
    }

    pub fn update(&self, symbol: usize) -> Result<PosteriorState<'a>, BayesError> {
        let mut next = self.clone();
        next.advance(symbol)?;
        Ok(next)
    }

    /// In-place form of [`update`](Self::update) for simulation loops.
    pub(crate) fn advance(&mut self, symbol: usize) -> Result<(), BayesError> {
        let k = self.set.alphabet_size();
        if symbol >= k {
            return Err(BayesError::SymbolOutOfRange {
                symbol,
                alphabet: k,
            });
        }
        for (ll, m) in self.log_lik.iter_mut().zip(self.set.members()) {
            if *ll == f64::NEG_INFINITY {
                continue;
            }
            let p = m.conditional(&self.window)[symbol];
            *ll = if p == 0.0 {
                f64::NEG_INFINITY
            } else {
                *ll + p.log2()
            };
        }
        self.t += 1;
        self.window.push(symbol);
        if self.window.len() > self.set.memory() {
            self.window.remove(0);
        }
        let terminal = self.log_joint().all(|x| x == f64::NEG_INFINITY);
        self.terminal = terminal;
        Ok(())
    }

    fn log_joint(&self) -> impl Iterator<Item = f64> + Clone + '_ {
        self.log_prior.iter().zip(&self.log_lik).map(|(a, b)| a + b)
    }

    /// `log2 P(Θ_t = θ | x)` per member; `None` in the terminal state.
    pub fn log_posterior(&self) -> Option<Vec<f64>> {
        if self.terminal {
            return None;
        }
        let norm = log2_sum_exp2(self.log_joint());
        Some(self.log_joint().map(|x| x - norm).collect())
    }

    pub fn posterior(&self) -> Option<Vec<f64>> {
        self.log_posterior()
            .map(|lp| lp.into_iter().map(f64::exp2).collect())
    }

    /// `log2` of the posterior mass outside `group`.
    pub(crate) fn log_complement_mass(&self, group: &[usize]) -> f64 {
        let all = log2_sum_exp2(self.log_joint());
        let outside = log2_sum_exp2(
            self.log_joint()
                .enumerate()
                .filter(|(i, _)| !group.contains(i))
                .map(|(_, x)| x),
        );
        outside - all
    }
}

/// Posterior-weighted mixture of the members' next-symbol laws.
pub fn posterior_predictive(state: &PosteriorState<'_>) -> Result<ProbVector, BayesError> {
    let post = state.posterior().ok_or(BayesError::Terminal)?;
    let k = state.set.alphabet_size();
    let mut mix = vec![0.0; k];
    for (w, m) in post.iter().zip(state.set.members()) {
        if *w == 0.0 {
            continue;
        }
        for (slot, p) in mix.iter_mut().zip(m.conditional(&state.window).iter()) {
            *slot += w * p;
        }
    }
    Ok(ProbVector::from_weights(&mix)?)
}

/// Partitions members so that within a group every pair has symmetric
/// per-symbol relative entropy at most `eps_d` (complete linkage, members
/// taken in order, each joining the first group that admits it).
pub fn equivalence_groups(set: &HypothesisSet, eps_d: f64) -> Result<Vec<Vec<usize>>, BayesError> {
    if !(eps_d >= 0.0) {
        return Err(BayesError::Config {
            field: "eps_d",
            message: format!("{eps_d} must be non-negative"),
        });
    }
    let n = set.len();
    let mut dist = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let d = if set.members[a] == set.members[b] {
                0.0
            } else {
                symmetric_kl_rate(&set.members[a], &set.members[b])?
            };
            dist[a][b] = d;
            dist[b][a] = d;
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for m in 0..n {
        match groups
            .iter_mut()
            .find(|g| g.iter().all(|&o| dist[m][o] <= eps_d))
        {
            Some(g) => g.push(m),
            None => groups.push(vec![m]),
        }
    }
    Ok(groups)
}
