//! Discrete sources: i.i.d. laws, finite-memory processes, empirical
//! processes built from observations, and the spread code that embeds a
//! message in a stream of random symbols.

mod bits;
mod empirical;
mod iid;
mod json;
mod markov;
mod spread;

use std::borrow::Cow;

use thiserror::Error;

use crate::info::{self, divergences_of, entropy_of, InfoError};

pub use bits::BitSource;
pub use empirical::EmpiricalProcess;
pub use iid::{sample_discrete, DiscreteSample, IidSpec, DYADIC_PRECISION};
pub use json::{InitJson, ProcessJson, SpecError};
pub use markov::{InitialContext, MarkovSpec};
pub use spread::{spread_decode, spread_encode, SpreadCode, SpreadDecoding};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProcessError {
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error("cannot build dyadic law: {0}")]
    Dyadic(String),
    #[error("invalid process: {0}")]
    InvalidSpec(String),
    #[error("symbol {symbol} is outside the alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },
    #[error("initial distribution is not stationary (largest deviation {deviation:e})")]
    NotStationary { deviation: f64 },
    #[error("no observations recorded for context {context:?}")]
    UndefinedDistribution { context: Vec<usize> },
    #[error("spread code components {0} and {1} are identical")]
    IdenticalComponents(usize, usize),
    #[error("invalid spread code: {0}")]
    InvalidCode(String),
}

/// Either kind of source, with the operations the rest of the library needs.
#[derive(Debug, Clone, PartialEq)]
pub enum ProcessSpec {
    Iid(IidSpec),
    Markov(MarkovSpec),
}

impl From<IidSpec> for ProcessSpec {
    fn from(s: IidSpec) -> Self {
        ProcessSpec::Iid(s)
    }
}

impl From<MarkovSpec> for ProcessSpec {
    fn from(s: MarkovSpec) -> Self {
        ProcessSpec::Markov(s)
    }
}

impl ProcessSpec {
    pub fn bernoulli(p: f64) -> Result<Self, ProcessError> {
        Ok(ProcessSpec::Iid(IidSpec::bernoulli(p)?))
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            ProcessSpec::Iid(s) => s.alphabet_size(),
            ProcessSpec::Markov(m) => m.alphabet_size(),
        }
    }

    pub fn memory(&self) -> usize {
        match self {
            ProcessSpec::Iid(_) => 0,
            ProcessSpec::Markov(m) => m.memory(),
        }
    }

    /// `P(next symbol | history)`.
    pub fn conditional(&self, history: &[usize]) -> Cow<'_, [f64]> {
        match self {
            ProcessSpec::Iid(s) => Cow::Borrowed(s.probs()),
            ProcessSpec::Markov(m) => m.conditional(history),
        }
    }

    /// `log2 P(x_1 … x_t)`; `-inf` for impossible sequences. Symbols must be
    /// inside the alphabet.
    pub fn log2_prob(&self, seq: &[usize]) -> f64 {
        match self {
            ProcessSpec::Iid(s) => {
                let p = s.probs();
                let mut lp = 0.0;
                for &x in seq {
                    if p[x] == 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    lp += p[x].log2();
                }
                lp
            }
            ProcessSpec::Markov(m) => m.log2_prob(seq),
        }
    }

    pub fn check_symbols(&self, seq: &[usize]) -> Result<(), ProcessError> {
        let k = self.alphabet_size();
        match seq.iter().find(|&&s| s >= k) {
            Some(&symbol) => Err(ProcessError::SymbolOutOfRange {
                symbol,
                alphabet: k,
            }),
            None => Ok(()),
        }
    }

    /// Probabilities of all `k^t` sequences, first symbol most significant.
    pub fn sequence_probabilities(&self, horizon: usize) -> Result<Vec<f64>, InfoError> {
        match self {
            ProcessSpec::Iid(s) => {
                let size = info::enumeration_size(s.alphabet_size(), horizon)?;
                let mut out = vec![1.0; 1];
                out.reserve(size);
                for _ in 0..horizon {
                    out = out
                        .iter()
                        .flat_map(|&q| s.probs().iter().map(move |&p| q * p))
                        .collect();
                }
                Ok(out)
            }
            ProcessSpec::Markov(m) => m.sequence_probabilities(horizon),
        }
    }

    /// Transition rows for the process viewed with memory `memory >= L`.
    pub fn rows_at(&self, memory: usize) -> Vec<&[f64]> {
        let k = self.alphabet_size();
        let n = k.pow(memory as u32);
        match self {
            ProcessSpec::Iid(s) => vec![s.probs(); n],
            ProcessSpec::Markov(m) => {
                let own = m.num_contexts();
                let rows = m.transition_rows();
                (0..n).map(|c| rows[c % own]).collect()
            }
        }
    }

    pub fn entropy_rate(&self) -> Result<f64, InfoError> {
        match self {
            ProcessSpec::Iid(s) => Ok(s.entropy()),
            ProcessSpec::Markov(m) => info::entropy_rate(m),
        }
    }

    /// Stationary context law at memory `memory >= L`.
    pub fn stationary_at(&self, memory: usize) -> Result<Vec<f64>, InfoError> {
        info::stationary_contexts(self.alphabet_size(), memory, &self.rows_at(memory))
    }

    pub fn sampler(&self) -> ProcessSampler<'_> {
        ProcessSampler {
            spec: self,
            history: Vec::new(),
            pending: Vec::new(),
        }
    }

    /// Draws `t` symbols.
    pub fn sample(&self, t: usize, src: &mut BitSource) -> Vec<usize> {
        let mut s = self.sampler();
        (0..t).map(|_| s.next_symbol(src)).collect()
    }
}

/// Per-symbol cross entropy `H⊗` and relative entropy between the stationary
/// behaviour of `ideal` and the conditional laws of `other`, weighted by the
/// stationary context law of `ideal`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateDivergences {
    pub cross_entropy_rate: f64,
    pub kl_rate: f64,
}

pub fn rate_divergences(
    ideal: &ProcessSpec,
    other: &ProcessSpec,
) -> Result<RateDivergences, ProcessError> {
    if ideal.alphabet_size() != other.alphabet_size() {
        return Err(
            InfoError::AlphabetMismatch(ideal.alphabet_size(), other.alphabet_size()).into(),
        );
    }
    let memory = ideal.memory().max(other.memory());
    let pi = ideal.stationary_at(memory)?;
    let a = ideal.rows_at(memory);
    let b = other.rows_at(memory);
    let mut cross = 0.0;
    let mut kl = 0.0;
    for ((w, ra), rb) in pi.iter().zip(&a).zip(&b) {
        if *w == 0.0 {
            continue;
        }
        let d = divergences_of(ra, rb);
        cross += w * d.cross_entropy;
        kl += w * d.kl;
    }
    Ok(RateDivergences {
        cross_entropy_rate: cross,
        kl_rate: if kl.is_nan() {
            f64::INFINITY
        } else {
            kl.max(0.0)
        },
    })
}

/// Symmetric divergence rate `max(D(a||b), D(b||a))`.
pub fn symmetric_kl_rate(a: &ProcessSpec, b: &ProcessSpec) -> Result<f64, ProcessError> {
    Ok(rate_divergences(a, b)?
        .kl_rate
        .max(rate_divergences(b, a)?.kl_rate))
}

/// Produces one symbol at a time from a process, keeping only the history
/// needed to condition the next draw.
#[derive(Debug, Clone)]
pub struct ProcessSampler<'a> {
    spec: &'a ProcessSpec,
    history: Vec<usize>,
    pending: Vec<usize>,
}

impl ProcessSampler<'_> {
    pub fn next_symbol(&mut self, src: &mut BitSource) -> usize {
        match self.spec {
            ProcessSpec::Iid(s) => sample_discrete(s, src).symbol,
            ProcessSpec::Markov(m) => {
                let l = m.memory();
                if self.history.is_empty() && self.pending.is_empty() && l > 0 {
                    self.pending = m.draw_initial(src);
                    self.pending.reverse();
                }
                let s = match self.pending.pop() {
                    Some(s) => s,
                    None => m.draw_next(&self.history[self.history.len() - l..], src),
                };
                self.history.push(s);
                if self.history.len() > 2 * l.max(1) {
                    self.history.drain(..self.history.len() - l);
                }
                s
            }
        }
    }
}

/// Entropy of a probability slice, exposed for callers holding raw rows.
pub fn row_entropy(row: &[f64]) -> f64 {
    entropy_of(row)
}
