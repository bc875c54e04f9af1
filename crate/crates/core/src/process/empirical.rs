use crate::info::{context_index, divergences_of, ProbVector};

use super::{markov::context_count, ProcessError, ProcessSpec};

/// Context-conditional symbol counts gathered from observations.
///
/// Updates consume the process and return the extended one, so a history of
/// snapshots can be kept cheaply by cloning where needed.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalProcess {
    alphabet: usize,
    memory: usize,
    counts: Vec<u64>,
    total: u64,
}

impl EmpiricalProcess {
    pub fn new(alphabet: usize, memory: usize) -> Result<Self, ProcessError> {
        if alphabet == 0 {
            return Err(ProcessError::InvalidSpec(
                "alphabet must be non-empty".into(),
            ));
        }
        let contexts = context_count(alphabet, memory)?;
        Ok(Self {
            alphabet,
            memory,
            counts: vec![0; contexts * alphabet],
            total: 0,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    /// Number of recorded transitions.
    pub fn total(&self) -> u64 {
        self.total
    }

    fn check(&self, symbols: &[usize]) -> Result<(), ProcessError> {
        match symbols.iter().find(|&&s| s >= self.alphabet) {
            Some(&symbol) => Err(ProcessError::SymbolOutOfRange {
                symbol,
                alphabet: self.alphabet,
            }),
            None => Ok(()),
        }
    }

    /// Records one symbol observed after `context` (oldest symbol first).
    pub fn update(mut self, context: &[usize], symbol: usize) -> Result<Self, ProcessError> {
        if context.len() != self.memory {
            return Err(ProcessError::InvalidSpec(format!(
                "context has {} symbols, expected {}",
                context.len(),
                self.memory
            )));
        }
        self.check(context)?;
        self.check(&[symbol])?;
        let c = context_index(context, self.alphabet);
        self.counts[c * self.alphabet + symbol] += 1;
        self.total += 1;
        Ok(self)
    }

    /// Records every transition inside `seq`. The first `L` symbols only serve
    /// as context.
    pub fn observe_sequence(mut self, seq: &[usize]) -> Result<Self, ProcessError> {
        self.check(seq)?;
        for w in seq.windows(self.memory + 1) {
            let c = context_index(&w[..self.memory], self.alphabet);
            self.counts[c * self.alphabet + w[self.memory]] += 1;
            self.total += 1;
        }
        Ok(self)
    }

    pub fn context_total(&self, context: usize) -> u64 {
        self.counts[context * self.alphabet..(context + 1) * self.alphabet]
            .iter()
            .sum()
    }

    /// Empirical law of the next symbol after `context`.
    pub fn dist(&self, context: &[usize]) -> Result<ProbVector, ProcessError> {
        self.check(context)?;
        if context.len() != self.memory {
            return Err(ProcessError::InvalidSpec(format!(
                "context has {} symbols, expected {}",
                context.len(),
                self.memory
            )));
        }
        let c = context_index(context, self.alphabet);
        let n = self.context_total(c);
        if n == 0 {
            return Err(ProcessError::UndefinedDistribution {
                context: context.to_vec(),
            });
        }
        let row = &self.counts[c * self.alphabet..(c + 1) * self.alphabet];
        Ok(ProbVector::from_weights(
            &row.iter().map(|&x| x as f64).collect::<Vec<_>>(),
        )?)
    }

    /// Count-weighted relative entropy `Σ_c (n_c / N) D(Ξ_c || δ_c)` from the
    /// empirical process to `spec`.
    pub fn kl_rate_to(&self, spec: &ProcessSpec) -> Result<f64, ProcessError> {
        if spec.alphabet_size() != self.alphabet {
            return Err(crate::info::InfoError::AlphabetMismatch(
                self.alphabet,
                spec.alphabet_size(),
            )
            .into());
        }
        if spec.memory() > self.memory {
            return Err(ProcessError::InvalidSpec(format!(
                "empirical memory {} is shorter than the model memory {}",
                self.memory,
                spec.memory()
            )));
        }
        if self.total == 0 {
            return Err(ProcessError::UndefinedDistribution {
                context: Vec::new(),
            });
        }
        let rows = spec.rows_at(self.memory);
        let mut rate = 0.0;
        for (c, row) in rows.iter().enumerate() {
            let n = self.context_total(c);
            if n == 0 {
                continue;
            }
            let counts = &self.counts[c * self.alphabet..(c + 1) * self.alphabet];
            let xi: Vec<f64> = counts.iter().map(|&x| x as f64 / n as f64).collect();
            rate += n as f64 / self.total as f64 * divergences_of(&xi, row).kl;
        }
        Ok(rate)
    }
}
