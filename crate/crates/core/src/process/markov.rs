use std::borrow::Cow;

use crate::info::{self, context_index, context_symbols, enumeration_size, COMPARISON_TOLERANCE};

use super::{sample_discrete, BitSource, IidSpec, ProcessError};

/// How the first `L` symbols of a finite-memory process are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialContext {
    /// A fixed context, oldest symbol first.
    Fixed(Vec<usize>),
    /// A law over all `k^L` contexts, indexed oldest-symbol-most-significant.
    /// It must be stationary for the transition law.
    Distribution(IidSpec),
}

/// A stationary process over `{0, …, k-1}` whose next symbol depends only on
/// the previous `L` symbols.
///
/// The first `min(t, L)` emitted symbols are the initial context itself; each
/// later symbol is drawn from `delta[context]`. Contexts are indexed in base
/// `k` with the oldest symbol most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovSpec {
    alphabet: usize,
    memory: usize,
    delta: Vec<IidSpec>,
    init: InitialContext,
}

impl MarkovSpec {
    pub fn new(
        alphabet: usize,
        memory: usize,
        delta: Vec<IidSpec>,
        init: InitialContext,
    ) -> Result<Self, ProcessError> {
        if alphabet == 0 {
            return Err(ProcessError::InvalidSpec(
                "alphabet must be non-empty".into(),
            ));
        }
        let contexts = context_count(alphabet, memory)?;
        if delta.len() != contexts {
            return Err(ProcessError::InvalidSpec(format!(
                "expected {contexts} transition rows for alphabet {alphabet} and memory {memory}, got {}",
                delta.len()
            )));
        }
        if let Some((c, row)) = delta
            .iter()
            .enumerate()
            .find(|(_, r)| r.alphabet_size() != alphabet)
        {
            return Err(ProcessError::InvalidSpec(format!(
                "transition row for context {:?} has {} entries, expected {alphabet}",
                context_symbols(c, alphabet, memory),
                row.alphabet_size()
            )));
        }
        let spec = Self {
            alphabet,
            memory,
            delta,
            init,
        };
        match &spec.init {
            InitialContext::Fixed(ctx) => {
                if ctx.len() != memory {
                    return Err(ProcessError::InvalidSpec(format!(
                        "initial context has {} symbols, expected {memory}",
                        ctx.len()
                    )));
                }
                if let Some(&s) = ctx.iter().find(|&&s| s >= alphabet) {
                    return Err(ProcessError::SymbolOutOfRange {
                        symbol: s,
                        alphabet,
                    });
                }
            }
            InitialContext::Distribution(d) => {
                if d.alphabet_size() != contexts {
                    return Err(ProcessError::InvalidSpec(format!(
                        "initial distribution covers {} contexts, expected {contexts}",
                        d.alphabet_size()
                    )));
                }
                let deviation = spec.stationarity_deviation(d.probs());
                if deviation > COMPARISON_TOLERANCE {
                    return Err(ProcessError::NotStationary { deviation });
                }
            }
        }
        Ok(spec)
    }

    /// A memoryless process viewed as a `0`-memory chain.
    pub fn iid(law: IidSpec) -> Self {
        Self {
            alphabet: law.alphabet_size(),
            memory: 0,
            delta: vec![law],
            init: InitialContext::Fixed(Vec::new()),
        }
    }

    /// Uses the stationary law of the context chain as the initial distribution.
    pub fn with_stationary_init(
        alphabet: usize,
        memory: usize,
        delta: Vec<IidSpec>,
    ) -> Result<Self, ProcessError> {
        if memory == 0 {
            return Self::new(alphabet, 0, delta, InitialContext::Fixed(Vec::new()));
        }
        let draft = Self {
            alphabet,
            memory,
            delta,
            init: InitialContext::Fixed(vec![0; memory]),
        };
        // validate shape before the stationary solve
        let draft = Self::new(alphabet, memory, draft.delta, draft.init)?;
        let pi = info::stationary_contexts(alphabet, memory, &draft.transition_rows())?;
        let init = IidSpec::new(&pi)?;
        Self::new(
            alphabet,
            memory,
            draft.delta,
            InitialContext::Distribution(init),
        )
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn delta(&self) -> &[IidSpec] {
        &self.delta
    }

    pub fn init(&self) -> &InitialContext {
        &self.init
    }

    pub fn num_contexts(&self) -> usize {
        self.delta.len()
    }

    pub fn transition_rows(&self) -> Vec<&[f64]> {
        self.delta.iter().map(|d| d.probs()).collect()
    }

    /// Largest violation of shift consistency: the law of the last `L` symbols
    /// of an `(L+1)`-block must equal the law of the first `L`.
    fn stationarity_deviation(&self, init: &[f64]) -> f64 {
        let n = self.num_contexts();
        let mut shifted = vec![0.0; n];
        for (c, w) in init.iter().enumerate() {
            for (s, p) in self.delta[c].probs().iter().enumerate() {
                shifted[(c * self.alphabet + s) % n] += w * p;
            }
        }
        shifted
            .iter()
            .zip(init)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn next_context(&self, ctx: usize, symbol: usize) -> usize {
        (ctx * self.alphabet + symbol) % self.num_contexts()
    }

    /// Mass the initial law puts on contexts starting with `prefix`.
    fn prefix_mass(&self, prefix: &[usize]) -> f64 {
        match &self.init {
            InitialContext::Fixed(ctx) => {
                if ctx[..prefix.len()] == *prefix {
                    1.0
                } else {
                    0.0
                }
            }
            InitialContext::Distribution(d) => {
                let span = self.alphabet.pow((self.memory - prefix.len()) as u32);
                let start = context_index(prefix, self.alphabet) * span;
                d.probs()[start..start + span].iter().sum()
            }
        }
    }

    /// `P(next symbol | history)`. Histories shorter than `L` condition on the
    /// initial law; longer ones use only their last `L` symbols. When the
    /// history itself has probability zero the result is all zeros.
    pub fn conditional(&self, history: &[usize]) -> Cow<'_, [f64]> {
        let n = history.len();
        if n >= self.memory {
            let ctx = context_index(&history[n - self.memory..], self.alphabet);
            return Cow::Borrowed(self.delta[ctx].probs());
        }
        let total = self.prefix_mass(history);
        let mut probs = vec![0.0; self.alphabet];
        if total > 0.0 {
            let mut extended = history.to_vec();
            for (s, slot) in probs.iter_mut().enumerate() {
                extended.push(s);
                *slot = self.prefix_mass(&extended) / total;
                extended.pop();
            }
        }
        Cow::Owned(probs)
    }

    /// `log2 P(x_1 … x_t)`; `-inf` for impossible sequences.
    pub fn log2_prob(&self, seq: &[usize]) -> f64 {
        let head = seq.len().min(self.memory);
        let mut lp = self.prefix_mass(&seq[..head]).log2();
        if seq.len() <= self.memory || lp == f64::NEG_INFINITY {
            return lp;
        }
        let mut ctx = context_index(&seq[..self.memory], self.alphabet);
        for &s in &seq[self.memory..] {
            let p = self.delta[ctx].probs()[s];
            if p == 0.0 {
                return f64::NEG_INFINITY;
            }
            lp += p.log2();
            ctx = self.next_context(ctx, s);
        }
        lp
    }

    /// Probabilities of all `k^t` sequences, first symbol most significant.
    pub fn sequence_probabilities(&self, horizon: usize) -> Result<Vec<f64>, info::InfoError> {
        let size = enumeration_size(self.alphabet, horizon)?;
        let mut out = Vec::with_capacity(size);
        let mut prefix = Vec::with_capacity(horizon);
        self.fill(&mut prefix, 1.0, horizon, &mut out);
        Ok(out)
    }

    fn fill(&self, prefix: &mut Vec<usize>, prob: f64, horizon: usize, out: &mut Vec<f64>) {
        if prefix.len() == horizon {
            out.push(prob);
            return;
        }
        let cond = self.conditional(prefix).into_owned();
        for (s, p) in cond.into_iter().enumerate() {
            if prob * p == 0.0 {
                let span = self.alphabet.pow((horizon - prefix.len() - 1) as u32);
                out.extend(std::iter::repeat_n(0.0, span));
                continue;
            }
            prefix.push(s);
            self.fill(prefix, prob * p, horizon, out);
            prefix.pop();
        }
    }

    /// Draws the initial context, oldest symbol first.
    pub(crate) fn draw_initial(&self, src: &mut BitSource) -> Vec<usize> {
        match &self.init {
            InitialContext::Fixed(ctx) => ctx.clone(),
            InitialContext::Distribution(d) => {
                let c = sample_discrete(d, src).symbol;
                context_symbols(c, self.alphabet, self.memory)
            }
        }
    }

    pub(crate) fn draw_next(&self, history_tail: &[usize], src: &mut BitSource) -> usize {
        let ctx = context_index(history_tail, self.alphabet);
        sample_discrete(&self.delta[ctx], src).symbol
    }
}

pub(crate) fn context_count(alphabet: usize, memory: usize) -> Result<usize, ProcessError> {
    let n = (alphabet as f64).powi(memory as i32);
    if n > info::MAX_ENUMERATION as f64 {
        return Err(ProcessError::InvalidSpec(format!(
            "{alphabet}^{memory} contexts exceed the limit of {}",
            info::MAX_ENUMERATION
        )));
    }
    Ok(alphabet.pow(memory as u32))
}
