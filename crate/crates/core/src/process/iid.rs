use crate::info::{entropy, ProbVector};

use super::{BitSource, ProcessError};

/// Bits of precision used when a floating-point law is turned into a dyadic one.
pub const DYADIC_PRECISION: u32 = 53;

/// An independent, identically distributed source over `{0, …, k-1}`.
///
/// Besides the declared probabilities the spec keeps a dyadic approximation
/// `numerators[i] / 2^precision` which drives exact sampling from fair coin
/// flips. Laws given as dyadic rationals are represented without error;
/// others are rounded to [`DYADIC_PRECISION`] bits, with every positive
/// probability kept positive and the rounding slack absorbed by the largest
/// entry.
#[derive(Debug, Clone, PartialEq)]
pub struct IidSpec {
    probs: ProbVector,
    numerators: Vec<u64>,
    precision: u32,
    cumulative: Vec<u128>,
    rounding_error: f64,
}

impl IidSpec {
    pub fn new(probs: &[f64]) -> Result<Self, ProcessError> {
        let probs = ProbVector::new(probs.to_vec())?;
        let scale = (1u64 << DYADIC_PRECISION) as f64;
        let mut numerators: Vec<u64> = probs
            .probs()
            .iter()
            .map(|&p| {
                let n = (p * scale).round() as u64;
                if p > 0.0 && n == 0 {
                    1
                } else {
                    n
                }
            })
            .collect();
        let total: i128 = numerators.iter().map(|&n| n as i128).sum();
        let slack = (1i128 << DYADIC_PRECISION) - total;
        let largest = (0..numerators.len())
            .max_by_key(|&i| numerators[i])
            .expect("non-empty");
        let adjusted = numerators[largest] as i128 + slack;
        if adjusted < 1 {
            return Err(ProcessError::Dyadic(
                "rounding slack exceeds the largest probability".into(),
            ));
        }
        numerators[largest] = adjusted as u64;
        let (numerators, precision) = reduce(numerators, DYADIC_PRECISION);
        let rounding_error = probs
            .probs()
            .iter()
            .zip(&numerators)
            .map(|(&p, &n)| (p - n as f64 / (1u128 << precision) as f64).abs())
            .fold(0.0, f64::max);
        Ok(Self::assemble(probs, numerators, precision, rounding_error))
    }

    /// The law `numerators[i] / 2^exponent`; numerators must sum to `2^exponent`.
    pub fn from_dyadic(numerators: &[u64], exponent: u32) -> Result<Self, ProcessError> {
        let probs = ProbVector::from_dyadic(numerators, exponent)?;
        let (numerators, precision) = reduce(numerators.to_vec(), exponent);
        Ok(Self::assemble(probs, numerators, precision, 0.0))
    }

    /// Bernoulli law emitting symbol `1` with probability `p`.
    pub fn bernoulli(p: f64) -> Result<Self, ProcessError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ProcessError::Info(
                crate::info::InfoError::ProbabilityOutOfRange(p),
            ));
        }
        Self::new(&[1.0 - p, p])
    }

    pub fn uniform(k: usize) -> Result<Self, ProcessError> {
        Self::new(ProbVector::uniform(k)?.probs())
    }

    fn assemble(
        probs: ProbVector,
        numerators: Vec<u64>,
        precision: u32,
        rounding_error: f64,
    ) -> Self {
        let mut cumulative = Vec::with_capacity(numerators.len() + 1);
        cumulative.push(0u128);
        for &n in &numerators {
            cumulative.push(cumulative.last().unwrap() + n as u128);
        }
        Self {
            probs,
            numerators,
            precision,
            cumulative,
            rounding_error,
        }
    }

    pub fn probs(&self) -> &[f64] {
        self.probs.probs()
    }

    pub fn prob_vector(&self) -> &ProbVector {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.alphabet_size()
    }

    pub fn entropy(&self) -> f64 {
        entropy(&self.probs)
    }

    /// Dyadic numerators actually used for sampling.
    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    /// Exponent `d` of the common denominator `2^d`.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Largest absolute difference between a declared and a sampled probability.
    pub fn rounding_error(&self) -> f64 {
        self.rounding_error
    }

    /// Whether the declared law is exactly representable with the dyadic one.
    pub fn is_dyadic(&self) -> bool {
        self.rounding_error == 0.0
    }
}

fn reduce(mut numerators: Vec<u64>, mut precision: u32) -> (Vec<u64>, u32) {
    while precision > 0 && numerators.iter().all(|n| n % 2 == 0) {
        numerators.iter_mut().for_each(|n| *n /= 2);
        precision -= 1;
    }
    (numerators, precision)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscreteSample {
    pub symbol: usize,
    /// Fair bits consumed to produce the symbol.
    pub bits: u32,
}

/// Draws one symbol from `spec` by refining a dyadic interval with fair bits
/// until it lies inside a single cell of the cumulative distribution.
///
/// The expected bit cost lies in `[H, H + 2)` for the dyadic law, and the cost
/// never exceeds the law's precision.
pub fn sample_discrete(spec: &IidSpec, src: &mut BitSource) -> DiscreteSample {
    let d = spec.precision;
    let cum = &spec.cumulative;
    let mut low: u128 = 0;
    let mut bits = 0u32;
    loop {
        let width = 1u128 << (d - bits);
        let symbol = cum.partition_point(|&c| c <= low) - 1;
        if low + width <= cum[symbol + 1] {
            return DiscreteSample { symbol, bits };
        }
        bits += 1;
        if src.next_bit() {
            low += 1u128 << (d - bits);
        }
    }
}
