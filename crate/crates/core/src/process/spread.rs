use crate::info::divergences_of;

use super::{sample_discrete, BitSource, IidSpec, ProcessError};

/// Embeds an `n`-bit message in a symbol stream: the symbol at position `j`
/// is drawn from `components[message[j mod n]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadCode {
    message_len: usize,
    components: [IidSpec; 2],
}

impl SpreadCode {
    /// `components[0]` carries message bit `0` and `components[1]` bit `1`.
    /// Both must share an alphabet and differ, i.e. have positive relative
    /// entropy in each direction.
    pub fn new(message_len: usize, zero: IidSpec, one: IidSpec) -> Result<Self, ProcessError> {
        if message_len == 0 {
            return Err(ProcessError::InvalidCode(
                "message length must be positive".into(),
            ));
        }
        validate_components(&zero, &one)?;
        Ok(Self {
            message_len,
            components: [zero, one],
        })
    }

    pub fn message_len(&self) -> usize {
        self.message_len
    }

    pub fn components(&self) -> &[IidSpec; 2] {
        &self.components
    }
}

fn validate_components(zero: &IidSpec, one: &IidSpec) -> Result<(), ProcessError> {
    if zero.alphabet_size() != one.alphabet_size() {
        return Err(ProcessError::InvalidCode(format!(
            "component alphabets differ: {} vs {}",
            zero.alphabet_size(),
            one.alphabet_size()
        )));
    }
    let forward = divergences_of(zero.probs(), one.probs()).kl;
    let backward = divergences_of(one.probs(), zero.probs()).kl;
    if forward <= 0.0 || backward <= 0.0 {
        return Err(ProcessError::IdenticalComponents(0, 1));
    }
    Ok(())
}

/// Emits `t` symbols carrying `message`.
pub fn spread_encode(
    code: &SpreadCode,
    message: &[bool],
    t: usize,
    src: &mut BitSource,
) -> Result<Vec<usize>, ProcessError> {
    if message.len() != code.message_len {
        return Err(ProcessError::InvalidCode(format!(
            "message has {} bits, code expects {}",
            message.len(),
            code.message_len
        )));
    }
    if t == 0 {
        return Err(ProcessError::InvalidCode(
            "stream length must be positive".into(),
        ));
    }
    Ok((0..t)
        .map(|j| {
            let bit = message[j % code.message_len] as usize;
            sample_discrete(&code.components[bit], src).symbol
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpreadDecoding {
    /// Maximum-likelihood bit per message index; `None` when the evidence is
    /// tied or the index received no observations.
    pub bits: Vec<Option<bool>>,
    /// `|log2 P(obs | 1) − log2 P(obs | 0)|` per index.
    pub confidence: Vec<f64>,
    /// Observations that landed on each index.
    pub observations: Vec<usize>,
}

impl SpreadDecoding {
    /// Decoded message when every bit is determined.
    pub fn message(&self) -> Option<Vec<bool>> {
        self.bits.iter().copied().collect()
    }

    /// Posterior probability that the decoded message is wrong under a uniform
    /// prior on message bits. Undetermined bits count as a coin flip.
    pub fn error_probability(&self) -> f64 {
        let correct: f64 = self
            .bits
            .iter()
            .zip(&self.confidence)
            .map(|(b, c)| match b {
                None => 0.5,
                // 1 / (1 + 2^c), written to stay exact for large c
                Some(_) => 1.0 - 1.0 / (1.0 + c.exp2()),
            })
            .product();
        1.0 - correct
    }
}

/// Per-index maximum-likelihood decoding of a spread-coded stream.
pub fn spread_decode(
    observations: &[usize],
    message_len: usize,
    zero: &IidSpec,
    one: &IidSpec,
) -> Result<SpreadDecoding, ProcessError> {
    if message_len == 0 {
        return Err(ProcessError::InvalidCode(
            "message length must be positive".into(),
        ));
    }
    validate_components(zero, one)?;
    let k = zero.alphabet_size();
    if let Some(&symbol) = observations.iter().find(|&&s| s >= k) {
        return Err(ProcessError::SymbolOutOfRange {
            symbol,
            alphabet: k,
        });
    }
    let mut ll = vec![[0.0f64; 2]; message_len];
    let mut seen = vec![0usize; message_len];
    for (j, &x) in observations.iter().enumerate() {
        let b = j % message_len;
        ll[b][0] += zero.probs()[x].log2();
        ll[b][1] += one.probs()[x].log2();
        seen[b] += 1;
    }
    let mut bits = Vec::with_capacity(message_len);
    let mut confidence = Vec::with_capacity(message_len);
    for [l0, l1] in ll {
        let (bit, conf) = if l0 == f64::NEG_INFINITY && l1 == f64::NEG_INFINITY {
            (None, 0.0)
        } else if l1 > l0 {
            (Some(true), l1 - l0)
        } else if l0 > l1 {
            (Some(false), l0 - l1)
        } else {
            (None, 0.0)
        };
        bits.push(bit);
        confidence.push(conf);
    }
    Ok(SpreadDecoding {
        bits,
        confidence,
        observations: seen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(n: usize) -> SpreadCode {
        SpreadCode::new(
            n,
            IidSpec::bernoulli(0.2).unwrap(),
            IidSpec::bernoulli(0.8).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn identical_components_rejected() {
        let b = IidSpec::bernoulli(0.3).unwrap();
        assert_eq!(
            SpreadCode::new(3, b.clone(), b),
            Err(ProcessError::IdenticalComponents(0, 1))
        );
    }

    #[test]
    fn short_stream_leaves_bits_undetermined() {
        let c = code(4);
        let obs = spread_encode(&c, &[true, false, true, true], 2, &mut BitSource::new(1)).unwrap();
        let d = spread_decode(&obs, 4, &c.components()[0], &c.components()[1]).unwrap();
        assert_eq!(&d.bits[2..], &[None, None]);
        assert_eq!(d.observations, vec![1, 1, 0, 0]);
        assert!(d.message().is_none());
    }

    #[test]
    fn long_stream_recovers_message() {
        let c = code(8);
        let msg = [true, false, false, true, true, true, false, true];
        let obs = spread_encode(&c, &msg, 4000, &mut BitSource::new(9)).unwrap();
        let d = spread_decode(&obs, 8, &c.components()[0], &c.components()[1]).unwrap();
        assert_eq!(d.message().unwrap(), msg.to_vec());
        assert!(d.error_probability() < 1e-6);
    }

    #[test]
    fn ties_are_undetermined() {
        let (z, o) = (
            IidSpec::bernoulli(0.25).unwrap(),
            IidSpec::bernoulli(0.75).unwrap(),
        );
        // one 0 and one 1 on the same index: equal likelihoods
        let d = spread_decode(&[0, 1], 1, &z, &o).unwrap();
        assert_eq!(d.bits, vec![None]);
        assert_eq!(d.error_probability(), 0.5);
    }

    #[test]
    fn impossible_evidence_is_undetermined() {
        let (z, o) = (
            IidSpec::new(&[1.0, 0.0, 0.0]).unwrap(),
            IidSpec::new(&[0.0, 1.0, 0.0]).unwrap(),
        );
        let d = spread_decode(&[2], 1, &z, &o).unwrap();
        assert_eq!(d.bits, vec![None]);
        let d = spread_decode(&[1], 1, &z, &o).unwrap();
        assert_eq!(d.bits, vec![Some(true)]);
        assert_eq!(d.confidence, vec![f64::INFINITY]);
        assert_eq!(d.error_probability(), 0.0);
    }
}
