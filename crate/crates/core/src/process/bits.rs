use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A reproducible stream of fair coin flips.
///
/// Bits come from a seeded ChaCha8 generator, 64 at a time, least significant
/// bit first. The number of bits handed out so far is tracked so samplers can
/// report their exact bit cost.
#[derive(Debug, Clone)]
pub struct BitSource {
    rng: ChaCha8Rng,
    buffer: u64,
    remaining: u32,
    consumed: u64,
}

impl BitSource {
    pub fn new(seed: u64) -> Self {
        Self::from_rng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// An independent stream derived from `seed`, e.g. one per Monte Carlo trial.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self::from_rng(rng)
    }

    fn from_rng(rng: ChaCha8Rng) -> Self {
        Self {
            rng,
            buffer: 0,
            remaining: 0,
            consumed: 0,
        }
    }

    pub fn next_bit(&mut self) -> bool {
        if self.remaining == 0 {
            self.buffer = self.rng.next_u64();
            self.remaining = 64;
        }
        let bit = self.buffer & 1 == 1;
        self.buffer >>= 1;
        self.remaining -= 1;
        self.consumed += 1;
        bit
    }

    /// Total number of bits drawn since construction.
    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    /// Underlying generator, for draws that are not bit-metered.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_bits() {
        let mut a = BitSource::new(7);
        let mut b = BitSource::new(7);
        let xs: Vec<bool> = (0..200).map(|_| a.next_bit()).collect();
        let ys: Vec<bool> = (0..200).map(|_| b.next_bit()).collect();
        assert_eq!(xs, ys);
        assert_eq!(a.consumed(), 200);
    }

    #[test]
    fn streams_differ() {
        let mut a = BitSource::with_stream(7, 0);
        let mut b = BitSource::with_stream(7, 1);
        let xs: Vec<bool> = (0..128).map(|_| a.next_bit()).collect();
        let ys: Vec<bool> = (0..128).map(|_| b.next_bit()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn roughly_fair() {
        let mut a = BitSource::new(1);
        let ones = (0..100_000).filter(|_| a.next_bit()).count();
        assert!((ones as f64 / 100_000.0 - 0.5).abs() < 0.01);
    }
}
