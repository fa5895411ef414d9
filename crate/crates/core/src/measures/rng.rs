use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const TWO_M53: f64 = 1.0 / (1u64 << 53) as f64;

/// Seeded pseudo-random stream. The same seed always gives the same draws.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    counter: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of 64-bit words drawn so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// An independent stream with the same seed.
    pub fn fork(&self, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream.wrapping_add(1));
        Self { seed: self.seed, counter: 0, rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        self.rng.next_u64()
    }

    /// Uniform integer in `[0, 2^53)`.
    pub fn next_53(&mut self) -> u64 {
        self.next_u64() >> 11
    }

    /// Uniform on the grid `k / 2^53` in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.next_53() as f64 * TWO_M53
    }

    /// Uniform numerator `k` in `[1, 2^53)`, so that `k / 2^53` is in `(0, 1)`.
    pub fn dyadic_open(&mut self) -> u64 {
        loop {
            let k = self.next_53();
            if k != 0 {
                return k;
            }
        }
    }

    /// Uniform on `(0, 1)`.
    pub fn uniform_open(&mut self) -> f64 {
        self.dyadic_open() as f64 * TWO_M53
    }
}
