//! Reproducible random streams.
//!
//! A [`SeededRng`] is a ChaCha20 generator keyed by a 64-bit seed and
//! positioned on a 64-bit stream id. Parallel code never shares a generator:
//! it draws one base value from the caller's stream and gives every trial its
//! own child stream, so results do not depend on the worker count.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha20Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        SeededRng {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Deterministic child stream `index` of this generator's (seed, stream).
    pub fn child(&self, index: u64) -> SeededRng {
        SeededRng::new(self.seed, splitmix64(self.stream ^ splitmix64(index)))
    }

    /// Draws a fresh base and returns a factory of per-trial generators.
    pub fn trial_streams(&mut self) -> TrialStreams {
        TrialStreams {
            base: self.inner.next_u64(),
        }
    }

    pub fn coin(&mut self) -> bool {
        self.inner.gen::<bool>()
    }

    /// Uniform real in [0, 1).
    pub fn unit(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }
}

/// Per-trial generator factory; trial `t` always gets the same stream.
#[derive(Clone, Copy, Debug)]
pub struct TrialStreams {
    base: u64,
}

impl TrialStreams {
    pub fn trial(&self, t: u64) -> SeededRng {
        SeededRng::new(self.base, t)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
