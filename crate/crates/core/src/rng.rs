//! Counter-based splittable random number generator.
//!
//! Monte Carlo results must be a deterministic function of `(seed, m)` only,
//! independent of thread count and work partitioning. Each logical task
//! (a sample, a sampled direction) therefore owns its own stream, derived
//! from `(seed, stream_index)` through a strong 64-bit mixer; no state is
//! shared between tasks.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer: high-quality 64-bit mixing.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A small, fast generator with SplitMix64 state transition.
///
/// Streams derived from distinct `(seed, stream)` pairs are statistically
/// independent for the purposes of this crate's Monte Carlo estimators.
#[derive(Clone, Debug)]
pub struct CounterRng {
    state: u64,
}

impl CounterRng {
    /// Stream `stream` of the generator family keyed by `seed`.
    pub fn from_seed_stream(seed: u64, stream: u64) -> Self {
        let state = mix64(seed ^ mix64(stream.wrapping_mul(GOLDEN).wrapping_add(GOLDEN)));
        Self { state }
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::from_seed_stream(seed, 0)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform in `(0, 1]`; safe as a logarithm argument.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal draw by the Box–Muller map.
    ///
    /// Consumes exactly two words per call so that consumption is
    /// schedule-independent; the sine branch is discarded.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
