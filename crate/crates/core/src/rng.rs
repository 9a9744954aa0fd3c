//! Deterministic pseudo-random numbers for problem generation.
//!
//! All experiment data is generated from SplitMix64 (Steele, Lea & Flood,
//! "Fast splittable pseudorandom number generators", OOPSLA 2014): a 64-bit
//! counter advanced by the golden-ratio increment and scrambled by a
//! variant of the MurmurHash3 finalizer. It is fast, has a full 2^64 period,
//! and — unlike stdlib or OS sources — gives bit-identical streams on every
//! platform, so a problem spec plus a seed pins the experiment exactly.
//!
//! Independent streams (one per generated matrix or vector) are derived by
//! hashing a stream label into the seed, so adding a new consumer never
//! shifts the draws seen by existing ones.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// SplitMix64 generator with Box-Muller normal sampling.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    /// Spare normal deviate from the last Box-Muller pair.
    cached_normal: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed, cached_normal: None }
    }

    /// Derives the generator for sub-stream `label` of `seed`. Labels are
    /// small integers identifying what the stream is for (matrix, noise, ...).
    pub fn stream(seed: u64, label: u64) -> Self {
        Self::new(mix64(seed ^ mix64(label.wrapping_mul(GOLDEN_GAMMA).wrapping_add(1))))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in [0, 1), 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1]; safe as a log argument.
    fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal deviate via the Box-Muller transform.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        let u1 = self.next_f64_open();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.cached_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = self.next_normal();
        }
    }

    pub fn normal_vec(&mut self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        self.fill_normal(&mut v);
        v
    }

    /// Uniform integer in [0, bound) by rejection, bias-free.
    pub fn next_index(&mut self, bound: usize) -> usize {
        assert!(bound > 0);
        let bound = bound as u64;
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % bound) as usize;
            }
        }
    }
}
