//! Seeded Monte Carlo draws of `(ω, x, y)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{JointStructure, Prior};
use crate::scalar::Scalar;

const SCALE: u64 = 1 << 53;

fn thresholds<T: Scalar>(p: impl IntoIterator<Item = T>) -> Vec<u64> {
    let mut acc = T::zero();
    p.into_iter()
        .map(|v| {
            acc = acc.clone() + v;
            acc.floor_scaled_53()
        })
        .collect()
}

fn pick(th: &[u64], u: u64) -> usize {
    th.partition_point(|&t| t <= u).min(th.len() - 1)
}

/// Precomputed cumulative tables for repeated draws.
#[derive(Debug, Clone)]
pub struct RoundSampler {
    states: Vec<u64>,
    pairs: Vec<Vec<u64>>,
    ny: usize,
}

impl RoundSampler {
    /// `mass` may put zero weight on some states.
    pub fn new<T: Scalar>(h: &JointStructure<T>, mass: &[T]) -> Result<Self> {
        if mass.len() != h.num_states() {
            return Err(Error::StateMismatch(mass.len(), h.num_states()));
        }
        let pairs = (0..h.num_states())
            .map(|k| thresholds(h.flat_columns().iter().map(|c| c[k].clone())))
            .collect();
        Ok(RoundSampler { states: thresholds(mass.iter().cloned()), pairs, ny: h.ny() })
    }

    /// `(state, x, y)` indices.
    pub fn draw(&self, rng: &mut impl Rng) -> (usize, usize, usize) {
        let k = pick(&self.states, rng.gen_range(0..SCALE));
        let c = pick(&self.pairs[k], rng.gen_range(0..SCALE));
        (k, c / self.ny, c % self.ny)
    }
}

/// Draws `ω ~ μ` and then `(x, y) ~ h(·,·|ω)`.
pub fn sample_round<T: Scalar>(h: &JointStructure<T>, prior: &Prior<T>, seed: u64) -> Result<(usize, usize, usize)> {
    sample_round_with_mass(h, prior.mass(), seed)
}

/// As [`sample_round`] with a raw state distribution that may be degenerate.
pub fn sample_round_with_mass<T: Scalar>(h: &JointStructure<T>, mass: &[T], seed: u64) -> Result<(usize, usize, usize)> {
    let s = RoundSampler::new(h, mass)?;
    Ok(s.draw(&mut ChaCha8Rng::seed_from_u64(seed)))
}
