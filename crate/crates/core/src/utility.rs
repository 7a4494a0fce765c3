//! Single-crossing utilities with a unique prior-optimal default action.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{ActionSpace, JointStructure, Prior};
use crate::scalar::Scalar;
use crate::Rational;

/// `u(a, ω)` stored as `values[a][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityMatrix<T: Scalar = Rational> {
    actions: ActionSpace,
    values: Vec<Vec<T>>,
}

impl<T: Scalar> UtilityMatrix<T> {
    pub fn new(actions: ActionSpace, values: Vec<Vec<T>>) -> Result<Self> {
        if values.len() != actions.len() {
            return Err(Error::InvalidUtility("one row per action required".into()));
        }
        let n = values.first().map_or(0, |r| r.len());
        if n == 0 || values.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidUtility("ragged utility rows".into()));
        }
        Ok(UtilityMatrix { actions, values })
    }

    pub fn actions(&self) -> &ActionSpace {
        &self.actions
    }

    pub fn values(&self) -> &[Vec<T>] {
        &self.values
    }

    pub fn row(&self, a: usize) -> &[T] {
        &self.values[a]
    }

    pub fn num_states(&self) -> usize {
        self.values[0].len()
    }

    /// Expected utility of each action under the (possibly unnormalized) belief `w`.
    pub fn expected(&self, w: &[T]) -> Vec<T> {
        self.values
            .iter()
            .map(|r| r.iter().zip(w).fold(T::zero(), |s, (u, p)| s + u.clone() * p.clone()))
            .collect()
    }

    /// Lowest-index maximizer of expected utility under `w`.
    pub fn best_action(&self, w: &[T]) -> usize {
        let e = self.expected(w);
        let mut best = 0;
        for a in 1..e.len() {
            if e[best].approx_lt(&e[a]) {
                best = a;
            }
        }
        best
    }

    /// All maximizers of expected utility under `w`.
    pub fn optimal_actions(&self, w: &[T]) -> Vec<usize> {
        let e = self.expected(w);
        let top = e[self.best_action(w)].clone();
        (0..e.len()).filter(|&a| e[a].approx_eq(&top)).collect()
    }

    /// `u(a, ω)` for the reflected problem: actions and states both reversed.
    pub fn reflected(&self) -> Self {
        UtilityMatrix {
            actions: self.actions.reversed(),
            values: self.values.iter().rev().map(|r| r.iter().rev().cloned().collect()).collect(),
        }
    }

    /// `α u + β`.
    pub fn affine(&self, alpha: &T, beta: &T) -> Self {
        UtilityMatrix {
            actions: self.actions.clone(),
            values: self
                .values
                .iter()
                .map(|r| r.iter().map(|v| alpha.clone() * v.clone() + beta.clone()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UtilityViolation {
    /// `u(hi) - u(lo)` is not single-crossing between states `from` and `to`.
    SingleCrossing { lo: usize, hi: usize, from: usize, to: usize },
    /// The default is not the unique prior maximizer; `rival` ties or beats it.
    DefaultNotUnique { rival: usize },
    StateMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityReport {
    pub valid: bool,
    pub violation: Option<UtilityViolation>,
}

/// First `(from, to)` with `from < to` breaking single crossing of `d`.
pub fn single_crossing_violation<T: Scalar>(d: &[T]) -> Option<(usize, usize)> {
    for k in 0..d.len() {
        for k2 in k + 1..d.len() {
            let weak = !d[k].is_neg() && d[k2].is_neg();
            let strict = d[k].is_pos() && !d[k2].is_pos();
            if weak || strict {
                return Some((k, k2));
            }
        }
    }
    None
}

pub fn is_single_crossing<T: Scalar>(d: &[T]) -> bool {
    single_crossing_violation(d).is_none()
}

pub fn validate_utility<T: Scalar>(u: &UtilityMatrix<T>, prior: &Prior<T>) -> UtilityReport {
    let bad = |v| UtilityReport { valid: false, violation: Some(v) };
    if u.num_states() != prior.len() {
        return bad(UtilityViolation::StateMismatch);
    }
    let m = u.values.len();
    for lo in 0..m {
        for hi in lo + 1..m {
            let d: Vec<T> = u.values[hi].iter().zip(&u.values[lo]).map(|(a, b)| a.clone() - b.clone()).collect();
            if let Some((from, to)) = single_crossing_violation(&d) {
                return bad(UtilityViolation::SingleCrossing { lo, hi, from, to });
            }
        }
    }
    let e = u.expected(prior.mass());
    let a0 = u.actions.default_index();
    if let Some(rival) = (0..m).find(|&a| a != a0 && !e[a].approx_lt(&e[a0])) {
        return bad(UtilityViolation::DefaultNotUnique { rival });
    }
    UtilityReport { valid: true, violation: None }
}

fn draw_increment<T: Scalar>(rng: &mut ChaCha8Rng, mu: &[T], cutoff: usize, expect_negative: bool) -> Vec<T> {
    let n = mu.len();
    let mut neg: Vec<T> = (0..cutoff).map(|_| T::from_i64(rng.gen_range(1..=9))).collect();
    let mut pos: Vec<T> = (cutoff..n).map(|_| T::from_i64(rng.gen_range(1..=9))).collect();
    let wsum = |v: &[T], off: usize| v.iter().enumerate().fold(T::zero(), |s, (k, x)| s + x.clone() * mu[k + off].clone());
    let (mn, mp) = (wsum(&neg, 0), wsum(&pos, cutoff));
    let shrink = T::from_ratio(rng.gen_range(1..=9), 10);
    if expect_negative && !mp.approx_lt(&mn) {
        let f = mn / mp * shrink;
        pos.iter_mut().for_each(|v| *v = v.clone() * f.clone());
    } else if !expect_negative && !mn.approx_lt(&mp) {
        let f = mp / mn * shrink;
        neg.iter_mut().for_each(|v| *v = v.clone() * f.clone());
    }
    neg.into_iter().map(|v| -v).chain(pos).collect()
}

/// Common-cutoff construction: every adjacent increment changes sign at one state.
fn sample_common_cutoff<T: Scalar>(a: &ActionSpace, prior: &Prior<T>, rng: &mut ChaCha8Rng) -> UtilityMatrix<T> {
    let n = prior.len();
    let mu = prior.mass();
    let cutoff = rng.gen_range(1..n);
    let a0 = a.default_index();
    let base: Vec<T> = (0..n).map(|_| T::from_i64(rng.gen_range(-3..=3))).collect();
    let mut values = vec![base.clone(); a.len()];
    for j in a0 + 1..a.len() {
        let r = draw_increment(rng, mu, cutoff, true);
        values[j] = values[j - 1].iter().zip(r).map(|(u, d)| u.clone() + d).collect();
    }
    for j in (0..a0).rev() {
        let s = draw_increment(rng, mu, cutoff, false);
        values[j] = values[j + 1].iter().zip(s).map(|(u, d)| u.clone() - d).collect();
    }
    UtilityMatrix::new(a.clone(), values).expect("shape is consistent")
}

/// A random utility in the single-crossing class with `a0` uniquely prior-optimal.
///
/// Two thirds of the draws use the common-cutoff scheme; the rest try
/// rejection sampling of small integer matrices first.
pub fn sample_utility<T: Scalar>(a: &ActionSpace, prior: &Prior<T>, seed: u64) -> UtilityMatrix<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_utility_with(a, prior, &mut rng)
}

pub fn sample_utility_with<T: Scalar>(a: &ActionSpace, prior: &Prior<T>, rng: &mut ChaCha8Rng) -> UtilityMatrix<T> {
    if rng.gen_range(0..3) == 0 {
        for _ in 0..64 {
            let values = (0..a.len())
                .map(|_| (0..prior.len()).map(|_| T::from_i64(rng.gen_range(-4..=4))).collect())
                .collect();
            let u = UtilityMatrix::new(a.clone(), values).expect("shape is consistent");
            if validate_utility(&u, prior).valid {
                return u;
            }
        }
    }
    sample_common_cutoff(a, prior, rng)
}

/// μ-weighted support columns of a joint structure, for repeated valuation.
#[derive(Debug, Clone)]
pub struct WeightedExperiment<T: Scalar = Rational> {
    cols: Vec<Vec<T>>,
}

impl<T: Scalar> WeightedExperiment<T> {
    pub fn new(h: &JointStructure<T>, prior: &Prior<T>) -> Result<Self> {
        if h.num_states() != prior.len() {
            return Err(Error::StateMismatch(h.num_states(), prior.len()));
        }
        Ok(Self::from_columns(h.flat_columns(), prior.mass()))
    }

    pub fn from_columns(cols: &[Vec<T>], mu: &[T]) -> Self {
        let cols = cols
            .iter()
            .filter(|c| c.iter().any(|v| !v.is_nil()))
            .map(|c| c.iter().zip(mu).map(|(a, b)| a.clone() * b.clone()).collect())
            .collect();
        WeightedExperiment { cols }
    }

    /// `Σ_cols max_a Σ_ω μ(ω) h(col|ω) u(a, ω)` without validating `u`.
    pub fn value(&self, u: &UtilityMatrix<T>) -> T {
        self.cols.iter().fold(T::zero(), |acc, c| {
            let e = u.expected(c);
            let top = e.into_iter().reduce(|a, b| if a.approx_lt(&b) { b } else { a }).expect("nonempty");
            acc + top
        })
    }
}

/// Ex-ante value of the receiver's best response under `h`.
pub fn value_of_information<T: Scalar>(h: &JointStructure<T>, u: &UtilityMatrix<T>, prior: &Prior<T>) -> Result<T> {
    let report = validate_utility(u, prior);
    if !report.valid {
        return Err(Error::InvalidUtility(format!("{:?}", report.violation)));
    }
    Ok(WeightedExperiment::new(h, prior)?.value(u))
}
