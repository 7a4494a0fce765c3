//! Plausible deniability checks and the greatest deniable structure.

use crate::error::Result;
use crate::model::{classify_messages, BaselineStructure, JointStructure, MessageClass, Monotonicity};
use crate::scalar::Scalar;
use crate::Rational;

/// First `(x, y, state)` where a column breaks its class's monotonicity;
/// the column's value at `state` is out of order with `state + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdViolation {
    pub x: usize,
    pub y: usize,
    pub state: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdReport {
    pub holds: bool,
    pub violation: Option<PdViolation>,
}

/// First index `k` with `col[k], col[k+1]` out of the required order.
fn first_break<T: Scalar>(col: &[T], class: MessageClass, constant: bool) -> Option<usize> {
    (0..col.len().saturating_sub(1)).find(|&k| {
        let (a, b) = (&col[k], &col[k + 1]);
        match class {
            _ if constant => !a.approx_eq(b),
            MessageClass::D => a.approx_lt(b),
            MessageClass::I => b.approx_lt(a),
            MessageClass::S => false,
        }
    })
}

/// Column-wise deniability test: decreasing D columns (constant when the
/// baseline column is), increasing I columns, anything for S.
pub fn check_plausible_deniability<T: Scalar>(h: &JointStructure<T>, f: &BaselineStructure<T>) -> Result<PdReport> {
    h.check_consistent(f)?;
    let c = classify_messages(f);
    for x in 0..h.nx() {
        let constant = Monotonicity::of(f.column(x)) == Monotonicity::Constant;
        for y in 0..h.ny() {
            if let Some(state) = first_break(h.column(x, y), c.class_of(x), constant) {
                return Ok(PdReport { holds: false, violation: Some(PdViolation { x, y, state }) });
            }
        }
    }
    Ok(PdReport { holds: true, violation: None })
}

/// Step-down `e_{≤k}` (D), step-up `e_{≥k}` (I) or coordinate `e_k` (S), `k` zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtremeRay {
    pub class: MessageClass,
    pub cutoff: usize,
}

impl ExtremeRay {
    pub fn vector<T: Scalar>(&self, n: usize) -> Vec<T> {
        (0..n)
            .map(|i| {
                let on = match self.class {
                    MessageClass::D => i <= self.cutoff,
                    MessageClass::I => i >= self.cutoff,
                    MessageClass::S => i == self.cutoff,
                };
                if on {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect()
    }

    /// Canonical y-label, cutoff one-based.
    pub fn label(&self) -> String {
        format!("ray:{}:{}", self.class.tag(), self.cutoff + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremeRayDecomposition<T: Scalar = Rational> {
    /// Per message, rays with strictly positive coefficients, ascending cutoff.
    pub rays: Vec<Vec<(ExtremeRay, T)>>,
}

impl<T: Scalar> ExtremeRayDecomposition<T> {
    pub fn reconstruct(&self, x: usize, n: usize) -> Vec<T> {
        let mut v = vec![T::zero(); n];
        for (ray, c) in &self.rays[x] {
            for (vi, ri) in v.iter_mut().zip(ray.vector::<T>(n)) {
                *vi = vi.clone() + c.clone() * ri;
            }
        }
        v
    }
}

/// Rays and coefficients of a single column of the given class.
pub fn decompose_column<T: Scalar>(col: &[T], class: MessageClass) -> Vec<(ExtremeRay, T)> {
    let n = col.len();
    let at = |k: isize| if k < 0 || k >= n as isize { T::zero() } else { col[k as usize].clone() };
    (0..n)
        .map(|k| {
            let c = match class {
                MessageClass::D => at(k as isize) - at(k as isize + 1),
                MessageClass::I => at(k as isize) - at(k as isize - 1),
                MessageClass::S => at(k as isize),
            };
            (ExtremeRay { class, cutoff: k }, c)
        })
        .filter(|(_, c)| !c.is_nil())
        .collect()
}

pub fn telescoping_decompose<T: Scalar>(f: &BaselineStructure<T>) -> ExtremeRayDecomposition<T> {
    let c = classify_messages(f);
    ExtremeRayDecomposition {
        rays: (0..f.num_messages()).map(|x| decompose_column(f.column(x), c.class_of(x))).collect(),
    }
}

/// One y-message per extreme ray, labelled `ray:<class>:<cutoff>`.
pub fn pd_greatest<T: Scalar>(f: &BaselineStructure<T>) -> JointStructure<T> {
    let dec = telescoping_decompose(f);
    let mut used: Vec<ExtremeRay> = dec.rays.iter().flatten().map(|(r, _)| *r).collect();
    used.sort_by_key(|r| (class_rank(r.class), r.cutoff));
    used.dedup();
    let n = f.num_states();
    let labels = used.iter().map(ExtremeRay::label).collect();
    JointStructure::from_fn(f.messages().to_vec(), labels, n, |x, y, k| {
        dec.rays[x]
            .iter()
            .find(|(r, _)| *r == used[y])
            .map_or(T::zero(), |(r, c)| c.clone() * r.vector::<T>(n)[k].clone())
    })
    .expect("rays reassemble the baseline")
}

fn class_rank(c: MessageClass) -> u8 {
    match c {
        MessageClass::D => 0,
        MessageClass::S => 1,
        MessageClass::I => 2,
    }
}

/// The ray `col` is a positive multiple of, if it is one for `class`.
pub fn ray_of<T: Scalar>(col: &[T], class: MessageClass) -> Option<ExtremeRay> {
    let rays = decompose_column(col, class);
    if rays.len() != 1 {
        return None;
    }
    let (ray, c) = &rays[0];
    let exact = ray.vector::<T>(col.len()).into_iter().zip(col).all(|(r, v)| (r * c.clone()).approx_eq(v));
    (exact && c.is_pos()).then_some(*ray)
}

/// Whether every nonzero column is a multiple of an admissible extreme ray.
pub fn is_pd_greatest<T: Scalar>(h: &JointStructure<T>, f: &BaselineStructure<T>) -> Result<bool> {
    h.check_consistent(f)?;
    let c = classify_messages(f);
    Ok((0..h.nx()).all(|x| {
        (0..h.ny()).all(|y| {
            let col = h.column(x, y);
            col.iter().all(|v| v.is_nil()) || ray_of(col, c.class_of(x)).is_some()
        })
    }))
}
