//! Blackwell dominance through garbling feasibility, and sampled evidence of
//! dominance over the single-crossing utility class.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lp::{lp_feasible, LinearSystem, Relation};
use crate::model::{apply_garbling, ActionSpace, Garbling, JointStructure, Prior};
use crate::rationalize::{rationalizable_actions, witness_utility};
use crate::scalar::Scalar;
use crate::utility::{sample_utility_with, UtilityMatrix, WeightedExperiment};
use crate::Rational;

/// Default number of sampled utilities for evidence checks.
pub const DEFAULT_SAMPLES: usize = 200;

fn nonzero<T: Scalar>(c: &[T]) -> bool {
    c.iter().any(|v| !v.is_nil())
}

fn support_within<T: Scalar>(s: &[T], t: &[T]) -> bool {
    s.iter().zip(t).all(|(a, b)| a.is_nil() || !b.is_nil())
}

/// Solves `Σ_s h1(s|ω) γ(t|s) = h2(t|ω)` over the given source/target columns.
fn solve_block<T: Scalar>(
    h1: &JointStructure<T>,
    h2: &JointStructure<T>,
    sources: &[usize],
    targets: &[usize],
) -> Option<Vec<(usize, usize, T)>> {
    let (c1, c2) = (h1.flat_columns(), h2.flat_columns());
    let n = h1.num_states();
    let mut vars = Vec::new();
    for &s in sources {
        for &t in targets {
            if support_within(&c1[s], &c2[t]) {
                vars.push((s, t));
            }
        }
    }
    let mut sys = LinearSystem::new(vars.len());
    for &t in targets {
        for k in 0..n {
            let coeffs: Vec<(usize, T)> = vars
                .iter()
                .enumerate()
                .filter(|(_, (s, tt))| *tt == t && !c1[*s][k].is_nil())
                .map(|(j, (s, _))| (j, c1[*s][k].clone()))
                .collect();
            if coeffs.is_empty() {
                if c2[t][k].is_nil() {
                    continue;
                }
                return None;
            }
            sys.add(coeffs, Relation::Eq, c2[t][k].clone());
        }
    }
    for &s in sources {
        let coeffs: Vec<(usize, T)> =
            vars.iter().enumerate().filter(|(_, (ss, _))| *ss == s).map(|(j, _)| (j, T::one())).collect();
        if coeffs.is_empty() {
            return None;
        }
        sys.add(coeffs, Relation::Eq, T::one());
    }
    let point = lp_feasible(&sys)?;
    Some(vars.into_iter().zip(point).filter(|(_, w)| !w.is_nil()).map(|((s, t), w)| (s, t, w)).collect())
}

/// A garbling taking `h1` to `h2`, if one exists.
///
/// With `x_preserving`, the kernel must keep the x-coordinate, which needs
/// both structures to share the same X.
pub fn blackwell_dominates<T: Scalar>(
    h1: &JointStructure<T>,
    h2: &JointStructure<T>,
    x_preserving: bool,
) -> Result<Option<Garbling<T>>> {
    if h1.num_states() != h2.num_states() {
        return Err(Error::StateMismatch(h1.num_states(), h2.num_states()));
    }
    if x_preserving && h1.x_messages() != h2.x_messages() {
        return Err(Error::SpaceMismatch("x-preserving garbling needs a shared X".into()));
    }
    let (ny1, ny2) = (h1.ny(), h2.ny());
    let src: Vec<usize> = (0..h1.flat_columns().len()).filter(|&s| nonzero(&h1.flat_columns()[s])).collect();
    let tgt: Vec<usize> = (0..h2.flat_columns().len()).filter(|&t| nonzero(&h2.flat_columns()[t])).collect();
    let weights = if x_preserving {
        let mut all = Vec::new();
        for x in 0..h1.nx() {
            let s: Vec<usize> = src.iter().copied().filter(|&s| s / ny1 == x).collect();
            let t: Vec<usize> = tgt.iter().copied().filter(|&t| t / ny2 == x).collect();
            if s.is_empty() && t.is_empty() {
                continue;
            }
            match solve_block(h1, h2, &s, &t) {
                Some(w) => all.extend(w),
                None => return Ok(None),
            }
        }
        all
    } else {
        match solve_block(h1, h2, &src, &tgt) {
            Some(w) => w,
            None => return Ok(None),
        }
    };
    let nt = h2.flat_columns().len();
    let mut rows = vec![vec![T::zero(); nt]; h1.flat_columns().len()];
    for (s, t, w) in weights {
        rows[s][t] = w;
    }
    for (s, row) in rows.iter_mut().enumerate() {
        if !src.contains(&s) {
            row[if x_preserving { (s / ny1) * ny2 } else { 0 }] = T::one();
        }
    }
    let g = Garbling::new(
        h1.x_messages().to_vec(),
        h1.y_messages().to_vec(),
        h2.x_messages().to_vec(),
        h2.y_messages().to_vec(),
        rows,
    )?;
    let image = apply_garbling(h1, &g)?;
    let reproduced = image
        .flat_columns()
        .iter()
        .zip(h2.flat_columns())
        .all(|(a, b)| a.iter().zip(b).all(|(p, q)| p.approx_eq(q)));
    assert!(reproduced, "garbling certificate failed its re-check");
    Ok(Some(g))
}

/// Outcome of [`dominance_over_u_evidence`].
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<T: Scalar = Rational> {
    CertifiedByGarbling(Garbling<T>),
    NoCounterexampleFound { utilities_checked: usize },
    /// `value(h2, u) > value(h1, u)`.
    Counterexample(UtilityMatrix<T>),
}

/// Evidence that `h1` dominates `h2` over the single-crossing class.
pub fn dominance_over_u_evidence<T: Scalar>(
    h1: &JointStructure<T>,
    h2: &JointStructure<T>,
    prior: &Prior<T>,
    actions: &ActionSpace,
    samples: usize,
    seed: u64,
) -> Result<Verdict<T>> {
    dominance_over_u_evidence_with(h1, h2, prior, actions, samples, seed, &[])
}

/// As [`dominance_over_u_evidence`], also trying the caller's `extra` utilities.
pub fn dominance_over_u_evidence_with<T: Scalar>(
    h1: &JointStructure<T>,
    h2: &JointStructure<T>,
    prior: &Prior<T>,
    actions: &ActionSpace,
    samples: usize,
    seed: u64,
    extra: &[UtilityMatrix<T>],
) -> Result<Verdict<T>> {
    if let Some(g) = blackwell_dominates(h1, h2, false)? {
        return Ok(Verdict::CertifiedByGarbling(g));
    }
    let (w1, w2) = (WeightedExperiment::new(h1, prior)?, WeightedExperiment::new(h2, prior)?);
    let beats = |u: &UtilityMatrix<T>| w1.value(u).approx_lt(&w2.value(u));
    let mut checked = 0;
    for u in extra {
        checked += 1;
        if beats(u) {
            return Ok(Verdict::Counterexample(u.clone()));
        }
    }
    for h in [h1, h2] {
        for col in h.flat_columns().iter().filter(|c| nonzero(c)) {
            for a in rationalizable_actions(col, actions)?.actions {
                let u = witness_utility(col, a, actions, prior)?;
                checked += 1;
                if beats(&u) {
                    return Ok(Verdict::Counterexample(u));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let u = sample_utility_with(actions, prior, &mut rng);
        checked += 1;
        if beats(&u) {
            return Ok(Verdict::Counterexample(u));
        }
    }
    Ok(Verdict::NoCounterexampleFound { utilities_checked: checked })
}
