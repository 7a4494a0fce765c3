//! Rationalizable actions after a single message, the incremental-return LP
//! oracle, and explicit witness utilities.

use crate::error::{Error, Result};
use crate::lp::{lp_solve, LinearSystem, LpOutcome, Relation};
use crate::model::{ActionSpace, Monotonicity, Prior};
use crate::scalar::Scalar;
use crate::utility::UtilityMatrix;
use crate::Rational;

/// Single-crossing vector: negative on `[0, neg_end)`, zero on `[neg_end, pos_start)`,
/// positive from `pos_start` on.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementalReturn<T: Scalar = Rational> {
    pub values: Vec<T>,
    pub neg_end: usize,
    pub pos_start: usize,
}

impl<T: Scalar> IncrementalReturn<T> {
    /// `None` unless `values` is single-crossing.
    pub fn new(values: Vec<T>) -> Option<Self> {
        let neg_end = values.iter().take_while(|v| v.is_neg()).count();
        let pos_start = neg_end + values[neg_end..].iter().take_while(|v| v.is_nil()).count();
        if values[pos_start..].iter().all(|v| v.is_pos()) {
            Some(IncrementalReturn { values, neg_end, pos_start })
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RationalizableKind {
    AtMostDefault,
    AtLeastDefault,
    DefaultOnly,
    All,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalizableSet {
    pub kind: RationalizableKind,
    /// Action indices, ascending.
    pub actions: Vec<usize>,
}

impl RationalizableSet {
    pub fn contains(&self, a: usize) -> bool {
        self.actions.contains(&a)
    }

    pub fn is_subset(&self, other: &RationalizableSet) -> bool {
        self.actions.iter().all(|a| other.contains(*a))
    }
}

/// Closed-form rationalizable set after a message with likelihood `q`.
pub fn rationalizable_actions<T: Scalar>(q: &[T], actions: &ActionSpace) -> Result<RationalizableSet> {
    if q.iter().all(|v| v.is_nil()) {
        return Err(Error::ZeroLikelihood);
    }
    let a0 = actions.default_index();
    let kind = match Monotonicity::of(q) {
        Monotonicity::Decreasing => RationalizableKind::AtMostDefault,
        Monotonicity::Increasing => RationalizableKind::AtLeastDefault,
        Monotonicity::Constant => RationalizableKind::DefaultOnly,
        Monotonicity::NonMonotone => RationalizableKind::All,
    };
    let list = match kind {
        RationalizableKind::AtMostDefault => (0..=a0).collect(),
        RationalizableKind::AtLeastDefault => (a0..actions.len()).collect(),
        RationalizableKind::DefaultOnly => vec![a0],
        RationalizableKind::All => (0..actions.len()).collect(),
    };
    Ok(RationalizableSet { kind, actions: list })
}

/// Decides rationalizability of `a` by searching for a single-crossing
/// incremental return, one LP per sign pattern.
pub fn rationalizable_lp_oracle<T: Scalar>(q: &[T], a: usize, actions: &ActionSpace, prior: &Prior<T>) -> bool {
    let a0 = actions.default_index();
    if a == a0 {
        return true;
    }
    let above = a > a0;
    let n = q.len();
    let mu = prior.mass();
    for p in 0..=n {
        for s in p..=n {
            if p == 0 && s == n {
                continue;
            }
            let nvar = p + (n - s) + 1;
            let t = nvar - 1;
            let var = |k: usize| if k < p { k } else { p + k - s };
            let sign = |k: usize| if k < p { -T::one() } else { T::one() };
            let support: Vec<usize> = (0..p).chain(s..n).collect();
            let mut sys = LinearSystem::new(nvar);
            let norm = support.iter().map(|&k| (var(k), sign(k) * mu[k].clone())).collect();
            sys.add(norm, Relation::Eq, if above { -T::one() } else { T::one() });
            let tilt = support.iter().map(|&k| (var(k), sign(k) * mu[k].clone() * q[k].clone())).collect();
            sys.add(tilt, if above { Relation::Ge } else { Relation::Le }, T::zero());
            for &k in &support {
                sys.add(vec![(var(k), T::one()), (t, -T::one())], Relation::Ge, T::zero());
            }
            sys.add(vec![(t, T::one())], Relation::Le, T::one());
            sys.maximize(vec![(t, T::one())]);
            if let LpOutcome::Optimal { value, .. } = lp_solve(&sys) {
                if value.is_pos() {
                    return true;
                }
            }
        }
    }
    false
}

fn mass_from<T: Scalar>(w: &[T], from: usize) -> T {
    w[from..].iter().fold(T::zero(), |s, v| s + v.clone())
}

/// An incremental return with negative prior mean and nonnegative mean under
/// `q·μ`, for `a > a0`. `None` when no action above the default is rationalizable.
pub fn upward_return<T: Scalar>(q: &[T], mu: &[T]) -> Option<IncrementalReturn<T>> {
    let n = q.len();
    let qmu: Vec<T> = q.iter().zip(mu).map(|(a, b)| a.clone() * b.clone()).collect();
    let total = mass_from(&qmu, 0);
    let values = match Monotonicity::of(q) {
        Monotonicity::Increasing => {
            let hat = (1..n).rev().find(|&k| q[k - 1].approx_lt(&q[k]))?;
            let c = (mass_from(mu, hat) + mass_from(&qmu, hat) / total) * T::half();
            (0..n).map(|k| if k >= hat { T::one() - c.clone() } else { -c.clone() }).collect()
        }
        Monotonicity::NonMonotone => {
            let (i, j) = (0..n).find_map(|i| (i + 1..n).find(|&j| q[i].approx_lt(&q[j])).map(|j| (i, j)))?;
            let (mut pmu, mut pq, mut qmu_sum, mut qq) = (T::zero(), T::zero(), T::zero(), T::zero());
            for k in 0..n {
                if k < i {
                    pmu = pmu + mu[k].clone();
                    pq = pq + qmu[k].clone();
                } else if k != i && k != j {
                    qmu_sum = qmu_sum + mu[k].clone();
                    qq = qq + qmu[k].clone();
                }
            }
            let mut eps = T::one();
            let (lo, hi) = loop {
                let lo = (qmu[i].clone() - eps.clone() * (qq.clone() - pq.clone())) / qmu[j].clone();
                let hi = (mu[i].clone() - eps.clone() * (qmu_sum.clone() - pmu.clone())) / mu[j].clone();
                if lo.approx_lt(&hi) && hi.is_pos() {
                    break (lo, hi);
                }
                eps = eps * T::half();
            };
            let lo = if lo.is_pos() { lo } else { T::zero() };
            let m = (lo + hi) * T::half();
            (0..n)
                .map(|k| {
                    if k < i {
                        -eps.clone()
                    } else if k == i {
                        -T::one()
                    } else if k == j {
                        m.clone()
                    } else {
                        eps.clone()
                    }
                })
                .collect()
        }
        _ => return None,
    };
    IncrementalReturn::new(values)
}

fn upward_witness<T: Scalar>(
    r: &IncrementalReturn<T>,
    q: &[T],
    a: usize,
    actions: &ActionSpace,
    mu: &[T],
) -> UtilityMatrix<T> {
    let n = q.len();
    let a0 = actions.default_index();
    let bar = r.neg_end;
    let qmu: Vec<T> = q.iter().zip(mu).map(|(x, y)| x.clone() * y.clone()).collect();
    let odds = |w: &[T]| (mass_from(w, 0) - mass_from(w, bar)) / mass_from(w, bar);
    let (o1, o2) = (odds(mu), odds(&qmu));
    let ratio = if o1 < o2 { o2 } else { o1 };
    let eps2 = ratio * T::from_i64(2);
    let values = (0..actions.len())
        .map(|b| {
            if b >= a {
                r.values.clone()
            } else if b > a0 {
                r.values.iter().map(|v| v.clone() * T::half()).collect()
            } else if b == a0 {
                vec![T::zero(); n]
            } else {
                (0..n).map(|k| if k < bar { T::one() } else { -eps2.clone() }).collect()
            }
        })
        .collect();
    UtilityMatrix::new(actions.clone(), values).expect("shape is consistent")
}

/// A utility in the single-crossing class under which `a` is optimal after `q`.
pub fn witness_utility<T: Scalar>(
    q: &[T],
    a: usize,
    actions: &ActionSpace,
    prior: &Prior<T>,
) -> Result<UtilityMatrix<T>> {
    let a0 = actions.default_index();
    let n = q.len();
    if q.len() != prior.len() {
        return Err(Error::StateMismatch(q.len(), prior.len()));
    }
    if a >= actions.len() || !rationalizable_actions(q, actions)?.contains(a) {
        return Err(Error::NotRationalizable(actions.actions().get(a).cloned().unwrap_or_default()));
    }
    if a == a0 {
        let values = (0..actions.len())
            .map(|b| vec![if b == a0 { T::zero() } else { -T::one() }; n])
            .collect();
        return UtilityMatrix::new(actions.clone(), values);
    }
    if a > a0 {
        let r = upward_return(q, prior.mass()).ok_or_else(|| Error::NotRationalizable(actions.label(a).into()))?;
        return Ok(upward_witness(&r, q, a, actions, prior.mass()));
    }
    let rq: Vec<T> = q.iter().rev().cloned().collect();
    let rp = prior.reversed();
    let ra = actions.reversed();
    let r = upward_return(&rq, rp.mass()).ok_or_else(|| Error::NotRationalizable(actions.label(a).into()))?;
    Ok(upward_witness(&r, &rq, actions.len() - 1 - a, &ra, rp.mass()).reflected())
}
