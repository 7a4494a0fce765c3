//! Dense-tableau two-phase simplex with Bland's rule.
//!
//! Variables are implicitly nonnegative. With an exact scalar the answers are
//! exact; with floats they hold up to [`Scalar::tolerance`].

use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

/// `Σ coeffs · x  (rel)  rhs`, with sparse coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T: Scalar = Rational> {
    pub coeffs: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem<T: Scalar = Rational> {
    pub num_vars: usize,
    pub constraints: Vec<Constraint<T>>,
    /// Maximized when present.
    pub objective: Option<Vec<(usize, T)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T: Scalar = Rational> {
    Infeasible,
    Unbounded,
    Optimal { point: Vec<T>, value: T },
}

impl<T: Scalar> LinearSystem<T> {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem { num_vars, constraints: Vec::new(), objective: None }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, T)>, relation: Relation, rhs: T) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.num_vars));
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn maximize(&mut self, objective: Vec<(usize, T)>) {
        self.objective = Some(objective);
    }

    /// Exact re-check of a candidate point.
    pub fn satisfied_by(&self, x: &[T]) -> bool {
        if x.len() != self.num_vars || x.iter().any(|v| v.is_neg()) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs = c.coeffs.iter().fold(T::zero(), |a, (j, v)| a + v.clone() * x[*j].clone());
            match c.relation {
                Relation::Le => lhs.approx_le(&c.rhs),
                Relation::Ge => c.rhs.approx_le(&lhs),
                Relation::Eq => lhs.approx_eq(&c.rhs),
            }
        })
    }

    pub fn evaluate(&self, obj: &[(usize, T)], x: &[T]) -> T {
        obj.iter().fold(T::zero(), |a, (j, v)| a + v.clone() * x[*j].clone())
    }
}

struct Tableau<T: Scalar> {
    rows: Vec<Vec<T>>,
    obj: Vec<T>,
    basis: Vec<usize>,
    allowed: Vec<bool>,
    width: usize,
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self) -> usize {
        self.width
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if p != T::one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / p.clone();
                }
            }
        }
        let nz: Vec<usize> = (0..=self.width).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let prow: Vec<T> = nz.iter().map(|&j| self.rows[r][j].clone()).collect();
        let eliminate = |row: &mut Vec<T>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for (&j, v) in nz.iter().zip(&prow) {
                row[j] = row[j].clone() - f.clone() * v.clone();
            }
            row[c] = T::zero();
        };
        for i in 0..self.rows.len() {
            if i != r {
                eliminate(&mut self.rows[i]);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Maximizes; returns `false` on unboundedness.
    fn run(&mut self) -> bool {
        loop {
            let Some(c) = (0..self.width).find(|&j| self.allowed[j] && self.obj[j].is_pos()) else {
                return true;
            };
            let rhs = self.rhs();
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rows[i][rhs].clone() / a.clone();
                let better = match &best {
                    None => true,
                    Some((b, br)) => {
                        ratio.approx_lt(br) || (ratio.approx_eq(br) && self.basis[i] < self.basis[*b])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return false;
            };
            self.pivot(r, c);
        }
    }
}

enum Phase1<T: Scalar> {
    Infeasible,
    Feasible(Tableau<T>),
}

fn phase1<T: Scalar>(sys: &LinearSystem<T>) -> Phase1<T> {
    let nv = sys.num_vars;
    let m = sys.constraints.len();
    let mut norm = Vec::with_capacity(m);
    for c in &sys.constraints {
        if c.rhs.is_neg() {
            let coeffs = c.coeffs.iter().map(|(j, v)| (*j, -v.clone())).collect::<Vec<_>>();
            norm.push((coeffs, c.relation.flipped(), -c.rhs.clone()));
        } else {
            norm.push((c.coeffs.clone(), c.relation, c.rhs.clone()));
        }
    }
    let n_slack = norm.iter().filter(|c| c.1 != Relation::Eq).count();
    let n_art = norm.iter().filter(|c| c.1 != Relation::Le).count();
    let width = nv + n_slack + n_art;
    let art_start = nv + n_slack;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (nv, art_start);
    for (coeffs, rel, rhs) in norm {
        let mut row = vec![T::zero(); width + 1];
        for (j, v) in coeffs {
            row[j] = row[j].clone() + v;
        }
        row[width] = rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = T::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -T::one();
                next_slack += 1;
                row[next_art] = T::one();
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = T::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
    }
    let mut obj = vec![T::zero(); width + 1];
    for (i, row) in rows.iter().enumerate() {
        if basis[i] >= art_start {
            for j in (0..art_start).chain(std::iter::once(width)) {
                if !row[j].is_zero() {
                    obj[j] = obj[j].clone() + row[j].clone();
                }
            }
        }
    }
    let mut t = Tableau { rows, obj, basis, allowed: vec![true; width], width };
    t.run();
    if t.obj[width].is_pos() {
        return Phase1::Infeasible;
    }
    let mut drop = Vec::new();
    for i in 0..t.rows.len() {
        if t.basis[i] >= art_start {
            match (0..art_start).find(|&j| !t.rows[i][j].is_nil()) {
                Some(j) => t.pivot(i, j),
                None => drop.push(i),
            }
        }
    }
    for &i in drop.iter().rev() {
        t.rows.remove(i);
        t.basis.remove(i);
    }
    for a in t.allowed.iter_mut().skip(art_start) {
        *a = false;
    }
    Phase1::Feasible(t)
}

fn extract<T: Scalar>(t: &Tableau<T>, nv: usize) -> Vec<T> {
    let mut x = vec![T::zero(); nv];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < nv {
            x[b] = t.rows[i][t.width].clone();
        }
    }
    x
}

/// A feasible point of the constraint system, ignoring any objective.
pub fn lp_feasible<T: Scalar>(sys: &LinearSystem<T>) -> Option<Vec<T>> {
    match phase1(sys) {
        Phase1::Infeasible => None,
        Phase1::Feasible(t) => Some(extract(&t, sys.num_vars)),
    }
}

/// Maximizes the objective (zero objective when absent).
pub fn lp_solve<T: Scalar>(sys: &LinearSystem<T>) -> LpOutcome<T> {
    let Phase1::Feasible(mut t) = phase1(sys) else {
        return LpOutcome::Infeasible;
    };
    let width = t.width;
    let mut c = vec![T::zero(); width];
    for (j, v) in sys.objective.iter().flatten() {
        c[*j] = c[*j].clone() + v.clone();
    }
    let mut obj = vec![T::zero(); width + 1];
    for j in 0..width {
        obj[j] = c[j].clone();
    }
    for (i, &b) in t.basis.iter().enumerate() {
        if c[b].is_zero() {
            continue;
        }
        for j in 0..=width {
            if !t.rows[i][j].is_zero() {
                obj[j] = obj[j].clone() - c[b].clone() * t.rows[i][j].clone();
            }
        }
    }
    t.obj = obj;
    if !t.run() {
        return LpOutcome::Unbounded;
    }
    let point = extract(&t, sys.num_vars);
    let value = -t.obj[width].clone();
    LpOutcome::Optimal { point, value }
}
