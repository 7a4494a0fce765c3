//! Signal representations: per-state paintings of `[0, 1]` by baseline messages.

use crate::error::{Error, Result};
use crate::lp::{lp_feasible, LinearSystem, Relation};
use crate::model::{BaselineStructure, JointStructure};
use crate::scalar::Scalar;
use crate::Rational;

/// `[start, end)` painted with message index `message` (the last one in a
/// state is closed at 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Interval<T: Scalar = Rational> {
    pub start: T,
    pub end: T,
    pub message: usize,
}

impl<T: Scalar> Interval<T> {
    pub fn len(&self) -> T {
        self.end.clone() - self.start.clone()
    }
}

/// The map `ψ(ω, t)`, one ordered interval list per state.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalRepresentation<T: Scalar = Rational> {
    messages: Vec<String>,
    rows: Vec<Vec<Interval<T>>>,
}

fn zero_sum<T: Scalar>(it: impl IntoIterator<Item = T>) -> T {
    it.into_iter().fold(T::zero(), |a, b| a + b)
}

impl<T: Scalar> SignalRepresentation<T> {
    /// Validates that each state's intervals tile `[0, 1]` in order.
    pub fn new(messages: Vec<String>, rows: Vec<Vec<Interval<T>>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidStructure("no states".into()));
        }
        for (k, row) in rows.iter().enumerate() {
            let mut at = T::zero();
            for iv in row {
                if !iv.start.approx_eq(&at) || !iv.start.approx_lt(&iv.end) || iv.message >= messages.len() {
                    return Err(Error::InvalidStructure(format!("state {k}: intervals do not tile [0,1]")));
                }
                at = iv.end.clone();
            }
            if !at.approx_eq(&T::one()) {
                return Err(Error::InvalidStructure(format!("state {k}: intervals stop short of 1")));
            }
        }
        Ok(SignalRepresentation { messages, rows })
    }

    /// Paints each state left to right with `(message, length)` runs;
    /// zero-length runs are skipped and equal neighbours merged.
    pub fn from_lengths(messages: Vec<String>, runs: Vec<Vec<(usize, T)>>) -> Result<Self> {
        let rows = runs
            .into_iter()
            .map(|row| {
                let mut out: Vec<Interval<T>> = Vec::new();
                let mut at = T::zero();
                for (m, len) in row {
                    if len.is_nil() {
                        continue;
                    }
                    let end = at.clone() + len;
                    match out.last_mut() {
                        Some(last) if last.message == m => last.end = end.clone(),
                        _ => out.push(Interval { start: at.clone(), end: end.clone(), message: m }),
                    }
                    at = end;
                }
                out
            })
            .collect();
        Self::new(messages, rows)
    }

    pub fn messages(&self) -> &[String] {
        &self.messages
    }

    pub fn num_states(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, k: usize) -> &[Interval<T>] {
        &self.rows[k]
    }

    pub fn rows(&self) -> &[Vec<Interval<T>>] {
        &self.rows
    }

    /// Message painted at `t` in state `k`.
    pub fn message_at(&self, k: usize, t: &T) -> usize {
        let row = &self.rows[k];
        row.iter().find(|iv| t.approx_lt(&iv.end)).unwrap_or(&row[row.len() - 1]).message
    }

    /// `∫ 1{ψ(ω,t) = x} dt` per message and state.
    pub fn baseline(&self) -> Result<BaselineStructure<T>> {
        let columns = (0..self.messages.len())
            .map(|x| {
                self.rows
                    .iter()
                    .map(|row| zero_sum(row.iter().filter(|iv| iv.message == x).map(Interval::len)))
                    .collect()
            })
            .collect();
        BaselineStructure::new(self.messages.clone(), columns)
    }

    pub fn represents(&self, f: &BaselineStructure<T>) -> bool {
        self.messages == f.messages()
            && self.baseline().is_ok_and(|b| {
                b.columns().iter().flatten().zip(f.columns().iter().flatten()).all(|(a, c)| a.approx_eq(c))
            })
    }

    /// Sorted distinct endpoints across all states.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut pts: Vec<T> = vec![T::zero()];
        pts.extend(self.rows.iter().flatten().map(|iv| iv.end.clone()));
        pts.sort_by(|a, b| a.partial_cmp(b).expect("ordered scalars"));
        pts.dedup_by(|a, b| a.approx_eq(b));
        pts
    }

    /// Elementary segments between consecutive breakpoints with their per-state messages.
    pub fn segments(&self) -> Vec<(T, T, Vec<usize>)> {
        let pts = self.breakpoints();
        pts.windows(2)
            .map(|w| {
                let assign = (0..self.num_states()).map(|k| self.message_at(k, &w[0])).collect();
                (w[0].clone(), w[1].clone(), assign)
            })
            .collect()
    }

    /// Groups `t` by the state-to-message map `ψ(·, t)`.
    pub fn cells(&self) -> CellPartition<T> {
        let mut cells: Vec<Cell<T>> = Vec::new();
        for (a, b, assign) in self.segments() {
            match cells.iter_mut().find(|c| c.assignment == assign) {
                Some(c) => {
                    c.length = c.length.clone() + (b.clone() - a.clone());
                    c.pieces.push((a, b));
                }
                None => cells.push(Cell {
                    label: cell_label(&self.messages, &assign),
                    length: b.clone() - a.clone(),
                    pieces: vec![(a, b)],
                    assignment: assign,
                }),
            }
        }
        CellPartition { cells }
    }
}

/// `"(m1,m2,...)"` for a per-state assignment.
pub fn cell_label(messages: &[String], assign: &[usize]) -> String {
    let parts: Vec<&str> = assign.iter().map(|&m| messages[m].as_str()).collect();
    format!("({})", parts.join(","))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell<T: Scalar = Rational> {
    pub label: String,
    pub assignment: Vec<usize>,
    pub length: T,
    pub pieces: Vec<(T, T)>,
}

/// Cells in order of first appearance from the left.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPartition<T: Scalar = Rational> {
    pub cells: Vec<Cell<T>>,
}

/// `h_ψ(x, y|ω) = λ(T_y) 1{ψ(ω, T_y) = x}`, one y per cell.
pub fn to_joint<T: Scalar>(psi: &SignalRepresentation<T>) -> JointStructure<T> {
    let cells = psi.cells().cells;
    let labels = cells.iter().map(|c| c.label.clone()).collect();
    JointStructure::from_fn(psi.messages.clone(), labels, psi.num_states(), |x, y, k| {
        if cells[y].assignment[k] == x {
            cells[y].length.clone()
        } else {
            T::zero()
        }
    })
    .expect("cells tile [0,1] in every state")
}

/// Total length of cells in which some message is painted in two or more states.
pub fn pooled_mass<T: Scalar>(psi: &SignalRepresentation<T>) -> T {
    zero_sum(psi.cells().cells.into_iter().filter_map(|c| {
        let mut a = c.assignment.clone();
        a.sort_unstable();
        let before = a.len();
        a.dedup();
        (a.len() < before).then_some(c.length)
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecrecyReport {
    pub holds: bool,
    /// `(y, ω, ω')` with differing y-marginals.
    pub violations: Vec<(usize, usize, usize)>,
}

pub fn check_secrecy<T: Scalar>(h: &JointStructure<T>) -> SecrecyReport {
    let mut violations = Vec::new();
    for y in 0..h.ny() {
        let m = h.y_marginal(y);
        for k in 1..m.len() {
            if !m[k].approx_eq(&m[0]) {
                violations.push((y, 0, k));
            }
        }
    }
    SecrecyReport { holds: violations.is_empty(), violations }
}

/// Stacks y-blocks of length `g(y)` and paints each block's x-segments in
/// declaration order.
pub fn secrecy_lift<T: Scalar>(h: &JointStructure<T>) -> Result<SignalRepresentation<T>> {
    if let Some(&(y, s1, s2)) = check_secrecy(h).violations.first() {
        return Err(Error::SecrecyViolation { y: h.y_messages()[y].clone(), s1, s2 });
    }
    let runs = (0..h.num_states())
        .map(|k| {
            (0..h.ny())
                .flat_map(|y| (0..h.nx()).map(move |x| (x, y)))
                .map(|(x, y)| (x, h.get(x, y, k).clone()))
                .collect()
        })
        .collect();
    SignalRepresentation::from_lengths(h.x_messages().to_vec(), runs)
}

/// Whether some signal-based structure reveals the state outright.
pub fn full_revelation_feasible<T: Scalar>(f: &BaselineStructure<T>) -> bool {
    f.columns().iter().all(|c| zero_sum(c.iter().cloned()).approx_le(&T::one()))
}

/// Index of the message with the largest total likelihood, first on ties.
pub fn heaviest_message<T: Scalar>(f: &BaselineStructure<T>) -> usize {
    let tot: Vec<T> = f.columns().iter().map(|c| zero_sum(c.iter().cloned())).collect();
    let mut best = 0;
    for x in 1..tot.len() {
        if tot[best].approx_lt(&tot[x]) {
            best = x;
        }
    }
    best
}

/// Greatest secret structure for two states: the heaviest message `x*` is
/// left-aligned in the first state and right-aligned in the second, and only
/// `x*` is ever pooled.
pub fn binary_state_greatest<T: Scalar>(f: &BaselineStructure<T>) -> Result<SignalRepresentation<T>> {
    if f.num_states() != 2 {
        return Err(Error::WrongArity { expected: 2, found: f.num_states() });
    }
    let m = f.num_messages();
    let star = heaviest_message(f);
    let (a, b): (Vec<T>, Vec<T>) = (0..m).map(|x| (f.get(x, 0).clone(), f.get(x, 1).clone())).unzip();
    let overlap = a[star].clone() + b[star].clone() - T::one();
    let mut w = vec![vec![T::zero(); m]; m];
    if overlap.is_pos() {
        for x in (0..m).filter(|&x| x != star) {
            w[star][x] = b[x].clone();
            w[x][star] = a[x].clone();
        }
        w[star][star] = overlap;
    } else {
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
        let mut sys = LinearSystem::new(pairs.len());
        for x in 0..m {
            let row = pairs.iter().enumerate().filter(|(_, p)| p.0 == x).map(|(v, _)| (v, T::one())).collect();
            sys.add(row, Relation::Eq, a[x].clone());
            let col = pairs.iter().enumerate().filter(|(_, p)| p.1 == x).map(|(v, _)| (v, T::one())).collect();
            sys.add(col, Relation::Eq, b[x].clone());
        }
        let point = lp_feasible(&sys).expect("zero-diagonal transport exists when no message is heavier than 1");
        for ((i, j), v) in pairs.into_iter().zip(point) {
            w[i][j] = v;
        }
    }
    let others: Vec<usize> = (0..m).filter(|&x| x != star).collect();
    let mut cells: Vec<(usize, usize)> = others.iter().map(|&x| (star, x)).collect();
    cells.push((star, star));
    cells.extend(others.iter().flat_map(|&i| others.iter().map(move |&j| (i, j))));
    cells.extend(others.iter().map(|&x| (x, star)));
    let runs = (0..2)
        .map(|k| cells.iter().map(|&(i, j)| (if k == 0 { i } else { j }, w[i][j].clone())).collect())
        .collect();
    SignalRepresentation::from_lengths(f.messages().to_vec(), runs)
}
