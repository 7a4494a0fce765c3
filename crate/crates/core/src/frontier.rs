//! Secret and deniable frontier: lifts, direction-ordered paintings, the
//! sparse non-monotone case, and the region swaps that order a painting.

use crate::deniability::{check_plausible_deniability, decompose_column};
use crate::error::{Error, Result};
use crate::model::{classify_messages, ActionSpace, BaselineStructure, JointStructure, MessageClass, Prior};
use crate::scalar::Scalar;
use crate::signalrep::{check_secrecy, to_joint, SignalRepresentation};
use crate::utility::{validate_utility, UtilityMatrix, WeightedExperiment};
use crate::Rational;

fn total<T: Scalar>(it: impl IntoIterator<Item = T>) -> T {
    it.into_iter().fold(T::zero(), |a, b| a + b)
}

/// Thresholds of a direction-ordered painting: D below `t1`, I from `t2` on.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionOrderedBounds<T: Scalar = Rational> {
    pub t1: Vec<T>,
    pub t2: Vec<T>,
}

pub fn direction_ordered_bounds<T: Scalar>(f: &BaselineStructure<T>) -> DirectionOrderedBounds<T> {
    let c = classify_messages(f);
    let n = f.num_states();
    let t1 = (0..n).map(|k| total(c.d().iter().map(|&x| f.get(x, k).clone()))).collect();
    let t2 = (0..n).map(|k| T::one() - total(c.i().iter().map(|&x| f.get(x, k).clone()))).collect();
    DirectionOrderedBounds { t1, t2 }
}

/// Paints one block whose per-message columns are `cols`: D rays from the
/// left by descending cutoff, I rays from the right by ascending cutoff, and
/// the remaining messages in the middle band in declaration order.
fn paint_block<T: Scalar>(cols: &[Vec<T>], classes: &[MessageClass], n: usize) -> Vec<Vec<(usize, T)>> {
    let mut left: Vec<(usize, usize, T)> = Vec::new();
    let mut right: Vec<(usize, usize, T)> = Vec::new();
    for (x, col) in cols.iter().enumerate() {
        match classes[x] {
            MessageClass::D => left.extend(decompose_column(col, MessageClass::D).into_iter().map(|(r, c)| (r.cutoff, x, c))),
            MessageClass::I => right.extend(decompose_column(col, MessageClass::I).into_iter().map(|(r, c)| (r.cutoff, x, c))),
            MessageClass::S => {}
        }
    }
    left.sort_by_key(|&(k, x, _)| (std::cmp::Reverse(k), x));
    right.sort_by_key(|&(k, x, _)| (std::cmp::Reverse(k), x));
    let middle: Vec<usize> = (0..cols.len()).filter(|&x| classes[x] == MessageClass::S).collect();
    (0..n)
        .map(|k| {
            let mut row: Vec<(usize, T)> =
                left.iter().filter(|(cut, _, _)| *cut >= k).map(|(_, x, c)| (*x, c.clone())).collect();
            row.extend(middle.iter().map(|&x| (x, cols[x][k].clone())));
            row.extend(right.iter().filter(|(cut, _, _)| *cut <= k).map(|(_, x, c)| (*x, c.clone())));
            row
        })
        .collect()
}

fn s_count<T: Scalar>(f: &BaselineStructure<T>) -> usize {
    classify_messages(f).s().len()
}

/// Direction-ordered painting of an almost-directional baseline.
pub fn direction_ordered<T: Scalar>(f: &BaselineStructure<T>) -> Result<SignalRepresentation<T>> {
    let s = s_count(f);
    if s > 1 {
        return Err(Error::NotAlmostDirectional(s));
    }
    ordered_painting(f)
}

fn ordered_painting<T: Scalar>(f: &BaselineStructure<T>) -> Result<SignalRepresentation<T>> {
    let c = classify_messages(f);
    let runs = paint_block(f.columns(), c.classes(), f.num_states());
    SignalRepresentation::from_lengths(f.messages().to_vec(), runs)
}

/// Per interior state: non-monotone mass and the two monotone slacks.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackRow<T: Scalar = Rational> {
    pub state: usize,
    pub s_mass: T,
    pub d_slack: T,
    pub i_slack: T,
}

impl<T: Scalar> SlackRow<T> {
    /// `min(d_slack, i_slack) - s_mass`; nonnegative when the state passes.
    pub fn margin(&self) -> T {
        let m = if self.d_slack < self.i_slack { self.d_slack.clone() } else { self.i_slack.clone() };
        m - self.s_mass.clone()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem4Report<T: Scalar = Rational> {
    pub holds: bool,
    pub rows: Vec<SlackRow<T>>,
}

/// Whether at every interior state the non-monotone mass fits inside both
/// the D-mass drop from the previous state and the I-mass rise to the next.
pub fn theorem4_condition<T: Scalar>(f: &BaselineStructure<T>) -> Theorem4Report<T> {
    let c = classify_messages(f);
    let n = f.num_states();
    let sum_over = |xs: &[usize], g: &dyn Fn(usize) -> T| total(xs.iter().map(|&x| g(x)));
    let rows: Vec<SlackRow<T>> = (1..n.saturating_sub(1))
        .map(|k| SlackRow {
            state: k,
            s_mass: sum_over(&c.s(), &|x| f.get(x, k).clone()),
            d_slack: sum_over(&c.d(), &|x| f.get(x, k - 1).clone() - f.get(x, k).clone()),
            i_slack: sum_over(&c.i(), &|x| f.get(x, k + 1).clone() - f.get(x, k).clone()),
        })
        .collect();
    Theorem4Report { holds: rows.iter().all(|r| !r.margin().is_neg()), rows }
}

/// Direction-ordered painting with every non-monotone message in the middle
/// band; under the condition the bands of different states do not overlap.
pub fn theorem4_construct<T: Scalar>(f: &BaselineStructure<T>) -> Result<SignalRepresentation<T>> {
    let report = theorem4_condition(f);
    if let Some(r) = report.rows.iter().find(|r| r.margin().is_neg()) {
        return Err(Error::ConditionFails { state: r.state });
    }
    ordered_painting(f)
}

/// Secrecy lift refined so each monotone column inside a y-block is laid out
/// along its extreme rays.
pub fn spd_lift<T: Scalar>(h: &JointStructure<T>) -> Result<SignalRepresentation<T>> {
    let f = h.baseline();
    if !check_secrecy(h).holds {
        return Err(Error::NotSpd("secrecy fails".into()));
    }
    if let Some(v) = check_plausible_deniability(h, &f)?.violation {
        return Err(Error::NotSpd(format!("deniability fails at {}", h.pair_label(v.x, v.y))));
    }
    let c = classify_messages(&f);
    let n = h.num_states();
    let mut runs: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
    for y in 0..h.ny() {
        let cols: Vec<Vec<T>> = (0..h.nx()).map(|x| h.column(x, y).to_vec()).collect();
        for (k, part) in paint_block(&cols, c.classes(), n).into_iter().enumerate() {
            runs[k].extend(part);
        }
    }
    SignalRepresentation::from_lengths(h.x_messages().to_vec(), runs)
}

/// Whether `psi` paints D first, then the rest, then I in every state.
pub fn is_direction_ordered<T: Scalar>(psi: &SignalRepresentation<T>, classes: &[MessageClass]) -> bool {
    psi.rows().iter().all(|row| {
        let rank = |m: usize| match classes[m] {
            MessageClass::D => 0,
            MessageClass::S => 1,
            MessageClass::I => 2,
        };
        row.windows(2).all(|w| rank(w[0].message) <= rank(w[1].message))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapKind {
    Relabel,
    BlackwellGarble,
    SingleCrossingDominance,
}

/// One exchange of two equal-length pieces `[a, a + len)` and `[b, b + len)`
/// from `state` on (whole columns for [`SwapKind::Relabel`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SwapRecord<T: Scalar = Rational> {
    pub state: usize,
    pub first: (T, T),
    pub second: (T, T),
    pub kind: SwapKind,
}

#[derive(Debug, Clone)]
struct Column<T: Scalar> {
    len: T,
    labels: Vec<usize>,
}

struct Columns<'a, T: Scalar> {
    cols: Vec<Column<T>>,
    classes: &'a [MessageClass],
}

impl<T: Scalar> Columns<'_, T> {
    fn class(&self, j: usize, k: usize) -> MessageClass {
        self.classes[self.cols[j].labels[k]]
    }

    fn start(&self, j: usize) -> T {
        total(self.cols[..j].iter().map(|c| c.len.clone()))
    }

    /// Splits `i` and `j` so both have the shorter length; returns new indices.
    fn equalize(&mut self, i: usize, j: usize) -> (usize, usize) {
        let (li, lj) = (self.cols[i].len.clone(), self.cols[j].len.clone());
        let (mut i, mut j) = (i, j);
        if lj.approx_lt(&li) {
            let rest = Column { len: li - lj.clone(), labels: self.cols[i].labels.clone() };
            self.cols[i].len = lj;
            self.cols.insert(i + 1, rest);
            if j > i {
                j += 1;
            }
        } else if li.approx_lt(&lj) {
            let rest = Column { len: lj - li.clone(), labels: self.cols[j].labels.clone() };
            self.cols[j].len = li;
            self.cols.insert(j + 1, rest);
            if i > j {
                i += 1;
            }
        }
        (i, j)
    }

    fn record(&self, state: usize, i: usize, j: usize, kind: SwapKind) -> SwapRecord<T> {
        let (a, b) = (self.start(i), self.start(j));
        let len = self.cols[i].len.clone();
        SwapRecord { state, first: (a.clone(), a + len.clone()), second: (b.clone(), b + len), kind }
    }

    fn merge(&mut self) {
        let mut out: Vec<Column<T>> = Vec::with_capacity(self.cols.len());
        for c in self.cols.drain(..) {
            match out.last_mut() {
                Some(last) if last.labels == c.labels => last.len = last.len.clone() + c.len,
                _ => out.push(c),
            }
        }
        self.cols = out;
    }
}

const SWAP_LIMIT: usize = 100_000;

/// Orders a deniable painting by equal-measure swaps: first D is moved left
/// by relabelling, then, state by state, every I piece left of a non-monotone
/// piece is exchanged with it.
pub fn swap_improve<T: Scalar>(
    psi: &SignalRepresentation<T>,
    f: &BaselineStructure<T>,
) -> Result<(SignalRepresentation<T>, Vec<SwapRecord<T>>)> {
    let s = s_count(f);
    if s > 1 {
        return Err(Error::NotAlmostDirectional(s));
    }
    if !psi.represents(f) {
        return Err(Error::NotSpd("painting does not represent the baseline".into()));
    }
    swap_improve_classified(psi, classify_messages(f).classes())
}

/// [`swap_improve`] with an explicit class per message, for paintings that
/// are a local piece of a larger structure.
pub fn swap_improve_classified<T: Scalar>(
    psi: &SignalRepresentation<T>,
    classes: &[MessageClass],
) -> Result<(SignalRepresentation<T>, Vec<SwapRecord<T>>)> {
    let n = psi.num_states();
    if classes.len() != psi.messages().len() {
        return Err(Error::SpaceMismatch("one class per message required".into()));
    }
    if let Some(y) = first_non_deniable_cell(psi, classes) {
        return Err(Error::NotSpd(format!("cell {y} breaks deniability")));
    }
    let mut cs = Columns {
        cols: psi.segments().into_iter().map(|(a, b, labels)| Column { len: b - a, labels }).collect(),
        classes,
    };
    cs.merge();
    let mut records = Vec::new();
    let mut steps = 0;
    for k in 0..n {
        loop {
            let is_d = |cs: &Columns<T>, j: usize| cs.class(j, k) == MessageClass::D;
            let Some(i) = (0..cs.cols.len()).find(|&j| !is_d(&cs, j)) else { break };
            let Some(j) = (i + 1..cs.cols.len()).find(|&j| is_d(&cs, j)) else { break };
            let (i, j) = cs.equalize(i, j);
            records.push(cs.record(k, i, j, SwapKind::Relabel));
            cs.cols.swap(i, j);
            steps += 1;
            assert!(steps < SWAP_LIMIT, "swap limit exceeded");
        }
        cs.merge();
    }
    for k in 0..n {
        loop {
            let found = (0..cs.cols.len())
                .filter(|&i| cs.class(i, k) == MessageClass::I)
                .find_map(|i| (i + 1..cs.cols.len()).find(|&j| cs.class(j, k) == MessageClass::S).map(|j| (i, j)));
            let Some((i, j)) = found else { break };
            let (i, j) = cs.equalize(i, j);
            let same_history = (0..k).all(|q| cs.class(i, q) == cs.class(j, q));
            if same_history {
                records.push(cs.record(k, i, j, SwapKind::Relabel));
                cs.cols.swap(i, j);
            } else {
                let kind = match cs.class(i, k - 1) {
                    MessageClass::D => SwapKind::BlackwellGarble,
                    _ => SwapKind::SingleCrossingDominance,
                };
                records.push(cs.record(k, i, j, kind));
                for q in k..n {
                    let (a, b) = (cs.cols[i].labels[q], cs.cols[j].labels[q]);
                    cs.cols[i].labels[q] = b;
                    cs.cols[j].labels[q] = a;
                }
            }
            steps += 1;
            assert!(steps < SWAP_LIMIT, "swap limit exceeded");
        }
        cs.merge();
    }
    let runs = (0..n).map(|k| cs.cols.iter().map(|c| (c.labels[k], c.len.clone())).collect()).collect();
    Ok((SignalRepresentation::from_lengths(psi.messages().to_vec(), runs)?, records))
}

/// Label of the first cell whose columns break the class monotonicity.
fn first_non_deniable_cell<T: Scalar>(psi: &SignalRepresentation<T>, classes: &[MessageClass]) -> Option<String> {
    psi.cells().cells.into_iter().find_map(|c| {
        let a = &c.assignment;
        let ok = (0..psi.messages().len()).all(|m| {
            let on: Vec<bool> = a.iter().map(|&x| x == m).collect();
            match classes[m] {
                MessageClass::D => on.windows(2).all(|w| w[0] || !w[1]),
                MessageClass::I => on.windows(2).all(|w| !w[0] || w[1]),
                MessageClass::S => true,
            }
        });
        (!ok).then_some(c.label)
    })
}

/// Two paintings with two non-monotone messages where the ordering swap
/// can lose value, and a utility showing it.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleWitness<T: Scalar = Rational> {
    pub original: JointStructure<T>,
    pub new: JointStructure<T>,
    pub utility: UtilityMatrix<T>,
    pub original_value: T,
    pub new_value: T,
    /// A utility under which `new` is strictly better, if one was found.
    pub reverse: Option<UtilityMatrix<T>>,
}

fn half_cells<T: Scalar>(messages: &[&str], y: [usize; 3], yp: [usize; 3]) -> JointStructure<T> {
    let h = T::half();
    let runs = (0..3).map(|k| vec![(y[k], h.clone()), (yp[k], h.clone())]).collect();
    let psi = SignalRepresentation::from_lengths(messages.iter().map(|m| m.to_string()).collect(), runs)
        .expect("two half cells tile [0,1]");
    to_joint(&psi).with_y_labels(vec!["y".into(), "y'".into()]).expect("two cells")
}

/// Original and swapped structures with messages `d, s1, s2, i`.
pub fn counterexample_structures<T: Scalar>() -> (JointStructure<T>, JointStructure<T>) {
    let m = ["d", "s1", "s2", "i"];
    (half_cells(&m, [0, 1, 3], [1, 2, 1]), half_cells(&m, [0, 1, 1], [1, 2, 3]))
}

/// Searches small integer utilities over three actions, default normalized
/// to zero, for one under which the unswapped structure is strictly better
/// and [`counterexample_sides`] is strict.
pub fn counterexample_check<T: Scalar>(prior: &Prior<T>) -> Result<CounterexampleWitness<T>> {
    if prior.len() != 3 {
        return Err(Error::WrongArity { expected: 3, found: prior.len() });
    }
    let (original, new) = counterexample_structures::<T>();
    let wo = WeightedExperiment::new(&original, prior)?;
    let wn = WeightedExperiment::new(&new, prior)?;
    let actions = ActionSpace::symmetric(1, 1)?;
    let rows: Vec<[i64; 3]> =
        (-4..=4).flat_map(|a| (-4..=4).flat_map(move |b| (-4..=4).map(move |c| [a, b, c]))).collect();
    let crosses = |d: &[i64; 3]| (0..3).all(|k| (k + 1..3).all(|j| !(d[k] >= 0 && d[j] < 0) && !(d[k] > 0 && d[j] <= 0)));
    let mut found: Option<(UtilityMatrix<T>, T, T)> = None;
    let mut reverse = None;
    for lo in rows.iter().filter(|r| crosses(&[-r[0], -r[1], -r[2]])) {
        for hi in rows.iter().filter(|r| crosses(r)) {
            let diff = [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]];
            if !crosses(&diff) {
                continue;
            }
            let to_t = |r: &[i64; 3]| r.iter().map(|&v| T::from_i64(v)).collect::<Vec<T>>();
            let u = UtilityMatrix::new(actions.clone(), vec![to_t(lo), vec![T::zero(); 3], to_t(hi)])?;
            if !validate_utility(&u, prior).valid {
                continue;
            }
            let (vo, vn) = (wo.value(&u), wn.value(&u));
            let (lhs, rhs) = counterexample_sides(&u, prior);
            if vn.approx_lt(&vo) && rhs.approx_lt(&lhs) && found.is_none() {
                found = Some((u, vo, vn));
            } else if vo.approx_lt(&vn) && reverse.is_none() {
                reverse = Some(u);
            }
            if found.is_some() && reverse.is_some() {
                break;
            }
        }
        if found.is_some() && reverse.is_some() {
            break;
        }
    }
    let (utility, original_value, new_value) = found.ok_or(Error::WitnessNotFound)?;
    Ok(CounterexampleWitness { original, new, utility, original_value, new_value, reverse })
}

/// Both sides of `μ(ω2)[u(a2,ω2) − u(a,ω2)] > μ(ω1)[u(a1,ω1) − u(a,ω1)]`,
/// with `a1`, `a2` statewise optimal and `a` optimal after the pooled
/// `{ω2, ω3}` message of the swapped structure.
pub fn counterexample_sides<T: Scalar>(u: &UtilityMatrix<T>, prior: &Prior<T>) -> (T, T) {
    let mu = prior.mass();
    let point = |k: usize| (0..3).map(|j| if j == k { T::one() } else { T::zero() }).collect::<Vec<T>>();
    let a1 = u.best_action(&point(0));
    let a2 = u.best_action(&point(1));
    let pooled = vec![T::zero(), mu[1].clone(), mu[2].clone()];
    let a = u.best_action(&pooled);
    let lhs = mu[1].clone() * (u.row(a2)[1].clone() - u.row(a)[1].clone());
    let rhs = mu[0].clone() * (u.row(a1)[0].clone() - u.row(a)[0].clone());
    (lhs, rhs)
}
