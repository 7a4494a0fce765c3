//! Priors, baselines, joint structures, posteriors and garblings.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Rational;

fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}{k}")).collect()
}

fn sum<T: Scalar>(v: impl IntoIterator<Item = T>) -> T {
    v.into_iter().fold(T::zero(), |a, b| a + b)
}

/// Full-support prior over ordered states.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior<T: Scalar = Rational> {
    states: Vec<String>,
    mass: Vec<T>,
}

impl<T: Scalar> Prior<T> {
    pub fn new(states: Vec<String>, mass: Vec<T>) -> Result<Self> {
        if states.len() != mass.len() {
            return Err(Error::InvalidStructure("one mass per state required".into()));
        }
        if mass.len() < 2 {
            return Err(Error::InvalidStructure("at least two states required".into()));
        }
        if mass.iter().any(|m| !m.is_pos()) {
            return Err(Error::InvalidStructure("prior must have full support".into()));
        }
        if !sum(mass.iter().cloned()).approx_eq(&T::one()) {
            return Err(Error::InvalidStructure("prior must sum to 1".into()));
        }
        Ok(Prior { states, mass })
    }

    /// Prior with states labelled `w1..wn`.
    pub fn from_mass(mass: Vec<T>) -> Result<Self> {
        Self::new(default_labels("w", mass.len()), mass)
    }

    pub fn uniform(n: usize) -> Self {
        Self::from_mass(vec![T::from_ratio(1, n as i64); n]).expect("uniform prior")
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    /// Same prior with the state order reversed.
    pub fn reversed(&self) -> Self {
        Prior {
            states: self.states.iter().rev().cloned().collect(),
            mass: self.mass.iter().rev().cloned().collect(),
        }
    }
}

/// Ordered actions with a distinguished default `a0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpace {
    actions: Vec<String>,
    default_index: usize,
}

impl ActionSpace {
    pub fn new(actions: Vec<String>, default_index: usize) -> Result<Self> {
        if default_index == 0 || default_index + 1 >= actions.len() {
            return Err(Error::InvalidStructure(
                "need at least one action on each side of the default".into(),
            ));
        }
        Ok(ActionSpace { actions, default_index })
    }

    /// `below` actions under the default and `above` over it, labelled `a-l..a0..aL`.
    pub fn symmetric(below: usize, above: usize) -> Result<Self> {
        let actions = (-(below as i64)..=above as i64).map(|i| format!("a{i}")).collect();
        Self::new(actions, below)
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn default_index(&self) -> usize {
        self.default_index
    }

    pub fn label(&self, a: usize) -> &str {
        &self.actions[a]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == label)
    }

    /// Reverses the action order; the default stays the default.
    pub fn reversed(&self) -> Self {
        ActionSpace {
            actions: self.actions.iter().rev().cloned().collect(),
            default_index: self.actions.len() - 1 - self.default_index,
        }
    }
}

/// Shape of a state-indexed vector under weak monotonicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Constant,
    Decreasing,
    Increasing,
    NonMonotone,
}

impl Monotonicity {
    pub fn of<T: Scalar>(q: &[T]) -> Self {
        let up = q.windows(2).any(|w| w[0].approx_lt(&w[1]));
        let down = q.windows(2).any(|w| w[1].approx_lt(&w[0]));
        match (down, up) {
            (false, false) => Monotonicity::Constant,
            (true, false) => Monotonicity::Decreasing,
            (false, true) => Monotonicity::Increasing,
            (true, true) => Monotonicity::NonMonotone,
        }
    }
}

/// Baseline `f(x|ω)` stored column-wise: `columns[x][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineStructure<T: Scalar = Rational> {
    messages: Vec<String>,
    columns: Vec<Vec<T>>,
}

impl<T: Scalar> BaselineStructure<T> {
    pub fn new(messages: Vec<String>, columns: Vec<Vec<T>>) -> Result<Self> {
        if messages.is_empty() || messages.len() != columns.len() {
            return Err(Error::InvalidStructure("one column per message required".into()));
        }
        let n = columns[0].len();
        if n == 0 || columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidStructure("ragged likelihood columns".into()));
        }
        if columns.iter().flatten().any(|v| v.is_neg()) {
            return Err(Error::InvalidStructure("negative likelihood".into()));
        }
        for k in 0..n {
            if !sum(columns.iter().map(|c| c[k].clone())).approx_eq(&T::one()) {
                return Err(Error::InvalidStructure(format!("row {k} does not sum to 1")));
            }
        }
        Ok(BaselineStructure { messages, columns })
    }

    /// Builds from state rows `rows[k][x]`.
    pub fn from_rows(messages: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self> {
        let m = messages.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidStructure("row length differs from message count".into()));
        }
        let columns = (0..m).map(|x| rows.iter().map(|r| r[x].clone()).collect()).collect();
        Self::new(messages, columns)
    }

    pub fn num_states(&self) -> usize {
        self.columns[0].len()
    }

    pub fn num_messages(&self) -> usize {
        self.messages.len()
    }

    pub fn messages(&self) -> &[String] {
        &self.messages
    }

    pub fn column(&self, x: usize) -> &[T] {
        &self.columns[x]
    }

    pub fn columns(&self) -> &[Vec<T>] {
        &self.columns
    }

    pub fn get(&self, x: usize, k: usize) -> &T {
        &self.columns[x][k]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.messages.iter().position(|m| m == label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MessageClass {
    D,
    I,
    S,
}

impl MessageClass {
    pub fn tag(self) -> &'static str {
        match self {
            MessageClass::D => "D",
            MessageClass::I => "I",
            MessageClass::S => "S",
        }
    }
}

/// D/I/S partition of a baseline's messages (indices in declaration order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageClassification {
    classes: Vec<MessageClass>,
}

impl MessageClassification {
    pub fn class_of(&self, x: usize) -> MessageClass {
        self.classes[x]
    }

    pub fn classes(&self) -> &[MessageClass] {
        &self.classes
    }

    fn members(&self, c: MessageClass) -> Vec<usize> {
        (0..self.classes.len()).filter(|&x| self.classes[x] == c).collect()
    }

    pub fn d(&self) -> Vec<usize> {
        self.members(MessageClass::D)
    }

    pub fn i(&self) -> Vec<usize> {
        self.members(MessageClass::I)
    }

    pub fn s(&self) -> Vec<usize> {
        self.members(MessageClass::S)
    }
}

pub fn classify_column<T: Scalar>(q: &[T]) -> MessageClass {
    match Monotonicity::of(q) {
        Monotonicity::Constant | Monotonicity::Decreasing => MessageClass::D,
        Monotonicity::Increasing => MessageClass::I,
        Monotonicity::NonMonotone => MessageClass::S,
    }
}

pub fn classify_messages<T: Scalar>(f: &BaselineStructure<T>) -> MessageClassification {
    MessageClassification { classes: f.columns.iter().map(|c| classify_column(c)).collect() }
}

/// Joint kernel `h(x,y|ω)`, one state vector per `(x, y)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct JointStructure<T: Scalar = Rational> {
    x_messages: Vec<String>,
    y_messages: Vec<String>,
    n: usize,
    cols: Vec<Vec<T>>,
}

impl<T: Scalar> JointStructure<T> {
    /// `kernel[x][y][k]`.
    pub fn new(
        x_messages: Vec<String>,
        y_messages: Vec<String>,
        kernel: Vec<Vec<Vec<T>>>,
    ) -> Result<Self> {
        if kernel.len() != x_messages.len() || kernel.iter().any(|r| r.len() != y_messages.len()) {
            return Err(Error::InvalidStructure("kernel shape differs from X x Y".into()));
        }
        let cols: Vec<Vec<T>> = kernel.into_iter().flatten().collect();
        let n = cols.first().map_or(0, |c| c.len());
        Self::from_flat(x_messages, y_messages, n, cols)
    }

    /// Columns indexed by `x * |Y| + y`.
    pub fn from_flat(
        x_messages: Vec<String>,
        y_messages: Vec<String>,
        n: usize,
        cols: Vec<Vec<T>>,
    ) -> Result<Self> {
        if x_messages.is_empty() || y_messages.is_empty() || n == 0 {
            return Err(Error::InvalidStructure("empty message or state space".into()));
        }
        if cols.len() != x_messages.len() * y_messages.len() || cols.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidStructure("kernel shape differs from X x Y x states".into()));
        }
        if cols.iter().flatten().any(|v| v.is_neg()) {
            return Err(Error::InvalidStructure("negative kernel entry".into()));
        }
        for k in 0..n {
            if !sum(cols.iter().map(|c| c[k].clone())).approx_eq(&T::one()) {
                return Err(Error::InvalidStructure(format!("state {k} does not sum to 1")));
            }
        }
        Ok(JointStructure { x_messages, y_messages, n, cols })
    }

    pub fn from_fn(
        x_messages: Vec<String>,
        y_messages: Vec<String>,
        n: usize,
        mut h: impl FnMut(usize, usize, usize) -> T,
    ) -> Result<Self> {
        let ny = y_messages.len();
        let cols = (0..x_messages.len() * ny)
            .map(|c| (0..n).map(|k| h(c / ny, c % ny, k)).collect())
            .collect();
        Self::from_flat(x_messages, y_messages, n, cols)
    }

    /// `h(x,y|ω) = f(x|ω) g(y)`.
    pub fn independent(f: &BaselineStructure<T>, y_messages: Vec<String>, g: &[T]) -> Result<Self> {
        if g.len() != y_messages.len() {
            return Err(Error::InvalidStructure("g has wrong length".into()));
        }
        Self::from_fn(f.messages.clone(), y_messages, f.num_states(), |x, y, k| {
            f.get(x, k).clone() * g[y].clone()
        })
    }

    /// `f` paired with a single uninformative y.
    pub fn trivial(f: &BaselineStructure<T>) -> Self {
        Self::independent(f, vec!["y".into()], &[T::one()]).expect("trivial lift")
    }

    pub fn num_states(&self) -> usize {
        self.n
    }

    pub fn x_messages(&self) -> &[String] {
        &self.x_messages
    }

    pub fn y_messages(&self) -> &[String] {
        &self.y_messages
    }

    pub fn nx(&self) -> usize {
        self.x_messages.len()
    }

    pub fn ny(&self) -> usize {
        self.y_messages.len()
    }

    pub fn get(&self, x: usize, y: usize, k: usize) -> &T {
        &self.cols[x * self.ny() + y][k]
    }

    pub fn column(&self, x: usize, y: usize) -> &[T] {
        &self.cols[x * self.ny() + y]
    }

    /// All `(x, y)` columns in `x`-major order.
    pub fn flat_columns(&self) -> &[Vec<T>] {
        &self.cols
    }

    pub fn x_marginal(&self) -> Vec<Vec<T>> {
        (0..self.nx())
            .map(|x| (0..self.n).map(|k| sum((0..self.ny()).map(|y| self.get(x, y, k).clone()))).collect())
            .collect()
    }

    pub fn y_marginal(&self, y: usize) -> Vec<T> {
        (0..self.n).map(|k| sum((0..self.nx()).map(|x| self.get(x, y, k).clone()))).collect()
    }

    /// The baseline this structure induces on X.
    pub fn baseline(&self) -> BaselineStructure<T> {
        BaselineStructure { messages: self.x_messages.clone(), columns: self.x_marginal() }
    }

    /// Errors with [`Error::MarginalMismatch`] unless `Σ_y h(x,y|ω) = f(x|ω)`.
    pub fn check_consistent(&self, f: &BaselineStructure<T>) -> Result<()> {
        if f.num_states() != self.n || f.num_messages() != self.nx() {
            return Err(Error::SpaceMismatch("baseline and joint shapes differ".into()));
        }
        let m = self.x_marginal();
        for x in 0..self.nx() {
            for k in 0..self.n {
                if !m[x][k].approx_eq(f.get(x, k)) {
                    return Err(Error::MarginalMismatch { x: self.x_messages[x].clone(), state: k });
                }
            }
        }
        Ok(())
    }

    /// Drops y-messages whose columns vanish for every x.
    pub fn prune(&self) -> Self {
        let keep: Vec<usize> = (0..self.ny())
            .filter(|&y| (0..self.nx()).any(|x| self.column(x, y).iter().any(|v| !v.is_nil())))
            .collect();
        let ys = keep.iter().map(|&y| self.y_messages[y].clone()).collect();
        Self::from_fn(self.x_messages.clone(), ys, self.n, |x, j, k| self.get(x, keep[j], k).clone())
            .expect("pruning preserves validity")
    }

    pub fn with_y_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.ny() {
            return Err(Error::InvalidStructure("label count differs".into()));
        }
        self.y_messages = labels;
        Ok(self)
    }

    pub fn pair_label(&self, x: usize, y: usize) -> String {
        format!("({},{})", self.x_messages[x], self.y_messages[y])
    }
}

/// Posterior belief over states.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior<T: Scalar = Rational> {
    pub mass: Vec<T>,
}

/// Bayes update of `μ` on observing `(x, y)`.
pub fn posterior<T: Scalar>(
    h: &JointStructure<T>,
    x: usize,
    y: usize,
    prior: &Prior<T>,
) -> Result<Posterior<T>> {
    if prior.len() != h.num_states() {
        return Err(Error::StateMismatch(prior.len(), h.num_states()));
    }
    Ok(Posterior { mass: bayes(h.column(x, y), prior.mass()).ok_or_else(|| Error::ZeroProbabilityMessage(h.pair_label(x, y)))? })
}

/// Normalized `q·μ`, or `None` when it has zero mass.
pub fn bayes<T: Scalar>(q: &[T], mu: &[T]) -> Option<Vec<T>> {
    let joint: Vec<T> = q.iter().zip(mu).map(|(a, b)| a.clone() * b.clone()).collect();
    let total = sum(joint.iter().cloned());
    if !total.is_pos() {
        return None;
    }
    Some(joint.into_iter().map(|v| v / total.clone()).collect())
}

/// Stochastic kernel from `X×Y` pairs to `X'×Y'` pairs (both flattened `x`-major).
#[derive(Debug, Clone, PartialEq)]
pub struct Garbling<T: Scalar = Rational> {
    pub source_x: Vec<String>,
    pub source_y: Vec<String>,
    pub target_x: Vec<String>,
    pub target_y: Vec<String>,
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> Garbling<T> {
    pub fn new(
        source_x: Vec<String>,
        source_y: Vec<String>,
        target_x: Vec<String>,
        target_y: Vec<String>,
        rows: Vec<Vec<T>>,
    ) -> Result<Self> {
        let (ns, nt) = (source_x.len() * source_y.len(), target_x.len() * target_y.len());
        if rows.len() != ns || rows.iter().any(|r| r.len() != nt) {
            return Err(Error::InvalidStructure("garbling shape differs from spaces".into()));
        }
        for r in &rows {
            if r.iter().any(|v| v.is_neg()) || !sum(r.iter().cloned()).approx_eq(&T::one()) {
                return Err(Error::InvalidStructure("garbling row is not a distribution".into()));
            }
        }
        Ok(Garbling { source_x, source_y, target_x, target_y, rows })
    }

    /// Deterministic garbling sending source pair `s` to target pair `map(s)`.
    pub fn deterministic(
        source_x: Vec<String>,
        source_y: Vec<String>,
        target_x: Vec<String>,
        target_y: Vec<String>,
        map: impl Fn(usize, usize) -> (usize, usize),
    ) -> Result<Self> {
        let nsy = source_y.len();
        let nty = target_y.len();
        let nt = target_x.len() * nty;
        let rows = (0..source_x.len() * nsy)
            .map(|s| {
                let (tx, ty) = map(s / nsy, s % nsy);
                let mut r = vec![T::zero(); nt];
                r[tx * nty + ty] = T::one();
                r
            })
            .collect();
        Self::new(source_x, source_y, target_x, target_y, rows)
    }

    pub fn identity(h: &JointStructure<T>) -> Self {
        let (xs, ys) = (h.x_messages.clone(), h.y_messages.clone());
        Self::deterministic(xs.clone(), ys.clone(), xs, ys, |x, y| (x, y)).expect("identity")
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn weight(&self, x: usize, y: usize, tx: usize, ty: usize) -> &T {
        &self.rows[x * self.source_y.len() + y][tx * self.target_y.len() + ty]
    }
}

/// `h'(x',y'|ω) = Σ_{x,y} h(x,y|ω) γ(x',y'|x,y)`.
pub fn apply_garbling<T: Scalar>(h: &JointStructure<T>, g: &Garbling<T>) -> Result<JointStructure<T>> {
    if g.source_x != h.x_messages || g.source_y != h.y_messages {
        return Err(Error::SpaceMismatch("garbling source differs from the structure's spaces".into()));
    }
    let nt = g.target_x.len() * g.target_y.len();
    let mut cols = vec![vec![T::zero(); h.n]; nt];
    for (s, col) in h.cols.iter().enumerate() {
        for (t, w) in g.rows[s].iter().enumerate() {
            if w.is_nil() {
                continue;
            }
            for k in 0..h.n {
                if !col[k].is_nil() {
                    cols[t][k] = cols[t][k].clone() + col[k].clone() * w.clone();
                }
            }
        }
    }
    JointStructure::from_flat(g.target_x.clone(), g.target_y.clone(), h.n, cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example1_baseline, example1_hbar};
    use crate::rat;

    #[test]
    fn classify_example1() {
        let c = classify_messages(&example1_baseline());
        assert_eq!((c.d(), c.s(), c.i()), (vec![0], vec![1], vec![2]));
    }

    #[test]
    fn constant_column_goes_to_d() {
        assert_eq!(classify_column(&vec![rat(1, 3); 3]), MessageClass::D);
    }

    #[test]
    fn classify_appendix_c() {
        let c = classify_messages(&crate::fixtures::appendix_c_baseline());
        assert_eq!((c.d(), c.i(), c.s()), (vec![0, 1], vec![2], vec![]));
    }

    #[test]
    fn posterior_examples() {
        let h = example1_hbar();
        let mu = Prior::uniform(3);
        assert_eq!(posterior(&h, 0, 1, &mu).unwrap().mass, vec![rat(1, 2), rat(1, 2), rat(0, 1)]);
        assert_eq!(posterior(&h, 1, 1, &mu).unwrap().mass, vec![rat(0, 1), rat(1, 1), rat(0, 1)]);
        let z = JointStructure::new(
            vec!["x".into()],
            vec!["y1".into(), "y2".into()],
            vec![vec![vec![rat(1, 1); 3], vec![rat(0, 1); 3]]],
        )
        .unwrap();
        assert!(matches!(posterior(&z, 0, 1, &mu), Err(Error::ZeroProbabilityMessage(_))));
    }

    #[test]
    fn constant_likelihood_keeps_prior() {
        let f = example1_baseline();
        let h = JointStructure::trivial(&BaselineStructure::new(vec!["x".into()], vec![vec![rat(1, 1); 3]]).unwrap());
        let mu = Prior::from_mass(vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap();
        assert_eq!(posterior(&h, 0, 0, &mu).unwrap().mass, mu.mass().to_vec());
        assert_eq!(f.num_states(), 3);
    }

    #[test]
    fn identity_and_merge_garblings() {
        let h = example1_hbar();
        assert_eq!(apply_garbling(&h, &Garbling::identity(&h)).unwrap(), h);
        let g = Garbling::deterministic(
            h.x_messages().to_vec(),
            h.y_messages().to_vec(),
            h.x_messages().to_vec(),
            vec!["y*".into()],
            |x, _| (x, 0),
        )
        .unwrap();
        let merged = apply_garbling(&h, &g).unwrap();
        let f = example1_baseline();
        for x in 0..3 {
            assert_eq!(merged.column(x, 0), f.column(x));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Prior::from_mass(vec![rat(1, 1), rat(0, 1)]).is_err());
        assert!(Prior::from_mass(vec![rat(1, 2), rat(1, 3)]).is_err());
        assert!(BaselineStructure::new(vec!["a".into()], vec![vec![rat(1, 2)]]).is_err());
        assert!(ActionSpace::symmetric(0, 1).is_err());
        let h = example1_hbar();
        let bad = Garbling::<Rational>::identity(&JointStructure::trivial(&example1_baseline()));
        assert!(matches!(apply_garbling(&h, &bad), Err(Error::SpaceMismatch(_))));
    }
}
