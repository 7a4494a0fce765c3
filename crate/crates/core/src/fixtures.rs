//! Worked instances used by tests, benchmarks and the command line tool.

use crate::model::{BaselineStructure, JointStructure, MessageClass};
use crate::signalrep::SignalRepresentation;
use crate::{rat, Rational};

fn labels(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn tenths(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&v| rat(v, 10)).collect()
}

/// Three states, messages `d` (decreasing), `s` (hump), `i` (increasing).
pub fn example1_baseline() -> BaselineStructure {
    BaselineStructure::new(labels(&["d", "s", "i"]), vec![tenths(&[6, 3, 1]), tenths(&[2, 3, 2]), tenths(&[2, 4, 7])])
        .expect("valid baseline")
}

/// The greatest deniable structure for [`example1_baseline`], written out by hand.
pub fn example1_hbar() -> JointStructure {
    let t = tenths;
    JointStructure::new(
        labels(&["d", "s", "i"]),
        labels(&["y1", "y2", "y3"]),
        vec![
            vec![t(&[3, 0, 0]), t(&[2, 2, 0]), t(&[1, 1, 1])],
            vec![t(&[2, 0, 0]), t(&[0, 3, 0]), t(&[0, 0, 2])],
            vec![t(&[2, 2, 2]), t(&[0, 2, 2]), t(&[0, 0, 3])],
        ],
    )
    .expect("valid joint")
}

/// Direction-ordered painting of [`example1_baseline`], written out by hand.
pub fn figure1_psi() -> SignalRepresentation {
    let runs = [[6, 2, 2], [3, 3, 4], [1, 2, 7]]
        .iter()
        .map(|r| r.iter().enumerate().map(|(x, &v)| (x, rat(v, 10))).collect())
        .collect();
    SignalRepresentation::from_lengths(labels(&["d", "s", "i"]), runs).expect("valid painting")
}

/// Three-state baseline with no non-monotone message and a heavy `x2`.
pub fn appendix_c_baseline() -> BaselineStructure {
    let r = |a, b| rat(a, b);
    BaselineStructure::new(
        labels(&["x1", "x2", "x3"]),
        vec![vec![r(1, 3), r(1, 3), r(1, 3)], vec![r(2, 3), r(2, 3), r(1, 3)], vec![r(0, 1), r(0, 1), r(1, 3)]],
    )
    .expect("valid baseline")
}

/// Thirds painting of [`appendix_c_baseline`]: `x1, x2, x2` in the first two
/// states and `x2, x1, x3` in the last.
pub fn appendix_c_psi() -> SignalRepresentation {
    let third = rat(1, 3);
    let runs = [[0, 1, 1], [0, 1, 1], [1, 0, 2]]
        .iter()
        .map(|r| r.iter().map(|&x| (x, third.clone())).collect())
        .collect();
    SignalRepresentation::from_lengths(labels(&["x1", "x2", "x3"]), runs).expect("valid painting")
}

/// Two states, `x1 = (7/10, 1/2)`, `x2 = (3/10, 1/2)`.
pub fn binary_baseline() -> BaselineStructure {
    BaselineStructure::new(labels(&["x1", "x2"]), vec![vec![rat(7, 10), rat(1, 2)], vec![rat(3, 10), rat(1, 2)]])
        .expect("valid baseline")
}

/// Classes of `d, s, i` when the pieces below sit inside a larger structure.
pub const LOCAL_CLASSES: [MessageClass; 3] = [MessageClass::D, MessageClass::S, MessageClass::I];

fn two_halves(y: [usize; 3], yp: [usize; 3]) -> SignalRepresentation {
    let h = rat(1, 2);
    let runs = (0..3).map(|k| vec![(y[k], h.clone()), (yp[k], h.clone())]).collect();
    SignalRepresentation::from_lengths(labels(&["d", "s", "i"]), runs).expect("valid painting")
}

/// `i` left of `s` in the middle state: `y = (d,i,i)`, `y' = (s,s,i)`.
pub fn figure4_original() -> SignalRepresentation {
    two_halves([0, 2, 2], [1, 1, 2])
}

/// `y = (d,s,i)`, `y' = (s,i,i)`.
pub fn figure4_new() -> SignalRepresentation {
    two_halves([0, 1, 2], [1, 2, 2])
}

/// `i` left of `s` in the last state: `y = (d,s,i)`, `y' = (s,s,s)`.
pub fn figure5_original() -> SignalRepresentation {
    two_halves([0, 1, 2], [1, 1, 1])
}

/// `y = (d,s,s)`, `y' = (s,s,i)`.
pub fn figure5_new() -> SignalRepresentation {
    two_halves([0, 1, 1], [1, 1, 2])
}

/// [`figure4_original`] padded with two cells so that `s` is non-monotone in
/// its own baseline: `(d,d,s)` of length 2/5 on the left and `(s,i,i)` on the right.
pub fn figure4_embedded() -> SignalRepresentation {
    let fifth = |v| rat(v, 5);
    let cols = [([0, 0, 1], 2), ([0, 2, 2], 1), ([1, 1, 2], 1), ([1, 2, 2], 1)];
    let runs = (0..3).map(|k| cols.iter().map(|(a, l)| (a[k], fifth(*l))).collect()).collect();
    SignalRepresentation::from_lengths(labels(&["d", "s", "i"]), runs).expect("valid painting")
}

/// Two D and two I messages nested inside their regions around a constant middle message.
pub fn figure2_psi() -> SignalRepresentation {
    let names = labels(&["d1", "d2", "S", "i1", "i2"]);
    let rows: [&[(usize, i64)]; 3] = [
        &[(0, 1), (1, 2), (0, 1), (1, 1), (2, 3), (3, 1), (4, 1)],
        &[(0, 1), (1, 2), (0, 1), (2, 3), (4, 1), (3, 1), (4, 1)],
        &[(0, 1), (1, 1), (2, 3), (3, 2), (4, 1), (3, 1), (4, 1)],
    ];
    let runs = rows.iter().map(|r| r.iter().map(|&(x, l)| (x, rat(l, 10))).collect()).collect();
    SignalRepresentation::from_lengths(names, runs).expect("valid painting")
}
