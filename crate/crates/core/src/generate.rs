//! Random instances for property tests and evidence checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::deniability::telescoping_decompose;
use crate::lp::{lp_solve, LinearSystem, LpOutcome, Relation};
use crate::model::{classify_messages, BaselineStructure, JointStructure, MessageClass, Prior};
use crate::scalar::Scalar;

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}{k}")).collect()
}

fn normalize<T: Scalar>(w: &[i64]) -> Vec<T> {
    let s: i64 = w.iter().sum();
    w.iter().map(|&v| T::from_ratio(v, s)).collect()
}

/// Random positive integer weights `1..=max`, normalized.
pub fn random_distribution<T: Scalar>(rng: &mut impl Rng, len: usize, max: i64) -> Vec<T> {
    let w: Vec<i64> = (0..len).map(|_| rng.gen_range(1..=max)).collect();
    normalize(&w)
}

/// Like [`random_distribution`] but some entries may be zero.
pub fn random_sparse_distribution<T: Scalar>(rng: &mut impl Rng, len: usize, max: i64) -> Vec<T> {
    let mut w: Vec<i64> = (0..len).map(|_| rng.gen_range(0..=max)).collect();
    if w.iter().all(|&v| v == 0) {
        let j = rng.gen_range(0..len);
        w[j] = 1;
    }
    normalize(&w)
}

pub fn random_prior<T: Scalar>(rng: &mut impl Rng, n: usize) -> Prior<T> {
    Prior::from_mass(random_distribution(rng, n, 5)).expect("positive weights")
}

/// Rows drawn independently; entries may be zero.
pub fn random_baseline<T: Scalar>(rng: &mut impl Rng, n: usize, m: usize) -> BaselineStructure<T> {
    let rows = (0..n).map(|_| random_sparse_distribution(rng, m, 5)).collect();
    BaselineStructure::from_rows(labels("x", m), rows).expect("rows are distributions")
}

fn monotone_ints(rng: &mut impl Rng, n: usize, decreasing: bool) -> Vec<i64> {
    let mut v: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=6)).collect();
    v.sort_unstable();
    if decreasing {
        v.reverse();
    }
    v
}

/// Baseline with at most one non-monotone message.
///
/// Half the draws are directional (built from ray masses, no middle
/// message); the rest scale monotone columns down and fill with a middle message.
pub fn random_almost_directional<T: Scalar>(rng: &mut impl Rng, n: usize, m: usize) -> BaselineStructure<T> {
    assert!(m >= 2);
    if rng.gen_bool(0.5) {
        let nd = rng.gen_range(1..m);
        let ni = m - nd;
        let cuts: Vec<i64> = monotone_ints(rng, n, true);
        let base = 7i64;
        let mut cols = vec![vec![0i64; n]; m];
        for k in 0..n {
            let next = if k + 1 < n { cuts[k + 1] } else { 0 };
            let c = cuts[k] - next;
            let who = rng.gen_range(0..nd);
            for q in 0..=k {
                cols[who][q] += c;
            }
        }
        let ishare: Vec<i64> = (0..n).map(|k| base - cuts[k]).collect();
        for k in 0..n {
            let prev = if k > 0 { ishare[k - 1] } else { 0 };
            let c = ishare[k] - prev;
            let who = nd + rng.gen_range(0..ni);
            for q in k..n {
                cols[who][q] += c;
            }
        }
        let columns = cols.iter().map(|c| c.iter().map(|&v| T::from_ratio(v, base)).collect()).collect();
        return BaselineStructure::new(labels("x", m), columns).expect("ray masses sum to one");
    }
    let ns = 1;
    let nd = rng.gen_range(0..=m - ns);
    let raw: Vec<Vec<i64>> = (0..m - ns).map(|x| monotone_ints(rng, n, x < nd)).collect();
    let peak = (0..n).map(|k| raw.iter().map(|c| c[k]).sum::<i64>()).max().unwrap_or(0);
    let den = peak + rng.gen_range(1..=6);
    let mut columns: Vec<Vec<T>> = raw.iter().map(|c| c.iter().map(|&v| T::from_ratio(v, den)).collect()).collect();
    let s: Vec<T> = (0..n).map(|k| T::from_ratio(den - raw.iter().map(|c| c[k]).sum::<i64>(), den)).collect();
    let at = rng.gen_range(0..=columns.len());
    columns.insert(at, s);
    BaselineStructure::new(labels("x", m), columns).expect("rows sum to one")
}

/// Deniable structure: each extreme-ray coefficient of `f` is split at random across `ny` y's.
pub fn random_pd<T: Scalar>(rng: &mut impl Rng, f: &BaselineStructure<T>, ny: usize) -> JointStructure<T> {
    let dec = telescoping_decompose(f);
    let n = f.num_states();
    let mut cols = vec![vec![T::zero(); n]; f.num_messages() * ny];
    for (x, rays) in dec.rays.iter().enumerate() {
        for (ray, c) in rays {
            let w: Vec<T> = random_sparse_distribution(rng, ny, 3);
            let v = ray.vector::<T>(n);
            for y in 0..ny {
                for k in 0..n {
                    let add = c.clone() * w[y].clone() * v[k].clone();
                    cols[x * ny + y][k] = cols[x * ny + y][k].clone() + add;
                }
            }
        }
    }
    JointStructure::from_flat(f.messages().to_vec(), labels("y", ny), n, cols).expect("mass is conserved")
}

/// Unconstrained joint structure with its own induced baseline.
pub fn random_joint<T: Scalar>(rng: &mut impl Rng, n: usize, nx: usize, ny: usize) -> JointStructure<T> {
    let rows: Vec<Vec<T>> = (0..n).map(|_| random_sparse_distribution(rng, nx * ny, 4)).collect();
    JointStructure::from_fn(labels("x", nx), labels("y", ny), n, |x, y, k| rows[k][x * ny + y].clone())
        .expect("rows are distributions")
}

/// Northwest-corner coupling of `a` and `b` after shuffling both orders.
fn shuffled_coupling<T: Scalar>(rng: &mut impl Rng, a: &[T], b: &[T]) -> Vec<Vec<T>> {
    let mut ia: Vec<usize> = (0..a.len()).collect();
    let mut ib: Vec<usize> = (0..b.len()).collect();
    ia.shuffle(rng);
    ib.shuffle(rng);
    let mut ra: Vec<T> = a.to_vec();
    let mut rb: Vec<T> = b.to_vec();
    let mut w = vec![vec![T::zero(); b.len()]; a.len()];
    let (mut p, mut q) = (0, 0);
    while p < ia.len() && q < ib.len() {
        let (x, y) = (ia[p], ib[q]);
        let m = if ra[x] < rb[y] { ra[x].clone() } else { rb[y].clone() };
        w[x][y] = w[x][y].clone() + m.clone();
        ra[x] = ra[x].clone() - m.clone();
        rb[y] = rb[y].clone() - m;
        if ra[x].is_nil() {
            p += 1;
        } else {
            q += 1;
        }
    }
    w
}

/// Secret structure with y-marginal `g` drawn at random: a per-state mix of
/// two shuffled couplings of `f(·|ω)` and `g`.
pub fn random_secrecy<T: Scalar>(rng: &mut impl Rng, f: &BaselineStructure<T>, ny: usize) -> JointStructure<T> {
    let n = f.num_states();
    let g: Vec<T> = random_distribution(rng, ny, 4);
    let lam = T::from_ratio(rng.gen_range(0..=4), 4);
    let per_state: Vec<Vec<Vec<T>>> = (0..n)
        .map(|k| {
            let fk: Vec<T> = (0..f.num_messages()).map(|x| f.get(x, k).clone()).collect();
            let c1 = shuffled_coupling(rng, &fk, &g);
            let c2 = shuffled_coupling(rng, &fk, &g);
            c1.iter()
                .zip(&c2)
                .map(|(r1, r2)| {
                    r1.iter()
                        .zip(r2)
                        .map(|(a, b)| lam.clone() * a.clone() + (T::one() - lam.clone()) * b.clone())
                        .collect()
                })
                .collect()
        })
        .collect();
    JointStructure::from_fn(f.messages().to_vec(), labels("y", ny), n, |x, y, k| per_state[k][x][y].clone())
        .expect("couplings have the right marginals")
}

/// Secret and deniable structure: a vertex of the feasible polytope for a
/// random objective, mixed with the independent structure.
pub fn random_spd<T: Scalar>(rng: &mut impl Rng, f: &BaselineStructure<T>, ny: usize) -> JointStructure<T> {
    let n = f.num_states();
    let nx = f.num_messages();
    let g: Vec<T> = random_distribution(rng, ny, 4);
    let classes = classify_messages(f);
    let var = |x: usize, y: usize, k: usize| (x * ny + y) * n + k;
    let mut sys = LinearSystem::new(nx * ny * n);
    for k in 0..n {
        for x in 0..nx {
            sys.add((0..ny).map(|y| (var(x, y, k), T::one())).collect(), Relation::Eq, f.get(x, k).clone());
        }
        for y in 0..ny {
            sys.add((0..nx).map(|x| (var(x, y, k), T::one())).collect(), Relation::Eq, g[y].clone());
        }
    }
    for x in 0..nx {
        let constant = f.column(x).windows(2).all(|w| w[0].approx_eq(&w[1]));
        for y in 0..ny {
            for k in 0..n.saturating_sub(1) {
                let diff = vec![(var(x, y, k), T::one()), (var(x, y, k + 1), -T::one())];
                match classes.class_of(x) {
                    MessageClass::D if constant => sys.add(diff, Relation::Eq, T::zero()),
                    MessageClass::D => sys.add(diff, Relation::Ge, T::zero()),
                    MessageClass::I => sys.add(diff, Relation::Le, T::zero()),
                    MessageClass::S => {}
                }
            }
        }
    }
    sys.maximize((0..nx * ny * n).map(|j| (j, T::from_i64(rng.gen_range(-5..=5)))).collect());
    let LpOutcome::Optimal { point, .. } = lp_solve(&sys) else {
        unreachable!("the independent structure is feasible and the polytope is bounded")
    };
    let lam = T::from_ratio(rng.gen_range(1..=4), 4);
    JointStructure::from_fn(f.messages().to_vec(), labels("y", ny), n, |x, y, k| {
        lam.clone() * point[var(x, y, k)].clone() + (T::one() - lam.clone()) * f.get(x, k).clone() * g[y].clone()
    })
    .expect("convex combination of feasible structures")
}
