//! Acceptance criteria, one line per criterion. Exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use covert_core::deniability::{check_plausible_deniability, pd_greatest};
use covert_core::dominance::{blackwell_dominates, dominance_over_u_evidence, Verdict};
use covert_core::fixtures::{appendix_c_baseline, example1_baseline, figure4_new, figure4_original, figure5_new, figure5_original, LOCAL_CLASSES};
use covert_core::frontier::{counterexample_check, direction_ordered, spd_lift, swap_improve_classified, theorem4_condition, theorem4_construct, SwapKind};
use covert_core::generate::{random_almost_directional, random_baseline, random_joint, random_pd, random_prior, random_secrecy, random_spd};
use covert_core::lp::{lp_feasible, LinearSystem, Relation};
use covert_core::model::{bayes, ActionSpace, BaselineStructure, JointStructure, Prior};
use covert_core::rationalize::{rationalizable_actions, rationalizable_lp_oracle};
use covert_core::sampling::RoundSampler;
use covert_core::signalrep::{binary_state_greatest, check_secrecy, full_revelation_feasible, pooled_mass, secrecy_lift, to_joint};
use covert_core::utility::{sample_utility_with, value_of_information, WeightedExperiment};
use covert_core::{rat, Rational, Scalar};
use covert_frontier::problem::ProblemFile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// Budget for criteria without their own limit.
const DEFAULT_BUDGET: Duration = Duration::from_secs(10);
const LEMMA2_BUDGET: Duration = Duration::from_secs(60);
const DOMINANCE_BUDGET: Duration = Duration::from_secs(300);
const SIMULATION_BUDGET: Duration = Duration::from_secs(30);
/// Simulated frequencies must sit within this many binomial standard deviations.
const SIGMA_BOUND: f64 = 4.0;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn cli(args: &[&str]) -> Result<(i32, Value), String> {
    let argv = ["covert-frontier"].iter().chain(args).chain(&["--no-timing"]).copied();
    let out = covert_frontier::run(argv);
    let v = serde_json::from_str(&out.stdout).map_err(|e| format!("bad report ({e}): {}", out.stderr))?;
    Ok((out.code, v))
}

fn structure_of(report: &Value) -> Result<covert_frontier::problem::Problem, String> {
    let file: ProblemFile = serde_json::from_value(report["results"]["structure"].clone()).map_err(|e| e.to_string())?;
    file.parse().map_err(|e| e.to_string())
}

fn certified(a: &JointStructure, b: &JointStructure, x_preserving: bool) -> bool {
    blackwell_dominates(a, b, x_preserving).expect("comparable spaces").is_some()
}

fn tenths(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&v| rat(v, 10)).collect()
}

fn c1_pd_greatest_table() -> Outcome {
    let (code, v) = cli(&["construct", "-i", &data("example1.json"), "--target", "pd-greatest"])?;
    ensure(code == 0, || format!("exit {code}"))?;
    let g = structure_of(&v)?.joint.ok_or("no joint in output")?;
    // Rows ω1..ω3; columns (d,y1..y3), (s,y1..y3), (i,y1..y3).
    let table = [tenths(&[3, 2, 1, 2, 0, 0, 2, 0, 0]), tenths(&[0, 2, 1, 0, 3, 0, 2, 2, 0]), tenths(&[0, 0, 1, 0, 0, 2, 2, 2, 3])];
    let mut merged = vec![vec![vec![rat(0, 1); 3]; 3]; 3];
    for y in 0..g.ny() {
        let cutoff = g.y_messages()[y].rsplit(':').next().and_then(|s| s.parse::<usize>().ok()).filter(|c| (1..=3).contains(c));
        let cutoff = cutoff.ok_or_else(|| format!("unexpected y label {}", g.y_messages()[y]))? - 1;
        for x in 0..3 {
            for k in 0..3 {
                merged[k][x][cutoff] = merged[k][x][cutoff].clone() + g.get(x, y, k).clone();
            }
        }
    }
    let mut matched = 0;
    for k in 0..3 {
        for x in 0..3 {
            for y in 0..3 {
                ensure(merged[k][x][y] == table[k][3 * x + y], || format!("entry (x{x}, y{}, w{}) = {}", y + 1, k + 1, merged[k][x][y]))?;
                matched += 1;
            }
        }
    }
    Ok(format!("{matched}/27 entries exact"))
}

fn c2_figure1_cells() -> Outcome {
    let (code, v) = cli(&["construct", "-i", &data("example1.json"), "--target", "direction-ordered"])?;
    ensure(code == 0, || format!("exit {code}"))?;
    let psi = structure_of(&v)?.representation.ok_or("no representation in output")?;
    let expected = [("(d,d,d)", 1), ("(d,d,s)", 2), ("(d,s,i)", 3), ("(s,i,i)", 2), ("(i,i,i)", 2)];
    let cells = psi.cells().cells;
    ensure(cells.len() == expected.len(), || format!("{} cells", cells.len()))?;
    for (c, (label, len)) in cells.iter().zip(expected) {
        ensure(c.label == label && c.length == rat(len, 10), || format!("cell {} of length {}", c.label, c.length))?;
    }
    let h = to_joint(&psi);
    ensure(check_secrecy(&h).holds, || "secrecy fails".into())?;
    ensure(check_plausible_deniability(&h, &example1_baseline()).map_err(|e| e.to_string())?.holds, || "PD fails".into())?;
    Ok("5 cells (1,2,3,2,2)/10; secrecy and PD exact".into())
}

/// Every supported `(x, y)` column's rationalizable set sits inside its x column's.
fn pd_by_containment(h: &JointStructure, f: &BaselineStructure, actions: &ActionSpace) -> bool {
    (0..h.nx()).all(|x| {
        let zero = |c: &[Rational]| c.iter().all(|v| v.is_nil());
        if zero(f.column(x)) {
            return true;
        }
        let rx = rationalizable_actions(f.column(x), actions).unwrap();
        (0..h.ny()).filter(|&y| !zero(h.column(x, y))).all(|y| rationalizable_actions(h.column(x, y), actions).unwrap().is_subset(&rx))
    })
}

fn c3_theorem1_oracle() -> Outcome {
    let mut r = rng(3);
    let actions = ActionSpace::symmetric(2, 2).unwrap();
    let (mut holds, mut fails) = (0, 0);
    for i in 0..600 {
        let (n, nx, ny) = (r.gen_range(2..=4), r.gen_range(1..=4), r.gen_range(1..=4));
        let h = if i % 2 == 0 {
            random_joint(&mut r, n, nx, ny)
        } else {
            let f = random_baseline(&mut r, n, nx);
            random_pd(&mut r, &f, ny)
        };
        let f = h.baseline();
        let fast = check_plausible_deniability(&h, &f).map_err(|e| e.to_string())?.holds;
        ensure(fast == pd_by_containment(&h, &f, &actions), || format!("disagreement on structure {i}"))?;
        if fast {
            holds += 1;
        } else {
            fails += 1;
        }
    }
    ensure(holds > 0 && fails > 0, || format!("degenerate sample: {holds} deniable, {fails} not"))?;
    Ok(format!("600 structures, 0 disagreements ({holds} deniable, {fails} not)"))
}

fn c4_lemma2_oracle() -> Outcome {
    let mut r = rng(4);
    let actions = ActionSpace::symmetric(2, 2).unwrap();
    let mut checked = 0;
    for i in 0..600 {
        let n = r.gen_range(2..=5);
        let mut q: Vec<Rational> = (0..n).map(|_| rat(r.gen_range(0..=6), 6)).collect();
        if q.iter().all(|v| v.is_nil()) {
            q[r.gen_range(0..n)] = rat(1, 6);
        }
        let prior: Prior = random_prior(&mut r, n);
        let set = rationalizable_actions(&q, &actions).map_err(|e| e.to_string())?;
        for a in 0..actions.len() {
            ensure(set.contains(a) == rationalizable_lp_oracle(&q, a, &actions, &prior), || format!("vector {i}, action {a}"))?;
            checked += 1;
        }
    }
    Ok(format!("600 vectors, {checked} action checks, 0 disagreements"))
}

fn c5_pd_greatest_dominates() -> Outcome {
    let mut r = rng(5);
    let mut total = 0;
    for b in 0..100 {
        let (n, m) = (r.gen_range(2..=4), r.gen_range(2..=4));
        let f: BaselineStructure = random_baseline(&mut r, n, m);
        let g = pd_greatest(&f);
        for _ in 0..20 {
            let ny = r.gen_range(1..=3);
            let h = random_pd(&mut r, &f, ny);
            ensure(check_plausible_deniability(&h, &f).map_err(|e| e.to_string())?.holds, || format!("baseline {b}: generator left PD"))?;
            ensure(certified(&g, &h, true), || format!("baseline {b}: no certificate"))?;
            total += 1;
        }
    }
    Ok(format!("{total}/{total} certified x-preserving"))
}

fn c6_lifts_dominate() -> Outcome {
    let mut r = rng(6);
    for i in 0..100 {
        let (n, m) = (r.gen_range(2..=4), r.gen_range(2..=4));
        let f: BaselineStructure = random_baseline(&mut r, n, m);
        let ny = r.gen_range(1..=3);
        let h = random_secrecy(&mut r, &f, ny);
        let lift = to_joint(&secrecy_lift(&h).map_err(|e| e.to_string())?);
        ensure(certified(&lift, &h, true), || format!("secrecy structure {i}"))?;
        let (n, m) = (r.gen_range(2..=4), r.gen_range(2..=4));
        let f: BaselineStructure = random_baseline(&mut r, n, m);
        let ny = r.gen_range(1..=3);
        let h = random_spd(&mut r, &f, ny);
        let lift = to_joint(&spd_lift(&h).map_err(|e| e.to_string())?);
        ensure(check_plausible_deniability(&lift, &f).map_err(|e| e.to_string())?.holds, || format!("SPD lift {i} not deniable"))?;
        ensure(certified(&lift, &h, true), || format!("SPD structure {i}"))?;
    }
    Ok("100/100 secrecy and 100/100 SPD lifts certified".into())
}

/// Feasibility of a distribution over injective maps `Ω → X` with marginals `f`.
fn zero_overlap_painting(f: &BaselineStructure) -> bool {
    let (n, m) = (f.num_states(), f.num_messages());
    let mut maps: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        maps = maps
            .into_iter()
            .flat_map(|p| (0..m).filter(|x| !p.contains(x)).map(|x| [p.as_slice(), &[x]].concat()).collect::<Vec<_>>())
            .collect();
    }
    if maps.is_empty() {
        return false;
    }
    let mut sys = LinearSystem::new(maps.len());
    for k in 0..n {
        for x in 0..m {
            let row = maps.iter().enumerate().filter(|(_, s)| s[k] == x).map(|(j, _)| (j, rat(1, 1))).collect();
            sys.add(row, Relation::Eq, f.get(x, k).clone());
        }
    }
    lp_feasible(&sys).is_some()
}

fn c7_full_revelation() -> Outcome {
    let column_sum = |f: &BaselineStructure, x: usize| f.column(x).iter().fold(rat(0, 1), |s, v| s + v.clone());
    let e1 = example1_baseline();
    ensure(!full_revelation_feasible(&e1) && column_sum(&e1, 2) == rat(13, 10), || "example1 baseline".into())?;
    let ac = appendix_c_baseline();
    ensure(!full_revelation_feasible(&ac) && column_sum(&ac, 1) == rat(5, 3), || "three-message matrix".into())?;
    let mut r = rng(7);
    let (mut yes, mut no) = (0, 0);
    for i in 0..150 {
        let n = r.gen_range(2..=3);
        let m = r.gen_range(2..=5);
        let f: BaselineStructure = random_baseline(&mut r, n, m);
        let fast = full_revelation_feasible(&f);
        ensure(fast == zero_overlap_painting(&f), || format!("disagreement on baseline {i}"))?;
        if fast {
            yes += 1;
        } else {
            no += 1;
        }
    }
    ensure(yes > 0 && no > 0, || format!("degenerate sample: {yes} feasible, {no} not"))?;
    Ok(format!("13/10 and 5/3 rejected; 150 random, 0 disagreements ({yes} feasible, {no} not)"))
}

fn c8_direction_ordered_dominates() -> Outcome {
    let mut r = rng(8);
    let actions = ActionSpace::symmetric(2, 2).unwrap();
    let mut compared = 0;
    for b in 0..20 {
        let n = r.gen_range(2..=4);
        let m = r.gen_range(2..=4);
        let f: BaselineStructure = random_almost_directional(&mut r, n, m);
        let prior: Prior = random_prior(&mut r, n);
        let top = WeightedExperiment::new(&to_joint(&direction_ordered(&f).map_err(|e| e.to_string())?), &prior).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let ny = r.gen_range(1..=3);
            let h = random_spd(&mut r, &f, ny);
            let w = WeightedExperiment::new(&h, &prior).map_err(|e| e.to_string())?;
            for _ in 0..200 {
                let u = sample_utility_with(&actions, &prior, &mut r);
                ensure(!top.value(&u).approx_lt(&w.value(&u)), || format!("baseline {b}: SPD structure beats the ordered painting"))?;
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} exact comparisons, 0 violations"))
}

fn c9_theorem4() -> Outcome {
    let f = example1_baseline();
    let report = theorem4_condition(&f);
    ensure(report.holds, || "condition fails".into())?;
    let row = report.rows.iter().find(|r| r.state == 1).ok_or("no middle-state row")?;
    ensure(row.margin() == rat(0, 1), || format!("slack {}", row.margin()))?;
    let split = BaselineStructure::from_rows(
        ["d", "s1", "s2", "i"].iter().map(|s| s.to_string()).collect(),
        vec![tenths(&[6, 1, 1, 2]), tenths(&[3, 2, 1, 4]), tenths(&[1, 1, 1, 7])],
    )
    .map_err(|e| e.to_string())?;
    for (name, f) in [("example", f), ("split", split)] {
        let h = to_joint(&theorem4_construct(&f).map_err(|e| format!("{name}: {e}"))?);
        let g = pd_greatest(&f);
        ensure(check_secrecy(&h).holds, || format!("{name}: secrecy fails"))?;
        ensure(certified(&h, &g, false) && certified(&g, &h, false), || format!("{name}: not equivalent to the PD-greatest structure"))?;
    }
    Ok("slack 0 at the middle state; both variants equivalent both ways and secret".into())
}

fn c10_triptych() -> Outcome {
    let (out, rec) = swap_improve_classified(&figure4_original(), &LOCAL_CLASSES).map_err(|e| e.to_string())?;
    ensure(out == figure4_new() && rec.len() == 1 && rec[0].kind == SwapKind::BlackwellGarble, || "garbling swap".into())?;
    let (out, rec) = swap_improve_classified(&figure5_original(), &LOCAL_CLASSES).map_err(|e| e.to_string())?;
    ensure(out == figure5_new() && rec.len() == 1 && rec[0].kind == SwapKind::SingleCrossingDominance, || "single-crossing swap".into())?;
    let (new, orig) = (to_joint(&figure5_new()), to_joint(&figure5_original()));
    ensure(!certified(&new, &orig, false) && !certified(&orig, &new, false), || "pair is Blackwell comparable".into())?;
    let prior: Prior = Prior::uniform(3);
    let actions = ActionSpace::symmetric(1, 1).unwrap();
    let checked = match dominance_over_u_evidence(&new, &orig, &prior, &actions, 1000, 10).map_err(|e| e.to_string())? {
        Verdict::NoCounterexampleFound { utilities_checked } => utilities_checked,
        other => return Err(format!("evidence verdict {other:?}")),
    };
    let w = counterexample_check(&prior).map_err(|e| e.to_string())?;
    let vo = value_of_information(&w.original, &w.utility, &prior).map_err(|e| e.to_string())?;
    let vn = value_of_information(&w.new, &w.utility, &prior).map_err(|e| e.to_string())?;
    ensure(vn < vo, || format!("witness values {vo} vs {vn}"))?;
    Ok(format!("swap kinds reproduced; {checked} draws without counterexample; witness {vo} > {vn}"))
}

fn c11_binary_greatest() -> Outcome {
    let mut r = rng(11);
    let mut total = 0;
    for b in 0..100 {
        let m = r.gen_range(2..=4);
        let f: BaselineStructure = random_baseline(&mut r, 2, m);
        let psi = binary_state_greatest(&f).map_err(|e| e.to_string())?;
        let tot: Vec<Rational> = f.columns().iter().map(|c| c[0].clone() + c[1].clone()).collect();
        let heaviest = tot.iter().max().cloned().unwrap();
        let expected = if heaviest > rat(1, 1) { heaviest - rat(1, 1) } else { rat(0, 1) };
        ensure(pooled_mass(&psi) == expected, || format!("baseline {b}: pooled {} vs {expected}", pooled_mass(&psi)))?;
        let top = to_joint(&psi);
        for _ in 0..20 {
            let ny = r.gen_range(1..=3);
            let h = random_secrecy(&mut r, &f, ny);
            ensure(certified(&top, &h, false), || format!("baseline {b}: no certificate"))?;
            total += 1;
        }
    }
    Ok(format!("{total}/{total} certified; pooled mass exact on 100 baselines"))
}

fn c12_simulation() -> Outcome {
    const ROUNDS: usize = 100_000;
    let psi = covert_core::fixtures::figure1_psi();
    let (h, f) = (to_joint(&psi), example1_baseline());
    let prior: Prior = Prior::uniform(3);
    let actions = ActionSpace::symmetric(2, 2).unwrap();
    let mut r = rng(12);
    let utilities: Vec<_> = (0..5).map(|_| sample_utility_with(&actions, &prior, &mut r)).collect();
    let allowed: Vec<_> = (0..h.nx()).map(|x| rationalizable_actions(f.column(x), &actions).unwrap()).collect();
    let choice: Vec<Vec<Option<Vec<usize>>>> = (0..h.nx())
        .map(|x| {
            (0..h.ny())
                .map(|y| bayes(h.column(x, y), prior.mass()).map(|w| utilities.iter().map(|u| u.best_action(&w)).collect()))
                .collect()
        })
        .collect();
    let sampler = RoundSampler::new(&h, prior.mass()).map_err(|e| e.to_string())?;
    let mut counts = vec![vec![0usize; h.ny()]; 3];
    for _ in 0..ROUNDS {
        let (k, x, y) = sampler.draw(&mut r);
        counts[k][y] += 1;
        let acts = choice[x][y].as_ref().ok_or("drew a zero-probability pair")?;
        ensure(acts.iter().all(|&a| allowed[x].contains(a)), || format!("action outside the baseline set after ({x}, {y})"))?;
    }
    let mut worst: f64 = 0.0;
    for (k, row) in counts.iter().enumerate() {
        let nk: usize = row.iter().sum();
        for (y, &c) in row.iter().enumerate() {
            let p = psi.cells().cells[y].length.to_f64();
            let sd = (nk as f64 * p * (1.0 - p)).sqrt();
            let z = (c as f64 - nk as f64 * p).abs() / sd;
            ensure(z <= SIGMA_BOUND, || format!("state {k}, cell {y}: {z:.2} sigma"))?;
            worst = worst.max(z);
        }
    }
    Ok(format!("{ROUNDS} rounds, max deviation {worst:.2} sigma, all actions contained"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 12] = [
        ("PD-greatest structure reproduces the example1 table", c1_pd_greatest_table, DEFAULT_BUDGET),
        ("direction-ordered painting of example1", c2_figure1_cells, DEFAULT_BUDGET),
        ("deniability check matches the containment oracle", c3_theorem1_oracle, DEFAULT_BUDGET),
        ("closed-form rationalizable sets match the LP oracle", c4_lemma2_oracle, LEMMA2_BUDGET),
        ("PD-greatest structure dominates random PD structures", c5_pd_greatest_dominates, DEFAULT_BUDGET),
        ("secrecy and SPD lifts dominate their inputs", c6_lifts_dominate, DEFAULT_BUDGET),
        ("full revelation test matches the injective-map LP", c7_full_revelation, DEFAULT_BUDGET),
        ("direction-ordered painting beats random SPD structures", c8_direction_ordered_dominates, DOMINANCE_BUDGET),
        ("middle-band condition and construction", c9_theorem4, DEFAULT_BUDGET),
        ("swap kinds, incomparable pair and counterexample", c10_triptych, DEFAULT_BUDGET),
        ("two-state greatest secret structure", c11_binary_greatest, DEFAULT_BUDGET),
        ("simulated frequencies and receiver actions", c12_simulation, SIMULATION_BUDGET),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|d| {
            ensure(elapsed <= budget, || format!("took {:.1}s, budget {}s", elapsed.as_secs_f64(), budget.as_secs()))?;
            Ok(d)
        });
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(e) => {
                failed += 1;
                ("FAIL", e)
            }
        };
        println!("[{tag}] criterion {}: {name}: {detail} ({:.2}s)", i + 1, elapsed.as_secs_f64());
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
