//! The six subcommands.

use std::path::Path;
use std::time::Instant;

use covert_core::deniability::{check_plausible_deniability, is_pd_greatest, pd_greatest};
use covert_core::dominance::{blackwell_dominates, dominance_over_u_evidence_with, Verdict};
use covert_core::frontier::{
    direction_ordered, direction_ordered_bounds, spd_lift, theorem4_condition, theorem4_construct, Theorem4Report,
};
use covert_core::model::bayes;
use covert_core::rationalize::rationalizable_actions;
use covert_core::sampling::RoundSampler;
use covert_core::signalrep::{
    binary_state_greatest, check_secrecy, heaviest_message, pooled_mass, secrecy_lift, to_joint,
};
use covert_core::utility::{sample_utility, validate_utility};
use covert_core::{classify_messages, JointStructure, Rational, Scalar, SignalRepresentation, UtilityMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::problem::{Problem, ProblemFile};
use crate::render::render_svg;
use crate::report::{digest, garbling, r, rs, Report};
use crate::{Args, CliError, Command, Mode, EXIT_CHECK_FAILED, EXIT_OK, EXIT_PRECONDITION, EXIT_USAGE};

/// What the process prints and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Loaded {
    canonical: String,
    problem: Problem,
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    let file = ProblemFile::read(path)?;
    let canonical = file.to_canonical_json();
    let problem = file.parse()?;
    Ok(Loaded { canonical, problem })
}

struct Done {
    code: i32,
    results: Value,
    /// Printed instead of the report when set.
    raw: Option<String>,
}

fn done(code: i32, results: Value) -> Result<Done, CliError> {
    Ok(Done { code, results, raw: None })
}

pub fn execute(args: &Args) -> Output {
    let start = Instant::now();
    let expected = if args.command == Command::Compare { 2 } else { 1 };
    if args.inputs.len() != expected {
        let msg = format!("{:?} takes {expected} --input file(s), got {}\n", args.command, args.inputs.len());
        return Output { code: EXIT_USAGE, stdout: String::new(), stderr: msg.to_lowercase() };
    }
    let loaded = match args.inputs.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>() {
        Ok(l) => l,
        Err(e) => return Output { code: e.exit_code(), stdout: String::new(), stderr: format!("{e}\n") },
    };
    let result = match args.command {
        Command::Classify => classify(&loaded[0].problem),
        Command::Check => check(&loaded[0].problem, args.target.as_deref()),
        Command::Construct => construct(&loaded[0].problem, args.target.as_deref(), args.out.as_deref()),
        Command::Compare => compare(&loaded[0].problem, &loaded[1].problem, args),
        Command::Render => render(&loaded[0].problem, args.out.as_deref()),
        Command::Simulate => simulate(&loaded[0].problem, args.rounds, args.seed),
    };
    match result {
        Ok(d) => {
            if let Some(raw) = d.raw {
                return Output { code: d.code, stdout: raw, stderr: String::new() };
            }
            let report = Report {
                command: format!("{:?}", args.command).to_lowercase(),
                inputs_digest: digest(loaded.iter().map(|l| l.canonical.as_str())),
                results: d.results,
                elapsed_ms: (!args.no_timing).then(|| start.elapsed().as_millis() as u64),
            };
            Output { code: d.code, stdout: report.to_json(), stderr: String::new() }
        }
        Err(e) => Output { code: e.exit_code(), stdout: String::new(), stderr: format!("{e}\n") },
    }
}

fn names(labels: &[String], idx: &[usize]) -> Value {
    json!(idx.iter().map(|&i| labels[i].clone()).collect::<Vec<_>>())
}

fn classification(p: &Problem) -> Value {
    let f = &p.baseline;
    let c = classify_messages(f);
    let m = f.messages();
    json!({
        "D": names(m, &c.d()),
        "I": names(m, &c.i()),
        "S": names(m, &c.s()),
        "messages": (0..f.num_messages()).map(|x| json!({
            "message": m[x],
            "class": c.class_of(x).tag(),
            "likelihood": rs(f.column(x)),
        })).collect::<Vec<_>>(),
    })
}

fn classify(p: &Problem) -> Result<Done, CliError> {
    done(EXIT_OK, json!({ "classification": classification(p) }))
}

fn structure(p: &Problem) -> Result<JointStructure, CliError> {
    p.structure().ok_or_else(|| CliError::Usage("the file has neither a joint structure nor a representation".into()))
}

fn secrecy_json(h: &JointStructure, states: &[String]) -> (bool, Value) {
    let rep = check_secrecy(h);
    let marginals: Vec<Value> = (0..h.ny())
        .map(|y| json!({ "y": h.y_messages()[y], "by_state": rs(&h.y_marginal(y)) }))
        .collect();
    let violations: Vec<Value> = rep
        .violations
        .iter()
        .map(|&(y, a, b)| json!({ "y": h.y_messages()[y], "states": [states[a], states[b]] }))
        .collect();
    (rep.holds, json!({ "holds": rep.holds, "y_marginals": marginals, "violations": violations }))
}

fn pd_json(h: &JointStructure, p: &Problem) -> Result<(bool, Value), CliError> {
    let rep = check_plausible_deniability(h, &p.baseline)?;
    let violation = rep.violation.map(|v| {
        json!({
            "x": h.x_messages()[v.x],
            "y": h.y_messages()[v.y],
            "state": p.states[v.state],
            "column": rs(h.column(v.x, v.y)),
        })
    });
    Ok((rep.holds, json!({ "holds": rep.holds, "violation": violation })))
}

fn check(p: &Problem, target: Option<&str>) -> Result<Done, CliError> {
    let h = structure(p)?;
    let mut out = serde_json::Map::new();
    let mut ok = true;
    let which = target.unwrap_or("spd");
    if !matches!(which, "secrecy" | "pd" | "spd") {
        return Err(CliError::Usage(format!("check target must be secrecy, pd or spd, not `{which}`")));
    }
    if which != "pd" {
        let (holds, v) = secrecy_json(&h, &p.states);
        ok &= holds;
        out.insert("secrecy".into(), v);
    }
    if which != "secrecy" {
        let (holds, v) = pd_json(&h, p)?;
        ok &= holds;
        out.insert("plausible_deniability".into(), v);
    }
    out.insert("passed".into(), json!(ok));
    done(if ok { EXIT_OK } else { EXIT_CHECK_FAILED }, Value::Object(out))
}

fn cells_json(psi: &SignalRepresentation) -> Value {
    json!(psi
        .cells()
        .cells
        .iter()
        .enumerate()
        .map(|(j, c)| json!({ "y": format!("y{}", j + 1), "assignment": c.label, "length": r(&c.length) }))
        .collect::<Vec<_>>())
}

fn slack_json(rep: &Theorem4Report<Rational>, states: &[String]) -> Value {
    json!({
        "holds": rep.holds,
        "rows": rep.rows.iter().map(|row| json!({
            "state": states[row.state],
            "s_mass": r(&row.s_mass),
            "d_slack": r(&row.d_slack),
            "i_slack": r(&row.i_slack),
            "margin": r(&row.margin()),
        })).collect::<Vec<_>>(),
    })
}

fn certificate(from: &JointStructure, to: &JointStructure, label: &str, x_preserving: bool) -> Result<Value, CliError> {
    let g = blackwell_dominates(from, to, x_preserving)?;
    Ok(json!({ "claim": label, "certified": g.is_some(), "garbling": g.as_ref().map(garbling) }))
}

fn construct(p: &Problem, target: Option<&str>, out: Option<&Path>) -> Result<Done, CliError> {
    let target = target.ok_or_else(|| CliError::Usage("construct needs --target".into()))?;
    let f = &p.baseline;
    let mut results = serde_json::Map::new();
    results.insert("target".into(), json!(target));
    let mut certificates = Vec::new();
    let (joint, psi): (Option<JointStructure>, Option<SignalRepresentation>) = match target {
        "pd-greatest" => {
            let h = pd_greatest(f);
            results.insert("is_pd_greatest".into(), json!(is_pd_greatest(&h, f)?));
            (Some(h), None)
        }
        "direction-ordered" => {
            let psi = direction_ordered(f)?;
            let b = direction_ordered_bounds(f);
            results.insert("bounds".into(), json!({ "t1": rs(&b.t1), "t2": rs(&b.t2) }));
            (None, Some(psi))
        }
        "theorem4" => {
            let rep = theorem4_condition(f);
            results.insert("condition".into(), slack_json(&rep, &p.states));
            if !rep.holds {
                results.insert("error".into(), json!("sparse-middle condition fails"));
                return done(EXIT_PRECONDITION, Value::Object(results));
            }
            let psi = theorem4_construct(f)?;
            let h = to_joint(&psi);
            let g = pd_greatest(f);
            certificates.push(certificate(&h, &g, "constructed dominates pd-greatest", false)?);
            certificates.push(certificate(&g, &h, "pd-greatest dominates constructed", false)?);
            (None, Some(psi))
        }
        "binary-greatest" => {
            let psi = binary_state_greatest(f)?;
            results.insert("heaviest_message".into(), json!(f.messages()[heaviest_message(f)]));
            results.insert("pooled_mass".into(), r(&pooled_mass(&psi)));
            (None, Some(psi))
        }
        "spd-lift" | "secrecy-lift" => {
            let h = structure(p)?;
            let psi = if target == "spd-lift" { spd_lift(&h)? } else { secrecy_lift(&h)? };
            certificates.push(certificate(&to_joint(&psi), &h, "lift dominates input", true)?);
            (None, Some(psi))
        }
        other => return Err(CliError::Usage(format!("unknown construct target `{other}`"))),
    };
    let h = joint.clone().or_else(|| psi.as_ref().map(to_joint)).expect("one of the two is set");
    let (_, sec_v) = secrecy_json(&h, &p.states);
    let (_, pd_v) = pd_json(&h, p)?;
    results.insert("checks".into(), json!({ "secrecy": sec_v, "plausible_deniability": pd_v }));
    if let Some(psi) = &psi {
        results.insert("cells".into(), cells_json(psi));
    }
    if !certificates.is_empty() {
        results.insert("certificates".into(), Value::Array(certificates));
    }
    let file = Problem { joint, representation: psi, ..p.clone() }.to_file();
    let text = file.to_canonical_json();
    if let Some(path) = out {
        std::fs::write(path, &text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        results.insert("output".into(), json!(path.display().to_string()));
    }
    results.insert("structure".into(), serde_json::to_value(&file).expect("plain data"));
    done(EXIT_OK, Value::Object(results))
}

fn verdict_json(v: &Verdict<Rational>) -> Value {
    match v {
        Verdict::CertifiedByGarbling(g) => json!({ "verdict": "certified_by_garbling", "garbling": garbling(g) }),
        Verdict::NoCounterexampleFound { utilities_checked } => {
            json!({ "verdict": "no_counterexample_found", "utilities_checked": utilities_checked })
        }
        Verdict::Counterexample(u) => json!({
            "verdict": "counterexample",
            "utility": u.values().iter().map(|row| rs(row)).collect::<Vec<_>>(),
        }),
    }
}

fn compare(a: &Problem, b: &Problem, args: &Args) -> Result<Done, CliError> {
    let (ha, hb) = (structure(a)?, structure(b)?);
    match args.mode {
        Mode::Blackwell => {
            let ab = certificate(&ha, &hb, "A dominates B", false)?;
            let ba = certificate(&hb, &ha, "B dominates A", false)?;
            let ok = ab["certified"] == json!(true);
            let relation = match (ok, ba["certified"] == json!(true)) {
                (true, true) => "equivalent",
                (true, false) => "A strictly dominates B",
                (false, true) => "B strictly dominates A",
                (false, false) => "incomparable",
            };
            done(
                if ok { EXIT_OK } else { EXIT_CHECK_FAILED },
                json!({ "mode": "blackwell", "relation": relation, "a_over_b": ab, "b_over_a": ba }),
            )
        }
        Mode::Evidence => {
            let prior = a.prior()?;
            let extra: Vec<UtilityMatrix> = a.utilities.iter().chain(&b.utilities).cloned().collect();
            for u in &extra {
                if !validate_utility(u, prior).valid {
                    return Err(CliError::Precondition("a file utility is not single-crossing with a unique default".into()));
                }
            }
            let ab = dominance_over_u_evidence_with(&ha, &hb, prior, &a.actions, args.samples, args.seed, &extra)?;
            let ba = dominance_over_u_evidence_with(&hb, &ha, prior, &a.actions, args.samples, args.seed, &extra)?;
            let ok = !matches!(ab, Verdict::Counterexample(_));
            done(
                if ok { EXIT_OK } else { EXIT_CHECK_FAILED },
                json!({
                    "mode": "evidence",
                    "samples": args.samples,
                    "seed": args.seed,
                    "a_over_b": verdict_json(&ab),
                    "b_over_a": verdict_json(&ba),
                }),
            )
        }
    }
}

fn render(p: &Problem, out: Option<&Path>) -> Result<Done, CliError> {
    let psi = p
        .representation
        .as_ref()
        .ok_or_else(|| CliError::Usage("missing representation: the file has no `representation` section".into()))?;
    let svg = render_svg(psi, &p.states);
    match out {
        Some(path) => {
            std::fs::write(path, &svg).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            done(
                EXIT_OK,
                json!({
                    "output": path.display().to_string(),
                    "states": psi.num_states(),
                    "cells": psi.cells().cells.len(),
                }),
            )
        }
        None => Ok(Done { code: EXIT_OK, results: Value::Null, raw: Some(svg) }),
    }
}

fn simulate(p: &Problem, rounds: usize, seed: u64) -> Result<Done, CliError> {
    let h = structure(p)?;
    let prior = p.prior()?;
    let (n, nx, ny) = (h.num_states(), h.nx(), h.ny());
    let (u, source) = match p.utilities.first() {
        Some(u) => (u.clone(), "file"),
        None => (sample_utility(&p.actions, prior, seed), "sampled"),
    };
    if !validate_utility(&u, prior).valid {
        return Err(CliError::Precondition("the utility is not single-crossing with a unique default".into()));
    }
    let mut best = vec![None; nx * ny];
    let mut allowed = vec![Vec::new(); nx];
    for x in 0..nx {
        if p.baseline.column(x).iter().any(|v| v.is_pos()) {
            allowed[x] = rationalizable_actions(p.baseline.column(x), &p.actions)?.actions;
        }
        for y in 0..ny {
            best[x * ny + y] = bayes(h.column(x, y), prior.mass()).map(|post| u.best_action(&post));
        }
    }
    let sampler = RoundSampler::new(&h, prior.mass())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![vec![0u64; ny]; n];
    let mut actions = vec![0u64; p.actions.len()];
    let mut outside = 0u64;
    for _ in 0..rounds {
        let (k, x, y) = sampler.draw(&mut rng);
        counts[k][y] += 1;
        let a = best[x * ny + y].expect("drawn pairs have positive probability");
        actions[a] += 1;
        if !allowed[x].contains(&a) {
            outside += 1;
        }
    }
    let pooled: Vec<f64> = (0..ny)
        .map(|y| (0..n).map(|k| prior.mass()[k].to_f64() * h.y_marginal(y)[k].to_f64()).sum())
        .collect();
    let mut max_z: Option<f64> = None;
    let mut chi2 = 0.0;
    let mut per_state = Vec::new();
    for k in 0..n {
        let total: u64 = counts[k].iter().sum();
        let mut ys = Vec::new();
        for y in 0..ny {
            let py = pooled[y];
            let freq = if total > 0 { counts[k][y] as f64 / total as f64 } else { 0.0 };
            let sd = (py * (1.0 - py) / total.max(1) as f64).sqrt();
            let z = if total == 0 {
                None
            } else if sd > 0.0 {
                Some((freq - py).abs() / sd)
            } else {
                Some(if (freq - py).abs() > 0.0 { f64::INFINITY } else { 0.0 })
            };
            if let Some(z) = z {
                max_z = Some(max_z.map_or(z, |m: f64| m.max(z)));
            }
            if total > 0 && py > 0.0 {
                let e = total as f64 * py;
                chi2 += (counts[k][y] as f64 - e).powi(2) / e;
            }
            ys.push(json!({
                "y": h.y_messages()[y],
                "count": counts[k][y],
                "frequency": freq,
                "expected": py,
                "bound_4sigma": 4.0 * sd,
                "z": z.map(|z| if z.is_finite() { json!(z) } else { json!("inf") }),
            }));
        }
        per_state.push(json!({ "state": p.states[k], "rounds": total, "y": ys }));
    }
    let within = max_z.map(|z| z <= 4.0);
    let support = pooled.iter().filter(|&&v| v > 0.0).count();
    let contained = outside == 0;
    done(
        if contained && within != Some(false) { EXIT_OK } else { EXIT_CHECK_FAILED },
        json!({
            "rounds": rounds,
            "seed": seed,
            "secrecy": {
                "per_state": per_state,
                "max_abs_z": max_z.map(|z| if z.is_finite() { json!(z) } else { json!("inf") }),
                "within_4sigma": within,
                "chi_square": if rounds > 0 { json!(chi2) } else { Value::Null },
                "degrees_of_freedom": (n - 1) * support.saturating_sub(1),
            },
            "actions": {
                "utility": source,
                "counts": p.actions.actions().iter().zip(&actions).map(|(l, c)| json!({ "action": l, "count": c })).collect::<Vec<_>>(),
                "outside_baseline_rationalizable": outside,
                "all_contained": contained,
            },
        }),
    )
}
