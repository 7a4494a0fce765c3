//! Problem files: JSON (or TOML) documents with exact rational strings.

use std::path::Path;

use covert_core::scalar::{format_rational, parse_rational};
use covert_core::signalrep::Interval;
use covert_core::{ActionSpace, BaselineStructure, JointStructure, Prior, Rational, SignalRepresentation, UtilityMatrix};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub states: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<ActionsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<BaselineSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint: Option<JointSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<RepresentationSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub utilities: Vec<UtilitySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionsSpec {
    pub labels: Vec<String>,
    pub default: String,
}

/// `rows[state][x]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineSpec {
    pub messages: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// `rows[state][x][y]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointSpec {
    pub x_messages: Vec<String>,
    pub y_messages: Vec<String>,
    pub rows: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationSpec {
    pub messages: Vec<String>,
    pub rows: Vec<Vec<Piece>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    pub message: String,
    pub length: String,
}

/// `rows[action][state]`, actions in the file's action order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilitySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub rows: Vec<Vec<String>>,
}

/// A parsed problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub states: Vec<String>,
    /// Absent for single-state files.
    pub prior: Option<Prior>,
    pub actions: ActionSpace,
    pub baseline: BaselineStructure,
    pub joint: Option<JointStructure>,
    pub representation: Option<SignalRepresentation>,
    pub utilities: Vec<UtilityMatrix>,
}

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

fn num(s: &str, at: &str) -> Result<Rational, CliError> {
    parse_rational(s).ok_or_else(|| parse_err(format!("{at}: `{s}` is not an exact rational (use p/q)")))
}

fn nums(v: &[String], at: &str) -> Result<Vec<Rational>, CliError> {
    v.iter().map(|s| num(s, at)).collect()
}

fn strs(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn expect_len(found: usize, expected: usize, at: &str) -> Result<(), CliError> {
    if found != expected {
        return Err(parse_err(format!("{at}: expected {expected} entries, found {found}")));
    }
    Ok(())
}

fn core(e: covert_core::Error) -> CliError {
    CliError::Parse(e.to_string())
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| parse_err(e.to_string()))
    }

    /// Reads JSON, or TOML when the extension is `.toml`.
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml(&text),
            _ => Self::from_json(&text),
        }
    }

    /// Canonical JSON: fixed field order, two-space indent, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn parse(&self) -> Result<Problem, CliError> {
        let n = self.states.len();
        if n == 0 {
            return Err(parse_err("states: at least one state required"));
        }
        let prior = match &self.prior {
            Some(p) => {
                expect_len(p.len(), n, "prior")?;
                Some(Prior::new(self.states.clone(), nums(p, "prior")?).map_err(core)?)
            }
            None if n >= 2 => {
                let mass = vec![Rational::new(1.into(), (n as i64).into()); n];
                Some(Prior::new(self.states.clone(), mass).map_err(core)?)
            }
            None => None,
        };
        let actions = match &self.actions {
            Some(a) => {
                let d = a.labels.iter().position(|l| *l == a.default).ok_or_else(|| {
                    parse_err(format!("actions: default `{}` is not among the labels", a.default))
                })?;
                ActionSpace::new(a.labels.clone(), d).map_err(core)?
            }
            None => ActionSpace::symmetric(1, 1).expect("three actions"),
        };
        let joint = self.joint.as_ref().map(|j| parse_joint(j, n)).transpose()?;
        let representation = self.representation.as_ref().map(|r| parse_representation(r, n)).transpose()?;
        let baseline = match (&self.baseline, &joint, &representation) {
            (Some(b), _, _) => parse_baseline(b, n)?,
            (None, Some(j), _) => j.baseline(),
            (None, None, Some(r)) => r.baseline().map_err(core)?,
            _ => return Err(parse_err("one of baseline, joint or representation is required")),
        };
        if let Some(j) = &joint {
            if j.x_messages() != baseline.messages() {
                return Err(parse_err("joint.x_messages differ from baseline.messages"));
            }
            j.check_consistent(&baseline).map_err(core)?;
        }
        if let Some(r) = &representation {
            if r.messages() != baseline.messages() || !r.represents(&baseline) {
                return Err(parse_err("representation does not paint the baseline"));
            }
        }
        let utilities = self
            .utilities
            .iter()
            .enumerate()
            .map(|(i, u)| {
                let at = format!("utilities[{i}]");
                expect_len(u.rows.len(), actions.len(), &at)?;
                let rows = u
                    .rows
                    .iter()
                    .map(|r| {
                        expect_len(r.len(), n, &at)?;
                        nums(r, &at)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                UtilityMatrix::new(actions.clone(), rows).map_err(core)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Problem { states: self.states.clone(), prior, actions, baseline, joint, representation, utilities })
    }
}

fn parse_baseline(b: &BaselineSpec, n: usize) -> Result<BaselineStructure, CliError> {
    expect_len(b.rows.len(), n, "baseline.rows")?;
    let rows = b
        .rows
        .iter()
        .map(|r| {
            expect_len(r.len(), b.messages.len(), "baseline.rows")?;
            nums(r, "baseline.rows")
        })
        .collect::<Result<Vec<_>, _>>()?;
    BaselineStructure::from_rows(b.messages.clone(), rows).map_err(core)
}

fn parse_joint(j: &JointSpec, n: usize) -> Result<JointStructure, CliError> {
    expect_len(j.rows.len(), n, "joint.rows")?;
    let (nx, ny) = (j.x_messages.len(), j.y_messages.len());
    let mut cols = vec![vec![Rational::new(0.into(), 1.into()); n]; nx * ny];
    for (k, state) in j.rows.iter().enumerate() {
        expect_len(state.len(), nx, "joint.rows")?;
        for (x, row) in state.iter().enumerate() {
            expect_len(row.len(), ny, "joint.rows")?;
            for (y, v) in row.iter().enumerate() {
                cols[x * ny + y][k] = num(v, "joint.rows")?;
            }
        }
    }
    JointStructure::from_flat(j.x_messages.clone(), j.y_messages.clone(), n, cols).map_err(core)
}

fn parse_representation(r: &RepresentationSpec, n: usize) -> Result<SignalRepresentation, CliError> {
    expect_len(r.rows.len(), n, "representation.rows")?;
    let mut rows = Vec::with_capacity(n);
    for state in &r.rows {
        let mut at = Rational::new(0.into(), 1.into());
        let mut row = Vec::with_capacity(state.len());
        for p in state {
            let m = r
                .messages
                .iter()
                .position(|x| *x == p.message)
                .ok_or_else(|| parse_err(format!("representation: unknown message `{}`", p.message)))?;
            let end = at.clone() + num(&p.length, "representation.rows")?;
            row.push(Interval { start: at, end: end.clone(), message: m });
            at = end;
        }
        rows.push(row);
    }
    SignalRepresentation::new(r.messages.clone(), rows).map_err(core)
}

pub fn baseline_spec(f: &BaselineStructure) -> BaselineSpec {
    BaselineSpec {
        messages: f.messages().to_vec(),
        rows: (0..f.num_states()).map(|k| (0..f.num_messages()).map(|x| format_rational(f.get(x, k))).collect()).collect(),
    }
}

pub fn joint_spec(h: &JointStructure) -> JointSpec {
    JointSpec {
        x_messages: h.x_messages().to_vec(),
        y_messages: h.y_messages().to_vec(),
        rows: (0..h.num_states())
            .map(|k| (0..h.nx()).map(|x| (0..h.ny()).map(|y| format_rational(h.get(x, y, k))).collect()).collect())
            .collect(),
    }
}

pub fn representation_spec(psi: &SignalRepresentation) -> RepresentationSpec {
    RepresentationSpec {
        messages: psi.messages().to_vec(),
        rows: psi
            .rows()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|iv| Piece { message: psi.messages()[iv.message].clone(), length: format_rational(&iv.len()) })
                    .collect()
            })
            .collect(),
    }
}

pub fn utility_spec(u: &UtilityMatrix, name: Option<String>) -> UtilitySpec {
    UtilitySpec { name, rows: u.values().iter().map(|r| strs(r)).collect() }
}

impl Problem {
    /// File form of this problem; omitted prior and actions stay omitted.
    pub fn to_file(&self) -> ProblemFile {
        ProblemFile {
            states: self.states.clone(),
            prior: self.prior.as_ref().map(|p| strs(p.mass())),
            actions: Some(ActionsSpec {
                labels: self.actions.actions().to_vec(),
                default: self.actions.label(self.actions.default_index()).to_string(),
            }),
            baseline: Some(baseline_spec(&self.baseline)),
            joint: self.joint.as_ref().map(joint_spec),
            representation: self.representation.as_ref().map(representation_spec),
            utilities: self.utilities.iter().map(|u| utility_spec(u, None)).collect(),
        }
    }

    pub fn prior(&self) -> Result<&Prior, CliError> {
        self.prior.as_ref().ok_or_else(|| CliError::Precondition("a prior needs at least two states".into()))
    }

    /// The joint structure under study: the explicit one, else the painting's.
    pub fn structure(&self) -> Option<JointStructure> {
        self.joint.clone().or_else(|| self.representation.as_ref().map(covert_core::signalrep::to_joint))
    }
}
