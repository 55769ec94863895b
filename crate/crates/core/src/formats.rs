//! JSON formats for graphs, matrices, schedules and diagonal couplings.
//!
//! * graph: `{"d": 8, "edges": [[0,5], …], "simultaneous_xy": true, "direct_z": false}`;
//!   the two capability flags are optional and default to `true`/`false`.
//! * unitary: `{"dim": n, "re": [[…], …], "im": [[…], …]}`, row-major; two-qudit
//!   matrices use the index `d·j + k` for `|j,k>`.
//! * schedule: `{"n_qudits": 1|2, "d": d, "pulses": [{"gen": "x|y|z|xy|int",
//!   "qudit": 0|1, "pair": [j,k], "axis_phi": φ, "angle": θ}, …]}`; `axis_phi`
//!   appears only on `xy` pulses and `int` pulses carry only `gen` and `angle`.
//! * omega: `{"omega": [[…], …]}` or a bare square array.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::SynthError;
use crate::graph::{Capabilities, CouplingGraph};
use crate::linalg::{Generator, Pulse, StatePair, Unitary};
use crate::multi::DiagonalCoupling;
use crate::schedule::{Schedule, System};

/// Deviation from unitarity tolerated when loading a matrix.
pub const LOAD_UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Synth(#[from] SynthError),
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Field {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    d: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default = "default_true")]
    simultaneous_xy: bool,
    #[serde(default)]
    direct_z: bool,
}

fn default_true() -> bool {
    true
}

pub fn graph_from_json(text: &str) -> Result<CouplingGraph, FormatError> {
    let f: GraphFile = serde_json::from_str(text)?;
    let caps = Capabilities::new(f.simultaneous_xy, f.direct_z);
    CouplingGraph::new(f.d, f.edges.iter().map(|e| (e[0], e[1])), caps)
        .map_err(|e| field_err("edges", e.to_string()))
}

pub fn graph_to_json(g: &CouplingGraph) -> String {
    let caps = g.capabilities();
    let f = GraphFile {
        d: g.d(),
        edges: g.edges().map(|(a, b)| [a, b]).collect(),
        simultaneous_xy: caps.simultaneous_xy,
        direct_z: caps.direct_z,
    };
    serde_json::to_string_pretty(&f).expect("graph serializes")
}

#[derive(Serialize, Deserialize)]
struct UnitaryFile {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

fn check_rows(field: &str, rows: &[Vec<f64>], dim: usize) -> Result<(), FormatError> {
    if rows.len() != dim {
        return Err(field_err(
            field,
            format!("expected {dim} rows, found {}", rows.len()),
        ));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != dim {
            return Err(field_err(
                format!("{field}[{i}]"),
                format!("expected {dim} entries, found {}", r.len()),
            ));
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(field_err(format!("{field}[{i}]"), "non-finite entry"));
        }
    }
    Ok(())
}

pub fn unitary_from_json(text: &str) -> Result<Unitary, FormatError> {
    let f: UnitaryFile = serde_json::from_str(text)?;
    if f.dim == 0 {
        return Err(field_err("dim", "must be positive"));
    }
    check_rows("re", &f.re, f.dim)?;
    check_rows("im", &f.im, f.dim)?;
    let m = DMatrix::from_fn(f.dim, f.dim, |r, c| Complex64::new(f.re[r][c], f.im[r][c]));
    Unitary::with_tolerance(m, LOAD_UNITARY_TOL).map_err(|e| field_err("re/im", e.to_string()))
}

pub fn unitary_to_value(u: &Unitary) -> serde_json::Value {
    let n = u.dim();
    let rows = |f: fn(Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..n).map(|r| (0..n).map(|c| f(u.get(r, c))).collect()).collect()
    };
    serde_json::to_value(UnitaryFile {
        dim: n,
        re: rows(|z| z.re),
        im: rows(|z| z.im),
    })
    .expect("matrix serializes")
}

pub fn unitary_to_json(u: &Unitary) -> String {
    serde_json::to_string_pretty(&unitary_to_value(u)).expect("matrix serializes")
}

#[derive(Serialize, Deserialize)]
struct PulseRecord {
    gen: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    qudit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pair: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axis_phi: Option<f64>,
    angle: f64,
}

#[derive(Serialize, Deserialize)]
struct ScheduleFile {
    n_qudits: usize,
    d: usize,
    pulses: Vec<PulseRecord>,
}

fn record(p: &Pulse, system: System) -> PulseRecord {
    let pair = p.pair().map(|StatePair(j, k)| [j, k]);
    let axis_phi = match p.generator {
        Generator::Xy(_, phi) => Some(phi),
        _ => None,
    };
    PulseRecord {
        gen: p.tag().to_string(),
        qudit: if p.is_int() {
            None
        } else {
            Some(if system.n_qudits == 1 { 0 } else { p.qudit })
        },
        pair,
        axis_phi,
        angle: p.angle,
    }
}

fn pulse(i: usize, r: &PulseRecord) -> Result<Pulse, FormatError> {
    let field = |name: &str| format!("pulses[{i}].{name}");
    let pair = || {
        r.pair
            .map(|[j, k]| StatePair(j, k))
            .ok_or_else(|| field_err(field("pair"), format!("required for `{}` pulses", r.gen)))
    };
    let p = match r.gen.as_str() {
        "x" => Pulse::x(pair()?, r.angle),
        "y" => Pulse::y(pair()?, r.angle),
        "z" => Pulse::z(pair()?, r.angle),
        "xy" => {
            let phi = r
                .axis_phi
                .ok_or_else(|| field_err(field("axis_phi"), "required for `xy` pulses"))?;
            Pulse::xy(pair()?, phi, r.angle)
        }
        "int" => return Ok(Pulse::int(r.angle)),
        other => return Err(field_err(field("gen"), format!("unknown generator `{other}`"))),
    };
    Ok(p.on_qudit(r.qudit.unwrap_or(0)))
}

pub fn schedule_from_json(text: &str) -> Result<Schedule, FormatError> {
    let f: ScheduleFile = serde_json::from_str(text)?;
    let system = System {
        n_qudits: f.n_qudits,
        d: f.d,
    };
    if !(1..=2).contains(&f.n_qudits) {
        return Err(field_err("n_qudits", "must be 1 or 2"));
    }
    if f.d < 2 {
        return Err(field_err("d", "must be at least 2"));
    }
    let mut s = Schedule::new(system);
    for (i, r) in f.pulses.iter().enumerate() {
        let p = pulse(i, r)?;
        s.push(p, "file")
            .map_err(|e| field_err(format!("pulses[{i}]"), e.to_string()))?;
    }
    Ok(s)
}

pub fn schedule_to_value(s: &Schedule) -> serde_json::Value {
    let f = ScheduleFile {
        n_qudits: s.system.n_qudits,
        d: s.system.d,
        pulses: s.pulses.iter().map(|p| record(p, s.system)).collect(),
    };
    serde_json::to_value(f).expect("schedule serializes")
}

pub fn schedule_to_json(s: &Schedule) -> String {
    serde_json::to_string_pretty(&schedule_to_value(s)).expect("schedule serializes")
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OmegaFile {
    Wrapped { omega: Vec<Vec<f64>> },
    Bare(Vec<Vec<f64>>),
}

pub fn omega_from_json(text: &str) -> Result<DiagonalCoupling, FormatError> {
    let rows = match serde_json::from_str::<OmegaFile>(text)? {
        OmegaFile::Wrapped { omega } | OmegaFile::Bare(omega) => omega,
    };
    let d = rows.len();
    if d == 0 {
        return Err(field_err("omega", "empty matrix"));
    }
    check_rows("omega", &rows, d)?;
    Ok(DiagonalCoupling::new(DMatrix::from_fn(d, d, |r, c| rows[r][c]))?)
}
