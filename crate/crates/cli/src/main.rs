//! `qsynth`: compile qudit unitaries into pulse schedules and check them.
//!
//! Reports go to stdout as JSON, a one-line summary goes to stderr.
//! Exit status 0 means success, 1 a failed verification, 2 bad input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qudit_synth::formats::{
    graph_from_json, omega_from_json, schedule_from_json, schedule_to_json, schedule_to_value,
    unitary_from_json, unitary_to_value, FormatError,
};
use qudit_synth::{
    cinc_matrix, cinc_sequence, controlled, is_entangling_diagonal, simulate, spectral_synthesize,
    synthesize_lambda1, synthesize_single, synthesize_single_with_tree, verify, Capabilities, CouplingGraph,
    Schedule, SpanningTree, SynthError, System, Unitary,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "qsynth", version, about = "Pulse synthesis for qudit unitaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a single-qudit unitary on a coupling graph.
    SynthSingle {
        #[command(flatten)]
        graph: GraphArgs,
        /// Target unitary JSON.
        #[arg(long)]
        target: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compile the controlled-increment gate for the graph's dimension.
    SynthCinc {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compile the gate applying the target to qudit 1 when qudit 0 is `d-1`.
    SynthLambda1 {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        target: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compile a one- or two-qudit unitary through its eigendecomposition.
    SynthSpectral {
        #[command(flatten)]
        graph: GraphArgs,
        /// Target of dimension `d` (one qudit) or `d*d` (two qudits).
        #[arg(long)]
        target: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the unitary realized by a schedule.
    Simulate {
        #[arg(long)]
        schedule: PathBuf,
        /// Also write the matrix JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a schedule with a target up to global phase.
    Verify {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Decide whether a diagonal coupling matrix can entangle two qudits.
    CheckEntangling {
        #[arg(long)]
        omega: PathBuf,
        #[command(flatten)]
        tol: TolArg,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// Preset (`rb87`, `path-<d>`, `complete-<d>`) or a graph JSON file.
    #[arg(long)]
    graph: String,
    /// Override the graph's simultaneous x/y capability.
    #[arg(long)]
    simultaneous_xy: Option<bool>,
    /// Override the graph's direct z capability.
    #[arg(long)]
    direct_z: Option<bool>,
}

#[derive(Args)]
struct TolArg {
    /// Verification tolerance on the phase-insensitive distance.
    #[arg(long, env = "QSYNTH_TOL", default_value_t = 1e-9, value_parser = parse_tol)]
    tol: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the schedule JSON here instead of embedding it in the report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Simulate the schedule and compare it with the target.
    #[arg(long)]
    verify: bool,
    /// Report counts only.
    #[arg(long)]
    counts_only: bool,
    #[command(flatten)]
    tol: TolArg,
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(format!("tolerance must be positive, got {s}"))
    }
}

enum Failure {
    Input(String),
    Verification(String),
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::DisconnectedGraph => Failure::Input(format!(
                "{e} (every level must be reachable from the pivot to reach diagonal form)"
            )),
            e => Failure::Input(e.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> Result<T, FormatError>) -> Result<T, Failure> {
    parse(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("report serializes"));
}

impl GraphArgs {
    fn is_rb87(&self) -> bool {
        self.graph == "rb87"
    }

    fn load(&self) -> Result<CouplingGraph, Failure> {
        let g = match CouplingGraph::preset(&self.graph) {
            Ok(g) => g,
            Err(_) if Path::new(&self.graph).exists() => load(Path::new(&self.graph), graph_from_json)?,
            Err(_) => {
                return Err(Failure::Input(format!(
                    "--graph: `{}` is neither a preset (rb87, path-<d>, complete-<d>) nor a readable file",
                    self.graph
                )))
            }
        };
        let caps = g.capabilities();
        let caps = Capabilities::new(
            self.simultaneous_xy.unwrap_or(caps.simultaneous_xy),
            self.direct_z.unwrap_or(caps.direct_z),
        );
        Ok(g.with_capabilities(caps))
    }
}

/// Shared tail of every synthesis command: write, verify, report.
fn finish(
    command: &str,
    schedule: &Schedule,
    target: &Unitary,
    output: &OutputArgs,
    mut report: Value,
) -> CliResult {
    let counts = schedule.counts();
    report["command"] = json!(command);
    report["system"] = json!({"n_qudits": schedule.system.n_qudits, "d": schedule.system.d});
    report["counts"] = json!(counts);
    report["int_pulses"] = json!(counts.int);
    report["global_phase"] = json!(schedule.global_phase);
    if let Some(out) = &output.out {
        write(out, &schedule_to_json(schedule))?;
        report["schedule_path"] = json!(out.display().to_string());
    } else if !output.counts_only {
        report["schedule"] = schedule_to_value(schedule);
    }
    let mut summary = format!("{command}: {} pulses ({} int)", counts.pulses, counts.int);
    let mut passed = true;
    if output.verify {
        let v = verify(schedule, target, output.tol.tol)?;
        summary.push_str(&format!(", distance {:.3e}", v.target_distance));
        passed = v.pass;
        report["verification"] = json!(v);
    }
    if output.counts_only {
        let keep = ["command", "counts", "int_pulses", "single", "verification"];
        if let Value::Object(map) = &mut report {
            map.retain(|k, _| keep.contains(&k.as_str()));
        }
    }
    print_json(&report);
    if passed {
        eprintln!("{summary}");
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "{summary} exceeds tolerance {:.1e}",
            output.tol.tol
        )))
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::SynthSingle {
            graph,
            target,
            output,
        } => {
            let g = graph.load()?;
            let v = load(&target, unitary_from_json)?;
            let s = if graph.is_rb87() {
                synthesize_single_with_tree(&v, &g, &SpanningTree::rb87())?
            } else {
                synthesize_single(&v, &g)?
            };
            let report = json!({
                "single": s.counts(),
                "provenance": {
                    "qr_gates": s.qr,
                    "diagonal": s.phases,
                },
            });
            finish("synth-single", &s.schedule, &v, &output, report)
        }
        Command::SynthCinc { graph, output } => {
            let g = graph.load()?;
            let s = cinc_sequence(g.d(), &g)?;
            finish("synth-cinc", &s, &cinc_matrix(g.d()), &output, json!({}))
        }
        Command::SynthLambda1 {
            graph,
            target,
            output,
        } => {
            let g = graph.load()?;
            let v = load(&target, unitary_from_json)?;
            let s = synthesize_lambda1(&v, &g)?;
            finish("synth-lambda1", &s, &controlled(&v), &output, json!({}))
        }
        Command::SynthSpectral {
            graph,
            target,
            output,
        } => {
            let g = graph.load()?;
            let w = load(&target, unitary_from_json)?;
            let d = g.d();
            let system = if w.dim() == d {
                System::single(d)
            } else if w.dim() == d * d {
                System::pair(d)
            } else {
                return Err(Failure::Input(format!(
                    "{}: field `dim`: {} matches neither d={d} nor d*d={}",
                    target.display(),
                    w.dim(),
                    d * d
                )));
            };
            let s = spectral_synthesize(&w, system, &g)?;
            finish("synth-spectral", &s, &w, &output, json!({}))
        }
        Command::Simulate { schedule, out } => {
            let s = load(&schedule, schedule_from_json)?;
            let u = simulate(&s)?;
            let v = unitary_to_value(&u);
            if let Some(out) = out {
                write(
                    &out,
                    &serde_json::to_string_pretty(&v).expect("matrix serializes"),
                )?;
            }
            print_json(&v);
            Ok(())
        }
        Command::Verify {
            schedule,
            target,
            tol,
        } => {
            let s = load(&schedule, schedule_from_json)?;
            let v = load(&target, unitary_from_json)?;
            let r = verify(&s, &v, tol.tol)?;
            print_json(&json!(r));
            if r.pass {
                eprintln!(
                    "verify: distance {:.3e} within {:.1e}",
                    r.target_distance, tol.tol
                );
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "verify: distance {:.3e} exceeds {:.1e}",
                    r.target_distance, tol.tol
                )))
            }
        }
        Command::CheckEntangling { omega, tol } => {
            let c = load(&omega, omega_from_json)?;
            let entangling = is_entangling_diagonal(&c, tol.tol);
            let verdict = if entangling {
                "entangling"
            } else {
                "not entangling"
            };
            print_json(&json!({"entangling": entangling, "verdict": verdict}));
            eprintln!("{verdict}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_must_be_positive() {
        assert_eq!(parse_tol("1e-9"), Ok(1e-9));
        assert!(parse_tol("0").is_err());
        assert!(parse_tol("-3").is_err());
        assert!(parse_tol("inf").is_err());
        assert!(parse_tol("tiny").is_err());
    }

    #[test]
    fn capability_overrides_apply_to_presets() {
        let args = GraphArgs {
            graph: "rb87".into(),
            simultaneous_xy: Some(false),
            direct_z: Some(true),
        };
        let caps = args.load().ok().unwrap().capabilities();
        assert!(!caps.simultaneous_xy && caps.direct_z);
        assert!(args.is_rb87());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
