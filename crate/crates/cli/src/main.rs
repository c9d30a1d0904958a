// Copyright 2026 The paramit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front end for paramit.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use paramit::experiments::{crossover_report, read_csv, run_sweep, summarize, write_csv, SweepSpec};
use paramit::fidelity::unitary_fidelity;
use paramit::gates::{circuit_unitary, parse_angle, parse_gate_spec, Circuit, HardwareGateModel, NativeSet};
use paramit::kak::kak_decompose;
use paramit::mitigate::{kak_approx, unmitigated_fidelity};
use paramit::noise::{circuit_fidelity, NoiseModel};
use paramit::recompile::{expressivity_scan, recompile, LayerKind, OptimizerConfig};
use paramit::{Mat2, Mat4, C64};

#[derive(Parser)]
#[command(name = "paramit", version, about = "Mitigation of parasitic two-qubit gate errors")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layers {
    Full,
    Rz,
}

impl From<Layers> for LayerKind {
    fn from(l: Layers) -> Self {
        match l {
            Layers::Full => LayerKind::FullSu2,
            Layers::Rz => LayerKind::RzOnly,
        }
    }
}

#[derive(clap::Args)]
struct OptArgs {
    /// Random restarts per native gate count.
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OptArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig { max_restarts: self.restarts, seed: self.seed, ..Default::default() }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// KAK decomposition of a 4×4 unitary given as JSON `[[[re, im], ...], ...]`.
    Kak {
        matrix_file: Option<PathBuf>,
        /// Gate spec instead of a file, e.g. `iswap(pi/3)`.
        #[arg(long, conflicts_with = "matrix_file")]
        gate: Option<String>,
    },
    /// Single-qubit correction for a parasitic gate.
    Mitigate {
        #[arg(long)]
        parasitic: String,
    },
    /// Recompile a target into a noisy native gate.
    Recompile {
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "sqrt-iswap-dag")]
        native: String,
        #[arg(long, default_value = "identity")]
        parasitic: String,
        #[arg(long, default_value_t = 3)]
        max_gates: usize,
        #[arg(long, value_enum, default_value = "full")]
        layers: Layers,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Expressivity scan over the Weyl chamber; writes CSV.
    Scan {
        #[arg(long, default_value = "pi/40")]
        grid_step: String,
        #[arg(long, default_value = "sqrt-iswap-dag")]
        native: String,
        #[arg(long, default_value = "identity")]
        parasitic: String,
        /// Exact native gate count.
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, value_enum, default_value = "full")]
        layers: Layers,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Run a sweep described by a TOML file.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summaries and crossover angles of a sweep CSV, as JSON.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Fidelity of a circuit file against a target.
    Simulate {
        circuit_file: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "sqrt-iswap-dag")]
        native: String,
        #[arg(long, default_value = "identity")]
        parasitic: String,
        /// Native gate duration in ns; defaults to the noise model's.
        #[arg(long)]
        native_ns: Option<f64>,
        /// Preset name or TOML file.
        #[arg(long, default_value = "unitary-only")]
        noise: String,
    },
}

fn mat2_json(m: &Mat2) -> serde_json::Value {
    json!((0..2).map(|i| (0..2).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn read_matrix(path: &PathBuf) -> Result<Mat4> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text).context("matrix must be [[[re, im], ...], ...]")?;
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        bail!("expected a 4×4 matrix");
    }
    Ok(Mat4::from_fn(|i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{}", serde_json::to_string_pretty(v)?) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn model(native: &str, parasitic: &str, duration_ns: f64) -> Result<HardwareGateModel> {
    Ok(HardwareGateModel::new("hw", parse_gate_spec(native)?, parse_gate_spec(parasitic)?, duration_ns))
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Kak { matrix_file, gate } => {
            let u = match (matrix_file, gate) {
                (Some(p), None) => read_matrix(&p)?,
                (None, Some(g)) => parse_gate_spec(&g)?,
                _ => bail!("give a matrix file or --gate"),
            };
            let k = kak_decompose(&u)?;
            print_json(&json!({
                "alpha": k.alpha,
                "beta": k.beta,
                "gamma": k.gamma,
                "k1": mat2_json(&k.k1),
                "k2": mat2_json(&k.k2),
                "k3": mat2_json(&k.k3),
                "k4": mat2_json(&k.k4),
                "global_phase": [k.global_phase.re, k.global_phase.im],
            }))
        }
        Cmd::Mitigate { parasitic } => {
            let e = parse_gate_spec(&parasitic)?;
            let plan = kak_approx(&e)?;
            let euler = |(a, b, c): (f64, f64, f64)| json!({"rz_first": a, "rx": b, "rz_last": c});
            print_json(&json!({
                "parasitic_triple": [plan.parasitic_triple.0, plan.parasitic_triple.1, plan.parasitic_triple.2],
                "correction": [euler(plan.euler[0]), euler(plan.euler[1])],
                "diagonal": plan.is_diagonal(1e-9),
                "rz_angles": plan.is_diagonal(1e-9).then(|| plan.rz_angles()),
                "mitigated_fidelity": plan.predicted_fidelity,
                "unmitigated_fidelity": unmitigated_fidelity(&e),
            }))
        }
        Cmd::Recompile { target, native, parasitic, max_gates, layers, opt } => {
            let t = parse_gate_spec(&target)?;
            let hw = model(&native, &parasitic, 0.0)?;
            let r = recompile(&t, &hw, max_gates, layers.into(), &opt.config())?;
            print_json(&json!({
                "achieved_infidelity": r.achieved_infidelity,
                "native_gates_used": r.native_gates_used,
                "restarts_used": r.restarts_used,
                "converged": r.converged,
                "circuit": r.circuit.to_string(),
            }))
        }
        Cmd::Scan { grid_step, native, parasitic, m, layers, out, opt } => {
            let hw = model(&native, &parasitic, 0.0)?;
            let recs = expressivity_scan(&hw, parse_angle(&grid_step)?, m, layers.into(), &opt.config())?;
            let sink: Box<dyn Write> = match out {
                Some(p) => Box::new(BufWriter::new(File::create(&p).with_context(|| format!("creating {}", p.display()))?)),
                None => Box::new(io::stdout().lock()),
            };
            let mut w = csv::Writer::from_writer(sink);
            for r in &recs {
                w.serialize(r)?;
            }
            w.flush()?;
            Ok(())
        }
        Cmd::Sweep { spec, out } => {
            let text = std::fs::read_to_string(&spec).with_context(|| format!("reading {}", spec.display()))?;
            let s = SweepSpec::from_toml_str(&text)?;
            let result = run_sweep(&s)?;
            let f = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_csv(&result.records, BufWriter::new(f))?;
            for fail in &result.failures {
                eprintln!("failed: target {} {} {}°: {}", fail.target_id, fail.strategy, fail.parasitic_deg, fail.error);
            }
            eprintln!("{} records, {} failures", result.records.len(), result.failures.len());
            Ok(())
        }
        Cmd::Report { input } => {
            let f = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let recs = read_csv(f)?;
            if recs.is_empty() {
                bail!("{} has no records", input.display());
            }
            print_json(&json!({ "summary": summarize(&recs), "crossovers": crossover_report(&recs) }))
        }
        Cmd::Simulate { circuit_file, target, native, parasitic, native_ns, noise } => {
            let text = std::fs::read_to_string(&circuit_file).with_context(|| format!("reading {}", circuit_file.display()))?;
            let c: Circuit = text.parse()?;
            let nm = NoiseModel::resolve(&noise)?;
            let hw = model(&native, &parasitic, native_ns.unwrap_or(nm.native_ns))?;
            let set = NativeSet::single("hw", hw);
            let t = parse_gate_spec(&target)?;
            print_json(&json!({
                "unitary_fidelity": unitary_fidelity(&t, &circuit_unitary(&c, &set)?),
                "avg_gate_fidelity": circuit_fidelity(&t, &c, &set, &nm)?,
                "duration_ns": c.duration(&nm.durations, &set)?,
                "n2q": c.native_count(),
                "nrx": c.rx_count(),
                "nrz": c.rz_count(),
            }))
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse().cmd) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
