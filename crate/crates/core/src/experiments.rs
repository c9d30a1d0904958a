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

//! Sweeps comparing mitigation strategies over target families, parasitic
//! angles and noise models.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::unitary_fidelity;
use crate::gates::{
    apply_local_correction, circuit_unitary, cphase, cphase_via_cz, iswap, iswap_via_sqrt_iswap, parse_angle, u_a,
    Circuit, HardwareGateModel, NativeGate, NativeSet,
};
use crate::kak::local_invariants;
use crate::linalg::Mat4;
use crate::mitigate::kak_approx;
use crate::noise::{circuit_fidelity, NoiseModel};
use crate::recompile::{derive_seed, divisions_for_step, recompile, weyl_grid, LayerKind, OptimizerConfig};

/// Native gate id used inside sweep circuits.
pub const NATIVE_ID: &str = "hw";
/// Gate budget of the parasitic-free reference decomposition.
pub const REFERENCE_GATES: usize = 3;

/// How a target is implemented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Strategy {
    /// Fixed decomposition run on the noisy native gate.
    NoMitigate,
    /// Fixed decomposition plus the local KAK correction after each native.
    KakApprox,
    /// Recompile with arbitrary single-qubit layers and at most `m` natives.
    RecompileFull(usize),
    /// Recompile with Rz-only layers and at most `m` natives.
    RecompileRz(usize),
    /// Parasitic-free native gate with `factor`× duration.
    LongDuration { factor: u32, m: usize },
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::NoMitigate => write!(f, "NoMitigate"),
            Strategy::KakApprox => write!(f, "KAK-Approx"),
            Strategy::RecompileFull(m) => write!(f, "Recompile-{m}G"),
            Strategy::RecompileRz(m) => write!(f, "Recompile-RZ-{m}G"),
            Strategy::LongDuration { factor, m } => write!(f, "{factor}XLong-{m}G"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown strategy '{s}'"));
        let gates = |x: &str| x.strip_suffix('G').and_then(|n| n.parse::<usize>().ok()).ok_or_else(bad);
        match s {
            "NoMitigate" => return Ok(Strategy::NoMitigate),
            "KAK-Approx" => return Ok(Strategy::KakApprox),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("Recompile-RZ-") {
            return Ok(Strategy::RecompileRz(gates(rest)?));
        }
        if let Some(rest) = s.strip_prefix("Recompile-") {
            return Ok(Strategy::RecompileFull(gates(rest)?));
        }
        if let Some((f, rest)) = s.split_once("XLong-") {
            let factor = f.parse::<u32>().map_err(|_| bad())?;
            return Ok(Strategy::LongDuration { factor, m: gates(rest)? });
        }
        Err(bad())
    }
}

impl From<Strategy> for String {
    fn from(s: Strategy) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for Strategy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Targets of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetFamily {
    /// `iSWAP(kπ/count)` for `k = 1..=count`.
    IswapGrid { count: usize },
    /// `CPhase(kπ/count)` for `k = 1..=count`.
    CphaseGrid { count: usize },
    /// `U_A` on the Weyl-chamber grid with the given step, e.g. `"pi/40"`.
    WeylGrid { step: String },
}

#[derive(Clone, Copy, Debug)]
enum Template {
    Iswap(f64),
    Cphase(f64),
    Generic,
}

/// One target unitary of a sweep.
#[derive(Clone, Debug)]
pub struct Target {
    pub id: usize,
    pub unitary: Mat4,
    pub triple: (f64, f64, f64),
    template: Template,
}

impl TargetFamily {
    pub fn targets(&self) -> Result<Vec<Target>> {
        let grid = |count: usize, f: fn(f64) -> (Mat4, Template)| -> Result<Vec<Target>> {
            if count == 0 {
                return Err(Error::Config("target count must be positive".into()));
            }
            (1..=count)
                .map(|k| {
                    let (u, t) = f(k as f64 * PI / count as f64);
                    Ok(Target { id: k - 1, triple: local_invariants(&u)?, unitary: u, template: t })
                })
                .collect()
        };
        match self {
            TargetFamily::IswapGrid { count } => grid(*count, |t| (iswap(t), Template::Iswap(t))),
            TargetFamily::CphaseGrid { count } => grid(*count, |p| (cphase(p), Template::Cphase(p))),
            TargetFamily::WeylGrid { step } => {
                let d = divisions_for_step(parse_angle(step)?)?;
                Ok(weyl_grid(d)
                    .into_iter()
                    .enumerate()
                    .map(|(id, t)| Target { id, unitary: u_a(t.0, t.1, t.2), triple: t, template: Template::Generic })
                    .collect())
            }
        }
    }
}

fn default_native() -> NativeGate {
    NativeGate::SqrtIswapDag
}

fn default_noise() -> Vec<String> {
    vec!["unitary-only".into()]
}

/// A sweep configuration, usually read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_native")]
    pub native: NativeGate,
    pub targets: TargetFamily,
    pub strategies: Vec<Strategy>,
    /// Parasitic angles in degrees. For CZ this is the over-rotation.
    pub parasitic_deg: Vec<f64>,
    /// Noise preset names or TOML paths.
    #[serde(default = "default_noise")]
    pub noise: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

impl SweepSpec {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() || self.parasitic_deg.is_empty() || self.noise.is_empty() {
            return Err(Error::Config("strategies, parasitic_deg and noise must be non-empty".into()));
        }
        if self.parasitic_deg.iter().any(|a| !a.is_finite()) {
            return Err(Error::Config("parasitic angles must be finite".into()));
        }
        for s in &self.strategies {
            match *s {
                Strategy::RecompileFull(m) | Strategy::RecompileRz(m) | Strategy::LongDuration { m, .. } if m > 6 => {
                    return Err(Error::TooManyNativeGates(m))
                }
                Strategy::LongDuration { factor: 0, .. } => {
                    return Err(Error::Config("long-duration factor must be positive".into()))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// One row of sweep output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub target_id: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub strategy: Strategy,
    pub parasitic_deg: f64,
    pub noise_preset: String,
    pub fidelity: f64,
    pub n2q: usize,
    pub nrx: usize,
    pub nrz: usize,
    pub duration_ns: f64,
    pub converged: bool,
}

/// A (target, strategy, angle) combination that could not be evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub target_id: usize,
    pub strategy: Strategy,
    pub parasitic_deg: f64,
    pub error: String,
}

#[derive(Clone, Debug, Default)]
pub struct SweepOutput {
    pub records: Vec<ResultRecord>,
    pub failures: Vec<SweepFailure>,
}

/// Circuit plus the hardware model it should run on.
struct Plan {
    circuit: Circuit,
    parasitic: Mat4,
    duration_factor: f64,
    converged: bool,
}

struct TargetRun<'a> {
    spec: &'a SweepSpec,
    target: &'a Target,
    seed: u64,
    reference: HashMap<usize, (Circuit, bool)>,
}

impl TargetRun<'_> {
    fn cfg(&self, salt: u64) -> OptimizerConfig {
        OptimizerConfig { seed: derive_seed(self.seed, salt), ..self.spec.optimizer.clone() }
    }

    /// Decomposition against the parasitic-free native: the analytic
    /// template when one exists, otherwise a numerical one.
    fn reference(&mut self, m: usize) -> Result<(Circuit, bool)> {
        match (self.target.template, self.spec.native) {
            (Template::Iswap(t), NativeGate::SqrtIswapDag) => return Ok((iswap_via_sqrt_iswap(t, NATIVE_ID), true)),
            (Template::Cphase(p), NativeGate::Cz) => return Ok((cphase_via_cz(p, NATIVE_ID), true)),
            _ => {}
        }
        if let Some(hit) = self.reference.get(&m) {
            return Ok(hit.clone());
        }
        let hw = HardwareGateModel::perfect(NATIVE_ID, self.spec.native.ideal(), 0.0);
        let r = recompile(&self.target.unitary, &hw, m, LayerKind::FullSu2, &self.cfg(1000 + m as u64))?;
        self.reference.insert(m, (r.circuit.clone(), r.converged));
        Ok((r.circuit, r.converged))
    }

    fn plan(&mut self, strategy: Strategy, psi: f64, salt: u64) -> Result<Plan> {
        let parasitic = cphase(psi);
        Ok(match strategy {
            Strategy::NoMitigate => {
                let (circuit, converged) = self.reference(REFERENCE_GATES)?;
                Plan { circuit, parasitic, duration_factor: 1.0, converged }
            }
            Strategy::KakApprox => {
                let (circuit, converged) = self.reference(REFERENCE_GATES)?;
                let fix = kak_approx(&parasitic)?;
                Plan { circuit: apply_local_correction(&circuit, fix.factors), parasitic, duration_factor: 1.0, converged }
            }
            Strategy::RecompileFull(m) | Strategy::RecompileRz(m) => {
                let kind = if matches!(strategy, Strategy::RecompileRz(_)) { LayerKind::RzOnly } else { LayerKind::FullSu2 };
                let hw = HardwareGateModel::new(NATIVE_ID, self.spec.native.ideal(), parasitic, 0.0);
                let r = recompile(&self.target.unitary, &hw, m, kind, &self.cfg(salt))?;
                Plan { circuit: r.circuit, parasitic, duration_factor: 1.0, converged: r.converged }
            }
            Strategy::LongDuration { factor, m } => {
                let (circuit, converged) = self.reference(m)?;
                Plan { circuit, parasitic: Mat4::identity(), duration_factor: factor as f64, converged }
            }
        })
    }
}

fn evaluate(spec: &SweepSpec, target: &Target, plan: &Plan, nm: &NoiseModel) -> Result<(f64, f64)> {
    let hw = HardwareGateModel::new(NATIVE_ID, spec.native.ideal(), plan.parasitic, nm.native_ns * plan.duration_factor);
    let natives = NativeSet::single(NATIVE_ID, hw);
    let fidelity = if nm.is_noiseless() {
        unitary_fidelity(&target.unitary, &circuit_unitary(&plan.circuit, &natives)?)
    } else {
        circuit_fidelity(&target.unitary, &plan.circuit, &natives, nm)?
    };
    Ok((fidelity, plan.circuit.duration(&nm.durations, &natives)?))
}

fn run_target(spec: &SweepSpec, target: &Target, noises: &[NoiseModel]) -> SweepOutput {
    let mut run = TargetRun { spec, target, seed: derive_seed(spec.seed, target.id as u64), reference: HashMap::new() };
    let mut out = SweepOutput::default();
    for (ai, &deg) in spec.parasitic_deg.iter().enumerate() {
        for (si, &strategy) in spec.strategies.iter().enumerate() {
            let salt = (ai * spec.strategies.len() + si) as u64;
            let result = run.plan(strategy, deg.to_radians(), salt).and_then(|plan| {
                noises
                    .iter()
                    .map(|nm| {
                        let (fidelity, duration_ns) = evaluate(spec, target, &plan, nm)?;
                        Ok(ResultRecord {
                            target_id: target.id,
                            alpha: target.triple.0,
                            beta: target.triple.1,
                            gamma: target.triple.2,
                            strategy,
                            parasitic_deg: deg,
                            noise_preset: nm.name.clone(),
                            fidelity,
                            n2q: plan.circuit.native_count(),
                            nrx: plan.circuit.rx_count(),
                            nrz: plan.circuit.rz_count(),
                            duration_ns,
                            converged: plan.converged,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            });
            match result {
                Ok(recs) => out.records.extend(recs),
                Err(e) => {
                    log::warn!("target {} / {strategy} / {deg}°: {e}", target.id);
                    out.failures.push(SweepFailure { target_id: target.id, strategy, parasitic_deg: deg, error: e.to_string() })
                }
            }
        }
    }
    out
}

/// Runs every (target, angle, strategy, noise) combination. Targets are
/// processed in parallel; output is ordered by target id.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    spec.validate()?;
    let noises = spec.noise.iter().map(|n| NoiseModel::resolve(n)).collect::<Result<Vec<_>>>()?;
    let targets = spec.targets.targets()?;
    log::info!("sweep: {} targets × {} angles × {} strategies", targets.len(), spec.parasitic_deg.len(), spec.strategies.len());
    let parts: Vec<SweepOutput> = targets.par_iter().map(|t| run_target(spec, t, &noises)).collect();
    let mut out = SweepOutput::default();
    for p in parts {
        out.records.extend(p.records);
        out.failures.extend(p.failures);
    }
    Ok(out)
}

/// Mean and population standard deviation per (noise, strategy, angle).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub noise_preset: String,
    pub strategy: Strategy,
    pub parasitic_deg: f64,
    pub count: usize,
    pub mean_fidelity: f64,
    pub std_fidelity: f64,
    pub mean_n2q: f64,
    pub mean_nrx: f64,
    pub mean_nrz: f64,
    pub mean_duration_ns: f64,
}

fn first_seen<T: PartialEq + Clone>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut seen: Vec<T> = Vec::new();
    for x in items {
        if !seen.contains(&x) {
            seen.push(x);
        }
    }
    seen
}

pub fn summarize(records: &[ResultRecord]) -> Vec<SummaryRow> {
    let noises = first_seen(records.iter().map(|r| r.noise_preset.clone()));
    let strategies = first_seen(records.iter().map(|r| r.strategy));
    let mut groups: HashMap<(usize, usize, u64), Vec<&ResultRecord>> = HashMap::new();
    for r in records {
        let n = noises.iter().position(|x| *x == r.noise_preset).expect("seen");
        let s = strategies.iter().position(|x| *x == r.strategy).expect("seen");
        groups.entry((n, s, r.parasitic_deg.to_bits())).or_default().push(r);
    }
    let mut keys: Vec<_> = groups.keys().copied().collect();
    keys.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(f64::from_bits(a.2).total_cmp(&f64::from_bits(b.2))));
    keys.into_iter()
        .map(|k| {
            let g = &groups[&k];
            let n = g.len() as f64;
            let mean = |f: &dyn Fn(&ResultRecord) -> f64| g.iter().map(|r| f(r)).sum::<f64>() / n;
            let mf = mean(&|r| r.fidelity);
            SummaryRow {
                noise_preset: noises[k.0].clone(),
                strategy: strategies[k.1],
                parasitic_deg: f64::from_bits(k.2),
                count: g.len(),
                mean_fidelity: mf,
                std_fidelity: mean(&|r| (r.fidelity - mf).powi(2)).sqrt(),
                mean_n2q: mean(&|r| r.n2q as f64),
                mean_nrx: mean(&|r| r.nrx as f64),
                mean_nrz: mean(&|r| r.nrz as f64),
                mean_duration_ns: mean(&|r| r.duration_ns),
            }
        })
        .collect()
}

/// Angle at which two mean-fidelity curves cross, for one noise preset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub noise_preset: String,
    pub first: Strategy,
    pub second: Strategy,
    /// `None` means the curves never change order on the shared grid.
    pub crossing_deg: Option<f64>,
    /// Whether `first` has the higher fidelity at the smallest angle.
    pub first_better_at_start: Option<bool>,
}

/// First sign change of `d` over `x`, linearly interpolated.
pub fn find_crossing(x: &[f64], d: &[f64]) -> Option<f64> {
    let nz: Vec<usize> = (0..d.len()).filter(|&i| d[i] != 0.0).collect();
    for w in nz.windows(2) {
        let (i, j) = (w[0], w[1]);
        if d[i].signum() != d[j].signum() {
            if j == i + 1 {
                return Some(x[i] + (x[j] - x[i]) * d[i] / (d[i] - d[j]));
            }
            return Some(x[i + 1]);
        }
    }
    None
}

pub fn crossover_report(records: &[ResultRecord]) -> Vec<Crossover> {
    let rows = summarize(records);
    let noises = first_seen(rows.iter().map(|r| r.noise_preset.clone()));
    let strategies = first_seen(rows.iter().map(|r| r.strategy));
    let mut out = Vec::new();
    for noise in &noises {
        let curve = |s: Strategy| -> Vec<(f64, f64)> {
            rows.iter().filter(|r| &r.noise_preset == noise && r.strategy == s).map(|r| (r.parasitic_deg, r.mean_fidelity)).collect()
        };
        for (i, &a) in strategies.iter().enumerate() {
            for &b in &strategies[i + 1..] {
                let (ca, cb) = (curve(a), curve(b));
                let shared: Vec<(f64, f64)> = ca
                    .iter()
                    .filter_map(|&(x, fa)| cb.iter().find(|&&(y, _)| y == x).map(|&(_, fb)| (x, fa - fb)))
                    .collect();
                if shared.is_empty() {
                    continue;
                }
                let (xs, ds): (Vec<f64>, Vec<f64>) = shared.into_iter().unzip();
                let start = ds.iter().find(|d| **d != 0.0).map(|d| *d > 0.0);
                out.push(Crossover {
                    noise_preset: noise.clone(),
                    first: a,
                    second: b,
                    crossing_deg: find_crossing(&xs, &ds),
                    first_better_at_start: start,
                });
            }
        }
    }
    out
}

pub fn write_csv<W: Write>(records: &[ResultRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in records {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<ResultRecord>> {
    let mut rd = csv::Reader::from_reader(r);
    rd.deserialize().map(|r| r.map_err(Error::from)).collect()
}
