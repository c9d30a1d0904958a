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

//! Channel simulation on two qubits.
//!
//! Density matrices are vectorized by stacking columns, `vec(ρ)[i + 4j] = ρ[i][j]`,
//! so a unitary acts as `S_U = conj(U)⊗U`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{Circuit, Durations, GateKind, NativeSet, Site};
use crate::linalg::{c64, kron, kron4, pauli_i, pauli_x, pauli_y, pauli_z, Mat16, Mat2, Mat4, C64};

/// Trace preservation tolerance.
pub const TP_TOL: f64 = 1e-12;
/// Most negative Choi eigenvalue accepted as completely positive.
pub const CP_TOL: f64 = 1e-10;

/// A linear map on vectorized 4×4 density matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    matrix: Mat16,
}

fn vec4(rho: &Mat4) -> nalgebra::SVector<C64, 16> {
    nalgebra::SVector::from_fn(|k, _| rho[(k % 4, k / 4)])
}

impl Superoperator {
    pub fn identity() -> Self {
        Superoperator { matrix: Mat16::identity() }
    }

    pub fn from_matrix(matrix: Mat16) -> Self {
        Superoperator { matrix }
    }

    pub fn matrix(&self) -> &Mat16 {
        &self.matrix
    }

    /// `Σ_k conj(K_k)⊗K_k`.
    pub fn from_kraus(ops: &[Mat4]) -> Self {
        let matrix = ops.iter().map(|k| kron4(&k.conjugate(), k)).sum();
        Superoperator { matrix }
    }

    /// The channel `self` followed by `next`.
    pub fn then(&self, next: &Superoperator) -> Superoperator {
        Superoperator { matrix: next.matrix * self.matrix }
    }

    pub fn apply(&self, rho: &Mat4) -> Mat4 {
        let v = self.matrix * vec4(rho);
        Mat4::from_fn(|i, j| v[i + 4 * j])
    }

    /// Largest deviation of `⟨⟨I|S` from `⟨⟨I|`.
    pub fn trace_preservation_error(&self) -> f64 {
        let id = vec4(&Mat4::identity()).transpose();
        (id * self.matrix - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
    pub fn choi(&self) -> Mat16 {
        let mut c = Mat16::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let mut e = Mat4::zeros();
                e[(i, j)] = c64(1.0, 0.0);
                let out = self.apply(&e);
                c.fixed_view_mut::<4, 4>(4 * i, 4 * j).copy_from(&out);
            }
        }
        c
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        let c = self.choi();
        let h = (c + c.adjoint()) * c64(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Checks trace preservation and complete positivity.
    pub fn validate(&self) -> Result<()> {
        let tp = self.trace_preservation_error();
        if tp > TP_TOL {
            return Err(Error::InvalidChannel(format!("trace preservation off by {tp:e}")));
        }
        let m = self.min_choi_eigenvalue();
        if m < -CP_TOL {
            return Err(Error::InvalidChannel(format!("Choi eigenvalue {m:e}")));
        }
        Ok(())
    }
}

pub fn unitary_superop(u: &Mat4) -> Superoperator {
    Superoperator { matrix: kron4(&u.conjugate(), u) }
}

fn lift(op: &Mat2, qubit: usize) -> Mat4 {
    match qubit {
        0 => kron(op, &pauli_i()),
        _ => kron(&pauli_i(), op),
    }
}

/// Decay probability `1 − e^{−t/T1}` for `t` in ns and `T1` in µs.
pub fn damping_probability(duration_ns: f64, t1_us: f64) -> f64 {
    -(-duration_ns / (t1_us * 1e3)).exp_m1()
}

/// Amplitude damping on one qubit for `duration_ns`.
pub fn amplitude_damping_superop(duration_ns: f64, t1_us: f64, qubit: usize) -> Superoperator {
    let p = damping_probability(duration_ns, t1_us);
    let z = c64(0.0, 0.0);
    let k0 = Mat2::new(c64(1.0, 0.0), z, z, c64((1.0 - p).sqrt(), 0.0));
    let k1 = Mat2::new(z, c64(p.sqrt(), 0.0), z, z);
    Superoperator::from_kraus(&[lift(&k0, qubit), lift(&k1, qubit)])
}

/// Qubits a depolarizing channel acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DepolarizingTarget {
    Qubit(usize),
    Both,
}

/// `ρ → (1−p)ρ + p·(I/d ⊗ Tr_sub ρ)` on the chosen subsystem.
pub fn depolarizing_superop(p: f64, target: DepolarizingTarget) -> Superoperator {
    let paulis = [pauli_i(), pauli_x(), pauli_y(), pauli_z()];
    let mut kraus = vec![Mat4::identity() * c64((1.0 - p).sqrt(), 0.0)];
    match target {
        DepolarizingTarget::Qubit(q) => {
            let w = c64((p / 4.0).sqrt(), 0.0);
            kraus.extend(paulis.iter().map(|s| lift(s, q) * w));
        }
        DepolarizingTarget::Both => {
            let w = c64((p / 16.0).sqrt(), 0.0);
            for a in &paulis {
                kraus.extend(paulis.iter().map(|b| kron(a, b) * w));
            }
        }
    }
    Superoperator::from_kraus(&kraus)
}

/// `(Re Tr(S_U†·S_E)/d + 1)/(d + 1)` with `d = 4`. Errors if the channel is
/// not CPTP.
pub fn avg_gate_fidelity(target: &Mat4, channel: &Superoperator) -> Result<f64> {
    channel.validate()?;
    Ok(avg_gate_fidelity_unchecked(target, channel))
}

/// [`avg_gate_fidelity`] without the CPTP check.
pub fn avg_gate_fidelity_unchecked(target: &Mat4, channel: &Superoperator) -> f64 {
    let su = unitary_superop(target);
    let tr: C64 = su.matrix.iter().zip(channel.matrix.iter()).map(|(a, b)| a.conj() * b).sum();
    (tr.re / 4.0 + 1.0) / 5.0
}

/// Relaxation and depolarizing parameters for a device.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub name: String,
    /// `f64::INFINITY` disables relaxation.
    pub t1_us: f64,
    pub durations: Durations,
    /// Nominal native two-qubit gate duration.
    pub native_ns: f64,
    pub p_x: f64,
    pub p_2q: f64,
}

/// Partial noise description as read from a config file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseConfig {
    preset: Option<String>,
    name: Option<String>,
    t1_us: Option<f64>,
    p_x: Option<f64>,
    p_2q: Option<f64>,
    #[serde(default)]
    durations_ns: DurationConfig,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DurationConfig {
    rz: Option<f64>,
    rx: Option<f64>,
    native: Option<f64>,
}

impl NoiseModel {
    pub const PRESETS: [&'static str; 7] =
        ["tableI-1", "tableI-2", "tableI-relax", "tableII-1", "tableII-2", "tableII-relax", "unitary-only"];

    fn table(name: &str, rz: f64, native: f64, p_x: f64, p_2q: f64) -> Self {
        NoiseModel {
            name: name.into(),
            t1_us: 25.0,
            durations: Durations { rz_ns: rz, rx_ns: 25.0 },
            native_ns: native,
            p_x,
            p_2q,
        }
    }

    /// Named parameter sets. `tableI-*` target a √iSWAP† device, `tableII-*`
    /// a CZ device; `*-relax` keep relaxation and drop depolarizing.
    pub fn preset(name: &str) -> Result<Self> {
        Ok(match name {
            "tableI-1" => Self::table(name, 10.0, 12.0, 0.0003, 0.0048),
            "tableI-2" => Self::table(name, 10.0, 12.0, 0.001, 0.005),
            "tableI-relax" => Self::table(name, 10.0, 12.0, 0.0, 0.0),
            "tableII-1" => Self::table(name, 0.0, 15.0, 0.0003, 0.0047),
            "tableII-2" => Self::table(name, 0.0, 15.0, 0.001, 0.005),
            "tableII-relax" => Self::table(name, 0.0, 15.0, 0.0, 0.0),
            "unitary-only" => NoiseModel { t1_us: f64::INFINITY, p_x: 0.0, p_2q: 0.0, ..Self::table(name, 10.0, 12.0, 0.0, 0.0) },
            other => return Err(Error::Config(format!("unknown noise preset `{other}`"))),
        })
    }

    pub fn is_noiseless(&self) -> bool {
        self.t1_us.is_infinite() && self.p_x == 0.0 && self.p_2q == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if self.t1_us.is_nan() || self.t1_us <= 0.0 {
            return Err(Error::Config(format!("t1_us must be positive, got {}", self.t1_us)));
        }
        if !prob(self.p_x) || !prob(self.p_2q) {
            return Err(Error::Config("depolarizing probabilities must lie in [0, 1]".into()));
        }
        let d = [self.durations.rz_ns, self.durations.rx_ns, self.native_ns];
        if d.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Config("durations must be finite and non-negative".into()));
        }
        Ok(())
    }

    /// Parses a TOML document. Keys: `preset`, `name`, `t1_us`, `p_x`, `p_2q`
    /// and a `[durations_ns]` table with `rz`, `rx`, `native`. Explicit keys
    /// override the preset; without a preset every key is required.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        Self::from_config(s, None)
    }

    fn from_config(s: &str, fallback_name: Option<String>) -> Result<Self> {
        let cfg: NoiseConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        let base = cfg.preset.as_deref().map(Self::preset).transpose()?;
        let need = |what: &str| Error::Config(format!("missing `{what}` and no preset given"));
        let pick = |v: Option<f64>, b: Option<f64>, what: &str| v.or(b).ok_or_else(|| need(what));
        let b = base.as_ref();
        let m = NoiseModel {
            name: cfg.name.or(fallback_name).or(b.map(|b| b.name.clone())).unwrap_or_else(|| "custom".into()),
            t1_us: pick(cfg.t1_us, b.map(|b| b.t1_us), "t1_us")?,
            durations: Durations {
                rz_ns: pick(cfg.durations_ns.rz, b.map(|b| b.durations.rz_ns), "durations_ns.rz")?,
                rx_ns: pick(cfg.durations_ns.rx, b.map(|b| b.durations.rx_ns), "durations_ns.rx")?,
            },
            native_ns: pick(cfg.durations_ns.native, b.map(|b| b.native_ns), "durations_ns.native")?,
            p_x: pick(cfg.p_x, b.map(|b| b.p_x), "p_x")?,
            p_2q: pick(cfg.p_2q, b.map(|b| b.p_2q), "p_2q")?,
        };
        m.validate()?;
        Ok(m)
    }

    /// Like [`Self::from_toml_str`]; the name defaults to the file stem.
    pub fn from_file(path: &Path) -> Result<Self> {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        Self::from_config(&std::fs::read_to_string(path)?, stem)
    }

    /// Preset name or path to a TOML file.
    pub fn resolve(spec: &str) -> Result<Self> {
        if Self::PRESETS.contains(&spec) {
            Self::preset(spec)
        } else {
            Self::from_file(Path::new(spec))
        }
    }
}

/// Noisy channel of a circuit. Each moment applies its unitary, then
/// amplitude damping on both qubits for the slot duration, then depolarizing
/// after every Rx, Hadamard and native gate.
pub fn circuit_superop(c: &Circuit, natives: &NativeSet, nm: &NoiseModel) -> Result<Superoperator> {
    let mut m = Mat16::identity();
    for moment in c.moments() {
        let u = moment.unitary(natives)?;
        let mut s = kron4(&u.conjugate(), &u);
        let slot = moment.slot_duration(&nm.durations, natives)?;
        if slot > 0.0 && nm.t1_us.is_finite() {
            for q in 0..2 {
                s = amplitude_damping_superop(slot, nm.t1_us, q).matrix * s;
            }
        }
        for op in moment.ops() {
            let dep = match (op.kind(), op.site()) {
                (GateKind::Rx(_) | GateKind::Hadamard, Site::Qubit(q)) => Some((nm.p_x, DepolarizingTarget::Qubit(q))),
                (GateKind::Native(_), _) => Some((nm.p_2q, DepolarizingTarget::Both)),
                _ => None,
            };
            if let Some((p, t)) = dep {
                if p > 0.0 {
                    s = depolarizing_superop(p, t).matrix * s;
                }
            }
        }
        m = s * m;
    }
    Ok(Superoperator { matrix: m })
}

/// Average gate fidelity of a noisy circuit against `target`.
pub fn circuit_fidelity(target: &Mat4, c: &Circuit, natives: &NativeSet, nm: &NoiseModel) -> Result<f64> {
    avg_gate_fidelity(target, &circuit_superop(c, natives, nm)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fidelity::unitary_fidelity;
    use crate::gates::{circuit_unitary, cphase, iswap_via_sqrt_iswap, sqrt_iswap_dag, HardwareGateModel};
    use crate::linalg::haar_u4;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_superop_matches_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = haar_u4(&mut rng);
        let rho = {
            let v = haar_u4(&mut rng).column(0).into_owned();
            v * v.adjoint()
        };
        let s = unitary_superop(&u);
        assert!((s.apply(&rho) - u * rho * u.adjoint()).norm() < 1e-12);
        assert_eq!(unitary_superop(&Mat4::identity()).matrix, Mat16::identity());
        s.validate().unwrap();
    }

    #[test]
    fn superop_fidelity_equals_unitary_fidelity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let (a, b) = (haar_u4(&mut rng), haar_u4(&mut rng));
            let f = avg_gate_fidelity(&a, &unitary_superop(&b)).unwrap();
            assert!((f - unitary_fidelity(&a, &b)).abs() < 1e-12);
        }
    }

    #[test]
    fn damping_values() {
        assert!((damping_probability(12.0, 25.0) - 4.79885e-4).abs() < 1e-9);
        assert_eq!(amplitude_damping_superop(0.0, 25.0, 0).matrix, Mat16::identity());
        let s = amplitude_damping_superop(1e12, 25.0, 1);
        let rho = Mat4::from_element(c64(0.25, 0.0));
        let out = s.apply(&rho);
        let want = kron(&Mat2::from_element(c64(0.5, 0.0)), &Mat2::new(c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)));
        assert!((out - want).norm() < 1e-12);
    }

    #[test]
    fn coherence_decays_as_sqrt() {
        let p = damping_probability(40.0, 25.0);
        let s = amplitude_damping_superop(40.0, 25.0, 0);
        let mut rho = Mat4::zeros();
        rho[(0, 2)] = c64(1.0, 0.0);
        assert!((s.apply(&rho)[(0, 2)].re - (1.0 - p).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn depolarizing_values() {
        assert!((depolarizing_superop(0.0, DepolarizingTarget::Both).matrix - Mat16::identity()).norm() < 1e-15);
        let s = depolarizing_superop(0.0048, DepolarizingTarget::Both);
        let f = avg_gate_fidelity(&Mat4::identity(), &s).unwrap();
        assert!((1.0 - f - 0.0036).abs() < 1e-12);
        let full = depolarizing_superop(1.0, DepolarizingTarget::Both);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = haar_u4(&mut rng).column(0).into_owned();
        let out = full.apply(&(v * v.adjoint()));
        assert!((out - Mat4::identity() * c64(0.25, 0.0)).norm() < 1e-12);
        for q in 0..2 {
            depolarizing_superop(0.3, DepolarizingTarget::Qubit(q)).validate().unwrap();
        }
    }

    #[test]
    fn non_cp_map_is_rejected() {
        let mut m = Mat16::identity();
        m[(0, 0)] = c64(1.5, 0.0);
        m[(15, 0)] = c64(-0.5, 0.0);
        let s = Superoperator::from_matrix(m);
        assert!(avg_gate_fidelity(&Mat4::identity(), &s).is_err());
    }

    #[test]
    fn presets_and_config() {
        for name in NoiseModel::PRESETS {
            NoiseModel::preset(name).unwrap().validate().unwrap();
        }
        assert!(NoiseModel::preset("nope").is_err());
        let m = NoiseModel::from_toml_str("preset = \"tableI-1\"\np_x = 0.002\n[durations_ns]\nnative = 24.0\n").unwrap();
        assert_eq!((m.p_x, m.p_2q, m.native_ns, m.t1_us), (0.002, 0.0048, 24.0, 25.0));
        let full = "t1_us = 30.0\np_x = 0.0\np_2q = 0.01\n[durations_ns]\nrz = 0.0\nrx = 20.0\nnative = 15.0\n";
        assert_eq!(NoiseModel::from_toml_str(full).unwrap().name, "custom");
        assert!(NoiseModel::from_toml_str("t1_us = 30.0\n").is_err());
        assert!(NoiseModel::from_toml_str("preset = \"tableI-1\"\np_x = 2.0\n").is_err());
        assert!(NoiseModel::from_toml_str("preset = \"tableI-1\"\nbogus = 1\n").is_err());
    }

    #[test]
    fn circuit_channel_properties() {
        let hw = HardwareGateModel::new("n", sqrt_iswap_dag(), cphase(0.1), 12.0);
        let natives = NativeSet::single("n", hw);
        let c = iswap_via_sqrt_iswap(0.9, "n");
        let target = crate::gates::iswap(0.9);
        let clean = NoiseModel::preset("unitary-only").unwrap();
        let s = circuit_superop(&c, &natives, &clean).unwrap();
        let u = circuit_unitary(&c, &natives).unwrap();
        assert!((avg_gate_fidelity(&target, &s).unwrap() - unitary_fidelity(&target, &u)).abs() < 1e-12);
        let noisy = NoiseModel::preset("tableI-1").unwrap();
        let sn = circuit_superop(&c, &natives, &noisy).unwrap();
        sn.validate().unwrap();
        assert!(avg_gate_fidelity(&target, &sn).unwrap() < avg_gate_fidelity(&target, &s).unwrap());
        let twice = circuit_superop(&c.then(&c), &natives, &noisy).unwrap();
        assert!((twice.matrix - sn.then(&sn).matrix).norm() < 1e-12);
        assert_eq!(circuit_superop(&Circuit::new(), &natives, &noisy).unwrap(), Superoperator::identity());
    }

    #[test]
    fn file_models_are_named_after_the_file() {
        let path = std::env::temp_dir().join(format!("paramit-noise-{}.toml", std::process::id()));
        std::fs::write(&path, "preset = \"tableI-2\"\np_x = 0.002\n").unwrap();
        let nm = NoiseModel::resolve(path.to_str().unwrap()).unwrap();
        std::fs::remove_file(&path).unwrap();
        assert_eq!(nm.name, path.file_stem().unwrap().to_str().unwrap());
        assert_eq!((nm.p_x, nm.p_2q), (0.002, 0.005));
        assert_eq!(NoiseModel::from_toml_str("preset = \"tableI-2\"").unwrap().name, "tableI-2");
    }
}
