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

//! Named gates, parameterized rotations and the timed two-qubit circuit model.

mod circuit;
mod templates;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::linalg::{c64, cis, kron, pauli_product_exp, Mat2, Mat4, PauliPair};

pub use circuit::{circuit_unitary, Circuit, Durations, GateKind, GateOp, Moment, Site};
pub use templates::{
    apply_local_correction, cphase_via_cz, iswap_single_native, iswap_via_sqrt_iswap, ISWAP_OUTER_RZ,
};

/// `R_Z(θ) = exp(−iθZ/2)`.
pub fn rz(theta: f64) -> Mat2 {
    Mat2::new(cis(-theta / 2.0), c64(0.0, 0.0), c64(0.0, 0.0), cis(theta / 2.0))
}

/// `R_X(θ) = exp(−iθX/2)`.
pub fn rx(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    Mat2::new(c64(c, 0.0), c64(0.0, -s), c64(0.0, -s), c64(c, 0.0))
}

/// `R_Y(θ) = exp(−iθY/2)`.
pub fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    Mat2::new(c64(c, 0.0), c64(-s, 0.0), c64(s, 0.0), c64(c, 0.0))
}

/// Hadamard as realized on hardware: `R_Z(π/2)·R_X(π/2)·R_Z(π/2)` (equal to H up to
/// a global phase).
pub fn hadamard() -> Mat2 {
    let h = std::f64::consts::FRAC_PI_2;
    rz(h) * rx(h) * rz(h)
}

/// Single-qubit Z-X-Z Euler rotation `R_Z(c)·R_X(b)·R_Z(a)` (`a` acts first).
pub fn zxz(a: f64, b: f64, c: f64) -> Mat2 {
    rz(c) * rx(b) * rz(a)
}

/// Euler angles `(a, b, c)` with `u ≃ R_Z(c)·R_X(b)·R_Z(a)` up to global phase.
pub fn zxz_angles(u: &Mat2) -> (f64, f64, f64) {
    let (su, _) = crate::linalg::to_su2(u);
    // su = [[p, -conj(q)], [q, conj(p)]]
    let p = su[(0, 0)];
    let q = su[(1, 0)];
    let b = 2.0 * q.norm().atan2(p.norm());
    let sum = if p.norm() > 1e-12 { -2.0 * p.arg() } else { 0.0 };
    let diff = if q.norm() > 1e-12 {
        2.0 * (q.arg() + std::f64::consts::FRAC_PI_2)
    } else {
        0.0
    };
    // a + c = sum, c - a = diff
    let a = 0.5 * (sum - diff);
    let c = 0.5 * (sum + diff);
    (a, b, c)
}

/// iSWAP-like gate `iSWAP(θ)`, acting as `exp(−iθσx)` on span{|01⟩, |10⟩}.
pub fn iswap(theta: f64) -> Mat4 {
    let (s, c) = theta.sin_cos();
    let mut m = Mat4::identity();
    m[(1, 1)] = c64(c, 0.0);
    m[(2, 2)] = c64(c, 0.0);
    m[(1, 2)] = c64(0.0, -s);
    m[(2, 1)] = c64(0.0, -s);
    m
}

/// `√iSWAP† = iSWAP(π/4)`.
pub fn sqrt_iswap_dag() -> Mat4 {
    iswap(FRAC_PI_4)
}

/// `CPhase(φ) = diag(1, 1, 1, e^{−iφ})`.
pub fn cphase(phi: f64) -> Mat4 {
    let mut m = Mat4::identity();
    m[(3, 3)] = cis(-phi);
    m
}

/// `CZ = CPhase(π)`.
pub fn cz() -> Mat4 {
    cphase(std::f64::consts::PI)
}

pub fn swap() -> Mat4 {
    let mut m = Mat4::zeros();
    m[(0, 0)] = c64(1.0, 0.0);
    m[(1, 2)] = c64(1.0, 0.0);
    m[(2, 1)] = c64(1.0, 0.0);
    m[(3, 3)] = c64(1.0, 0.0);
    m
}

/// General excitation-number-preserving gate `U_NP(θ, ξ, χ, η, φ)` (fSim family).
pub fn u_np(theta: f64, xi: f64, chi: f64, eta: f64, phi: f64) -> Mat4 {
    let (s, c) = theta.sin_cos();
    let mut m = Mat4::zeros();
    m[(0, 0)] = c64(1.0, 0.0);
    m[(1, 1)] = cis(-(eta + xi)) * c;
    m[(1, 2)] = c64(0.0, -1.0) * cis(-(eta - chi)) * s;
    m[(2, 1)] = c64(0.0, -1.0) * cis(-(eta + chi)) * s;
    m[(2, 2)] = cis(-(eta - xi)) * c;
    m[(3, 3)] = cis(-(2.0 * eta + phi));
    m
}

/// Phase-corrected pair rotation `R_Z(φ1, φ2) = e^{i(φ1+φ2)/2}·R_Z(φ1)⊗R_Z(φ2)`.
pub fn rz_pair(phi1: f64, phi2: f64) -> Mat4 {
    kron(&rz(phi1), &rz(phi2)) * cis((phi1 + phi2) / 2.0)
}

/// Factorized form of [`u_np`]: the single-qubit phases peeled off around
/// `U_NP(θ, 0, 0, 0, φ)`.
pub fn u_np_factorized(theta: f64, xi: f64, chi: f64, eta: f64, phi: f64) -> Mat4 {
    rz_pair(-eta, -eta)
        * rz_pair((xi - chi) / 2.0, (chi - xi) / 2.0)
        * u_np(theta, 0.0, 0.0, 0.0, phi)
        * rz_pair((xi + chi) / 2.0, -(xi + chi) / 2.0)
}

/// Canonical entangling core `U_A(α, β, γ) = exp[i(αXX + βYY + γZZ)]`.
pub fn u_a(alpha: f64, beta: f64, gamma: f64) -> Mat4 {
    pauli_product_exp(alpha, PauliPair::XX)
        * pauli_product_exp(beta, PauliPair::YY)
        * pauli_product_exp(gamma, PauliPair::ZZ)
}

/// A calibrated two-qubit gate together with its coherent error.
///
/// The hardware implements `parasitic · ideal`.
#[derive(Clone, Debug)]
pub struct HardwareGateModel {
    pub label: String,
    pub ideal: Mat4,
    pub parasitic: Mat4,
    pub duration_ns: f64,
}

impl HardwareGateModel {
    pub fn new(label: impl Into<String>, ideal: Mat4, parasitic: Mat4, duration_ns: f64) -> Self {
        HardwareGateModel { label: label.into(), ideal, parasitic, duration_ns }
    }

    /// Parasitic-free model.
    pub fn perfect(label: impl Into<String>, ideal: Mat4, duration_ns: f64) -> Self {
        Self::new(label, ideal, Mat4::identity(), duration_ns)
    }

    /// The unitary the hardware actually applies.
    pub fn effective(&self) -> Mat4 {
        self.parasitic * self.ideal
    }
}

/// Native two-qubit gates supported by the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NativeGate {
    /// `√iSWAP† = iSWAP(π/4)`, with parasitic `CPhase(ψ)`.
    SqrtIswapDag,
    /// `CZ = CPhase(π)`, with over-rotation `CPhase(ψ)`.
    Cz,
}

impl NativeGate {
    pub fn ideal(self) -> Mat4 {
        match self {
            NativeGate::SqrtIswapDag => sqrt_iswap_dag(),
            NativeGate::Cz => cz(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NativeGate::SqrtIswapDag => "sqrt-iswap-dag",
            NativeGate::Cz => "cz",
        }
    }

    /// Hardware model with a parasitic `CPhase(psi)` (radians).
    pub fn with_parasitic(self, psi: f64, duration_ns: f64) -> HardwareGateModel {
        HardwareGateModel::new(self.name(), self.ideal(), cphase(psi), duration_ns)
    }
}

/// Lookup table from native model id to its hardware model.
#[derive(Clone, Debug, Default)]
pub struct NativeSet {
    models: BTreeMap<String, HardwareGateModel>,
}

impl NativeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(id: impl Into<String>, model: HardwareGateModel) -> Self {
        let mut set = Self::new();
        set.insert(id, model);
        set
    }

    pub fn insert(&mut self, id: impl Into<String>, model: HardwareGateModel) {
        self.models.insert(id.into(), model);
    }

    pub fn get(&self, id: &str) -> Result<&HardwareGateModel> {
        self.models.get(id).ok_or_else(|| Error::UnresolvedModel(id.to_string()))
    }
}

/// Parses an angle such as `0.3`, `pi`, `-3pi/4`, `pi/40` or `9deg`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("bad angle '{s}'"));
    let t: String = s.trim().replace('π', "pi").chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(deg) = t.strip_suffix("deg") {
        return deg.parse::<f64>().map(f64::to_radians).map_err(|_| bad());
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            c * std::f64::consts::PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let v = value / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Parses a gate description: `identity`, `cz`, `swap`, `sqrt-iswap-dag`,
/// `iswap(θ)`, `cphase(φ)`, `ua(α,β,γ)` or `unp(θ,ξ,χ,η,φ)`.
pub fn parse_gate_spec(s: &str) -> Result<Mat4> {
    let t = s.trim().to_ascii_lowercase();
    let (name, args) = match t.split_once('(') {
        Some((n, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(|| Error::Parse(format!("missing ')' in '{s}'")))?;
            let args = inner.split(',').map(parse_angle).collect::<Result<Vec<f64>>>()?;
            (n.trim().to_string(), args)
        }
        None => (t.clone(), Vec::new()),
    };
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(Error::Parse(format!("'{name}' takes {n} argument(s), got {}", args.len())))
        }
    };
    match name.as_str() {
        "identity" | "i" => arity(0).map(|_| Mat4::identity()),
        "cz" => arity(0).map(|_| cz()),
        "swap" => arity(0).map(|_| swap()),
        "sqrt-iswap-dag" => arity(0).map(|_| sqrt_iswap_dag()),
        "iswap" => arity(1).map(|_| iswap(args[0])),
        "cphase" => arity(1).map(|_| cphase(args[0])),
        "ua" => arity(3).map(|_| u_a(args[0], args[1], args[2])),
        "unp" => arity(5).map(|_| u_np(args[0], args[1], args[2], args[3], args[4])),
        other => Err(Error::Parse(format!("unknown gate '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_u2, phase_distance, unitarity_deviation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn iswap_special_angles() {
        assert_eq!(iswap(0.0), Mat4::identity());
        let m = iswap(FRAC_PI_2);
        assert!(m[(1, 1)].norm() < 1e-15 && m[(2, 2)].norm() < 1e-15);
        assert!((m[(1, 2)] - c64(0.0, -1.0)).norm() < 1e-15);
        assert!((m[(2, 1)] - c64(0.0, -1.0)).norm() < 1e-15);
        let s = sqrt_iswap_dag();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s[(1, 1)] - c64(h, 0.0)).norm() < 1e-15);
        assert!((s[(1, 2)] - c64(0.0, -h)).norm() < 1e-15);
    }

    #[test]
    fn cphase_special_angles() {
        assert_eq!(cphase(0.0), Mat4::identity());
        let z = cz();
        assert!((z[(3, 3)] - c64(-1.0, 0.0)).norm() < 1e-15);
        let p = cphase(PI / 20.0);
        assert!((p[(3, 3)] - cis(-PI / 20.0)).norm() < 1e-15);
    }

    #[test]
    fn angle_and_gate_parsing() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-3pi/4").unwrap(), -3.0 * PI / 4.0);
        assert_eq!(parse_angle("pi/40").unwrap(), PI / 40.0);
        assert_eq!(parse_angle("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("9deg").unwrap(), 9f64.to_radians());
        assert_eq!(parse_angle(" 0.25 ").unwrap(), 0.25);
        assert!(parse_angle("pie").is_err() && parse_angle("1/0").is_err());
        assert_eq!(parse_gate_spec("iswap(pi/4)").unwrap(), sqrt_iswap_dag());
        assert_eq!(parse_gate_spec("CPhase(pi)").unwrap(), cz());
        assert_eq!(parse_gate_spec("ua(0.1, 0.2, 0.3)").unwrap(), u_a(0.1, 0.2, 0.3));
        assert!(parse_gate_spec("iswap").is_err());
        assert!(parse_gate_spec("foo(1)").is_err());
        assert!(parse_gate_spec("cphase(1").is_err());
    }

    #[test]
    fn u_np_reduces_to_named_gates() {
        for &t in &[0.1, 0.7, 2.9] {
            assert!((u_np(t, 0.0, 0.0, 0.0, 0.0) - iswap(t)).norm() < 1e-15);
            assert!((u_np(0.0, 0.0, 0.0, 0.0, t) - cphase(t)).norm() < 1e-15);
        }
    }

    #[test]
    fn u_np_factorization_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let v: Vec<f64> = (0..5).map(|_| rng.random_range(-PI..PI)).collect();
            let direct = u_np(v[0], v[1], v[2], v[3], v[4]);
            let factored = u_np_factorized(v[0], v[1], v[2], v[3], v[4]);
            assert!((direct - factored).norm() < 1e-12);
        }
    }

    #[test]
    fn u_a_named_forms() {
        assert!((u_a(0.0, 0.0, 0.0) - Mat4::identity()).norm() < 1e-15);
        for &t in &[0.2, 1.0, 2.5] {
            assert!(phase_distance(&u_a(-t / 2.0, -t / 2.0, 0.0), &iswap(t)) < 1e-14);
            let rzz = kron(&rz(-t / 2.0), &rz(-t / 2.0));
            assert!(phase_distance(&(rzz * u_a(0.0, 0.0, -t / 4.0)), &cphase(t)) < 1e-14);
        }
        // U_NP(θ,0,0,0,φ) = [R_Z(−φ/2)⊗R_Z(−φ/2)]·U_A(−θ/2,−θ/2,−φ/4)
        let (t, p) = (0.9, 0.4);
        let rzz = kron(&rz(-p / 2.0), &rz(-p / 2.0));
        assert!(phase_distance(&(rzz * u_a(-t / 2.0, -t / 2.0, -p / 4.0)), &u_np(t, 0.0, 0.0, 0.0, p)) < 1e-14);
    }

    #[test]
    fn constructors_are_unitary_and_preserve_excitations() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let t: f64 = rng.random_range(-PI..PI);
            for m in [iswap(t), cphase(t), u_np(t, 0.3 * t, -t, 0.5, 2.0 * t), u_a(t, -0.5 * t, 0.2)] {
                assert!(unitarity_deviation(&m) < 1e-12);
            }
            for m in [iswap(t), cphase(t)] {
                for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)] {
                    assert_eq!(m[(i, j)], c64(0.0, 0.0));
                    assert_eq!(m[(j, i)], c64(0.0, 0.0));
                }
            }
            for m in [rz(t), rx(t), ry(t), hadamard(), zxz(t, 0.4, -t)] {
                assert!(unitarity_deviation(&m) < 1e-12);
            }
        }
    }

    #[test]
    fn hadamard_matches_standard_up_to_phase() {
        let h = hadamard();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let std_h = Mat2::new(c64(s, 0.0), c64(s, 0.0), c64(s, 0.0), c64(-s, 0.0));
        let ov: crate::C64 = h.iter().zip(std_h.iter()).map(|(a, b)| a.conj() * b).sum();
        assert!((ov.norm() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zxz_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let u = haar_u2(&mut rng);
            let (a, b, c) = zxz_angles(&u);
            let r = zxz(a, b, c);
            let ov: crate::C64 = r.iter().zip(u.iter()).map(|(x, y)| x.conj() * y).sum();
            assert!((ov.norm() - 2.0).abs() < 1e-12);
        }
        for u in [rz(0.7), rx(1.1), Mat2::identity()] {
            let (a, b, c) = zxz_angles(&u);
            let r = zxz(a, b, c);
            let ov: crate::C64 = r.iter().zip(u.iter()).map(|(x, y)| x.conj() * y).sum();
            assert!((ov.norm() - 2.0).abs() < 1e-12);
        }
        let (_, b, _) = zxz_angles(&rz(0.3));
        assert!(b.abs() < 1e-15);
    }

    #[test]
    fn hardware_model_effective_order() {
        let m = NativeGate::SqrtIswapDag.with_parasitic(0.2, 12.0);
        assert!((m.effective() - cphase(0.2) * sqrt_iswap_dag()).norm() < 1e-15);
        let set = NativeSet::single("nat", m);
        assert!(set.get("nat").is_ok());
        assert!(matches!(set.get("other"), Err(Error::UnresolvedModel(_))));
    }
}
