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

//! Fixed textbook decompositions used as the unmitigated baseline circuits.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::circuit::{Circuit, GateKind, GateOp, Moment, Site};
use super::zxz_angles;
use crate::linalg::Mat2;

/// Outer `R_Z` angle of the two-native iSWAP(θ) circuit (on qubit 0; qubit 1
/// gets the negated angle).
pub const ISWAP_OUTER_RZ: f64 = -FRAC_PI_4;

fn rz_layer(a0: f64, a1: f64) -> Vec<GateOp> {
    vec![GateOp::rz(0, a0), GateOp::rz(1, a1)]
}

/// `iSWAP(θ)` from two `√iSWAP†` gates and six `R_Z` rotations:
/// `D(−π/4)·N·D(π/2 − θ)·N·D(−π/4)` with `D(a) = R_Z(a)⊗R_Z(−a)`.
pub fn iswap_via_sqrt_iswap(theta: f64, model: &str) -> Circuit {
    let mid = FRAC_PI_2 - theta;
    let mut c = Circuit::new();
    c.push(rz_layer(ISWAP_OUTER_RZ, -ISWAP_OUTER_RZ)).unwrap();
    c.push(vec![GateOp::native(model)]).unwrap();
    c.push(rz_layer(mid, -mid)).unwrap();
    c.push(vec![GateOp::native(model)]).unwrap();
    c.push(rz_layer(ISWAP_OUTER_RZ, -ISWAP_OUTER_RZ)).unwrap();
    c
}

/// One-native circuits for the special angles `θ ∈ {π/4, −π/4, 3π/4, −3π/4}`
/// (mod 2π). Returns `None` for any other angle.
pub fn iswap_single_native(theta: f64, model: &str) -> Option<Circuit> {
    let t = theta.rem_euclid(2.0 * PI);
    let near = |x: f64| (t - x).abs() < 1e-12;
    // (R_Z on q0 before, R_Z on q0 after, R_Z on q1 after); R_Z(π) ≃ Z.
    let (before0, after0, after1) = if near(FRAC_PI_4) {
        (0.0, 0.0, 0.0)
    } else if near(2.0 * PI - FRAC_PI_4) {
        // iSWAP(−π/4) = (Z⊗I)·N·(Z⊗I)
        (PI, PI, 0.0)
    } else if near(3.0 * FRAC_PI_4) {
        // iSWAP(3π/4) = iSWAP(π)·iSWAP(−π/4) = (I⊗Z)·N·(Z⊗I)
        (PI, 0.0, PI)
    } else if near(2.0 * PI - 3.0 * FRAC_PI_4) {
        // iSWAP(−3π/4) = iSWAP(−π)·N = (Z⊗Z)·N
        (0.0, PI, PI)
    } else {
        return None;
    };
    let mut c = Circuit::new();
    c.push(rz_layer(before0, 0.0)).unwrap();
    c.push(vec![GateOp::native(model)]).unwrap();
    c.push(rz_layer(after0, after1)).unwrap();
    Some(c)
}

/// `CPhase(φ)` from two CZ gates:
/// `[R_Z(−φ/2)⊗R_Z(−φ/2)]·(I⊗H)·CZ·(I⊗R_X(φ/2))·CZ·(I⊗H)`.
pub fn cphase_via_cz(phi: f64, model: &str) -> Circuit {
    let mut c = Circuit::new();
    c.push(vec![GateOp::h(1)]).unwrap();
    c.push(vec![GateOp::native(model)]).unwrap();
    c.push(vec![GateOp::rx(1, phi / 2.0)]).unwrap();
    c.push(vec![GateOp::native(model)]).unwrap();
    c.push(vec![GateOp::rz(0, -phi / 2.0), GateOp::h(1)]).unwrap();
    c.push(vec![GateOp::rz(1, -phi / 2.0)]).unwrap();
    c
}

fn diagonal_rz_angle(u: &Mat2) -> Option<f64> {
    if u[(0, 1)].norm() < 1e-12 && u[(1, 0)].norm() < 1e-12 {
        Some(u[(1, 1)].arg() - u[(0, 0)].arg())
    } else {
        None
    }
}

/// Apply the local correction `corr[0] ⊗ corr[1]` right after every native gate.
///
/// Diagonal corrections become `R_Z` angles merged into the next moment when the
/// qubit's next op is an `R_Z` (or the qubit is free there), so they cost no
/// extra gates. Anything else is inserted as explicit `R_Z·R_X·R_Z` moments.
pub fn apply_local_correction(circuit: &Circuit, corr: [Mat2; 2]) -> Circuit {
    let rz_angles = [diagonal_rz_angle(&corr[0]), diagonal_rz_angle(&corr[1])];
    let mut out: Vec<Moment> = Vec::new();
    let src = circuit.moments();
    let mut i = 0;
    while i < src.len() {
        out.push(src[i].clone());
        if !src[i].has_native() {
            i += 1;
            continue;
        }
        match rz_angles {
            [Some(a0), Some(a1)] => {
                let mut next = src.get(i + 1).filter(|m| !m.has_native()).cloned();
                let mut inserted = Vec::new();
                for (q, delta) in [(0usize, a0), (1usize, a1)] {
                    if delta.abs() < 1e-15 {
                        continue;
                    }
                    let merged = match next.as_mut() {
                        Some(m) => merge_rz(m, q, delta),
                        None => false,
                    };
                    if !merged {
                        inserted.push(GateOp::rz(q, delta));
                    }
                }
                if !inserted.is_empty() {
                    out.push(Moment::new(inserted).expect("disjoint qubits"));
                }
                if let Some(m) = next {
                    out.push(m);
                    i += 1;
                }
            }
            _ => {
                let angles = [zxz_angles(&corr[0]), zxz_angles(&corr[1])];
                out.push(Moment::new(vec![GateOp::rz(0, angles[0].0), GateOp::rz(1, angles[1].0)]).unwrap());
                out.push(Moment::new(vec![GateOp::rx(0, angles[0].1), GateOp::rx(1, angles[1].1)]).unwrap());
                out.push(Moment::new(vec![GateOp::rz(0, angles[0].2), GateOp::rz(1, angles[1].2)]).unwrap());
            }
        }
        i += 1;
    }
    Circuit::from_moments(out)
}

fn merge_rz(m: &mut Moment, q: usize, delta: f64) -> bool {
    let ops = m.ops_mut();
    match ops.iter().position(|op| op.site() == Site::Qubit(q)) {
        Some(idx) => match ops[idx].kind_mut() {
            GateKind::Rz(a) => {
                *a += delta;
                true
            }
            GateKind::Idle(_) => {
                ops[idx] = GateOp::rz(q, delta);
                true
            }
            _ => false,
        },
        None => {
            ops.push(GateOp::rz(q, delta));
            true
        }
    }
}
