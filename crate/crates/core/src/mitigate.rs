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

//! KAK-Approx: single-qubit mitigation of a coherent two-qubit error.
//!
//! For a hardware gate `U_H = U_E·U_T` with `U_E = K_El·U_A·K_Er`, the local
//! correction `K_EM = K_Er†·K_El†` applied after `U_H` gives the best
//! fidelity reachable with single-qubit gates alone, for every target.

use nalgebra::Matrix4;

use crate::error::Result;
use crate::fidelity::unitary_fidelity;
use crate::gates::zxz_angles;
use crate::kak::kak_decompose;
use crate::linalg::{check_unitary, kron, Mat2, Mat4, C64};

/// Single-qubit correction for one parasitic gate.
#[derive(Clone, Debug)]
pub struct MitigationPlan {
    /// `K_EM` as a 4×4 matrix.
    pub correction: Mat4,
    /// Per-qubit factors with `correction = factors[0]⊗factors[1]`.
    pub factors: [Mat2; 2],
    /// Z-X-Z angles `(a, b, c)` per qubit, `factor ∝ R_Z(c)·R_X(b)·R_Z(a)`.
    pub euler: [(f64, f64, f64); 2],
    pub predicted_fidelity: f64,
    pub parasitic_triple: (f64, f64, f64),
}

impl MitigationPlan {
    /// True when both factors are diagonal, i.e. the correction is a pair of
    /// Z rotations and can be folded into existing Rz layers.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.factors.iter().all(|f| f[(0, 1)].norm() < tol && f[(1, 0)].norm() < tol)
    }

    /// Rz angles per qubit for a diagonal correction.
    pub fn rz_angles(&self) -> [f64; 2] {
        self.factors.map(|f| (f[(1, 1)] / f[(0, 0)]).arg())
    }
}

/// Computes the KAK-Approx correction for `parasitic`.
pub fn kak_approx(parasitic: &Mat4) -> Result<MitigationPlan> {
    check_unitary(parasitic, "parasitic gate")?;
    let kak = kak_decompose(parasitic)?;
    let factors = [(kak.k3.adjoint() * kak.k1.adjoint()), (kak.k4.adjoint() * kak.k2.adjoint())];
    let correction = kron(&factors[0], &factors[1]);
    let t = kak.triple();
    Ok(MitigationPlan {
        correction,
        factors,
        euler: [zxz_angles(&factors[0]), zxz_angles(&factors[1])],
        predicted_fidelity: max_mitigated_fidelity(t.0, t.1, t.2),
        parasitic_triple: t,
    })
}

/// Fidelity of the bare hardware gate, `(|Tr U_E|²/4 + 1)/5`.
pub fn unmitigated_fidelity(parasitic: &Mat4) -> f64 {
    unitary_fidelity(&Mat4::identity(), parasitic)
}

/// Best fidelity reachable with single-qubit corrections for a parasitic
/// gate with canonical coordinates `(α, β, γ)`.
pub fn max_mitigated_fidelity(alpha: f64, beta: f64, gamma: f64) -> f64 {
    let c = (alpha.cos() * beta.cos() * gamma.cos()).powi(2);
    let s = (alpha.sin() * beta.sin() * gamma.sin()).powi(2);
    (1.0 + 4.0 * c + 4.0 * s) / 5.0
}

/// Closed form for a `CPhase(φ)` parasitic without mitigation.
pub fn cphase_unmitigated_fidelity(phi: f64) -> f64 {
    (3.0 * phi.cos() + 7.0) / 10.0
}

/// Closed form for a `CPhase(φ)` parasitic after KAK-Approx.
pub fn cphase_mitigated_fidelity(phi: f64) -> f64 {
    (2.0 * (phi / 2.0).cos() + 3.0) / 5.0
}

/// Leading-order infidelities `(3φ²/20, φ²/20)` for a small `CPhase(φ)`.
pub fn small_angle_infidelities(phi: f64) -> (f64, f64) {
    let p2 = phi * phi;
    (3.0 * p2 / 20.0, p2 / 20.0)
}

/// Ratio of the second to the first singular value of the realigned matrix.
/// Zero exactly when `m` is a tensor product.
pub fn product_residual(m: &Mat4) -> f64 {
    let r = Matrix4::<C64>::from_fn(|row, col| {
        let (i, j) = (row / 2, row % 2);
        let (k, l) = (col / 2, col % 2);
        m[(2 * i + k, 2 * j + l)]
    });
    let mut sv: Vec<f64> = r.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    if sv[0] == 0.0 {
        return 0.0;
    }
    sv[1] / sv[0]
}
