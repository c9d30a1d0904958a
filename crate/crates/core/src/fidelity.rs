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

//! Unitary (coherent-error-only) fidelity between two-qubit gates.

use crate::linalg::{trace_overlap, Mat4};

/// Hilbert-space dimension of two qubits.
pub const DIM: f64 = 4.0;

/// Average gate fidelity between two unitaries,
/// `(|Tr(U†V)|²/d + 1)/(d + 1)` with `d = 4`.
pub fn unitary_fidelity(target: &Mat4, actual: &Mat4) -> f64 {
    let t = trace_overlap(target, actual).norm_sqr();
    (t / DIM + 1.0) / (DIM + 1.0)
}

/// `1 − unitary_fidelity`, computed without cancellation near 1.
pub fn unitary_infidelity(target: &Mat4, actual: &Mat4) -> f64 {
    let t = trace_overlap(target, actual).norm_sqr();
    ((DIM * DIM - t) / (DIM * (DIM + 1.0))).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{cphase, iswap};

    #[test]
    fn identical_gates_have_unit_fidelity() {
        let u = iswap(0.4);
        assert!((unitary_fidelity(&u, &u) - 1.0).abs() < 1e-15);
        assert!(unitary_infidelity(&u, &u) < 1e-15);
    }

    #[test]
    fn cphase_against_identity() {
        for k in 1..=20 {
            let phi = k as f64 * 0.15;
            let f = unitary_fidelity(&Mat4::identity(), &cphase(phi));
            assert!((f - (3.0 * phi.cos() + 7.0) / 10.0).abs() < 1e-14);
            assert!((1.0 - f - unitary_infidelity(&Mat4::identity(), &cphase(phi))).abs() < 1e-15);
        }
    }
}
