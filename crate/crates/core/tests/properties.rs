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


use std::f64::consts::{FRAC_PI_4, PI};

use proptest::prelude::*;

use paramit::fidelity::unitary_fidelity;
use paramit::gates::{
    circuit_unitary, cphase, cz, iswap, iswap_via_sqrt_iswap, rx, rz, sqrt_iswap_dag, swap, u_a, zxz, Circuit,
    HardwareGateModel, NativeSet,
};
use paramit::kak::{in_weyl_chamber, kak_decompose, local_invariants, magic_basis};
use paramit::linalg::{eig_unitary_symmetric, kron, phase_distance};
use paramit::mitigate::{kak_approx, unmitigated_fidelity};
use paramit::noise::{
    amplitude_damping_superop, avg_gate_fidelity, circuit_fidelity, depolarizing_superop, unitary_superop,
    DepolarizingTarget, NoiseModel,
};
use paramit::recompile::{derive_seed, weyl_grid};
use paramit::{Mat2, Mat4};

fn local() -> impl Strategy<Value = Mat2> {
    (-PI..PI, -PI..PI, -PI..PI).prop_map(|(a, b, c)| zxz(a, b, c))
}

fn two_qubit() -> impl Strategy<Value = Mat4> {
    (local(), local(), local(), local(), -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_map(|(a, b, c, d, x, y, z)| kron(&a, &b) * u_a(x, y, z) * kron(&c, &d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kak_recomposes(u in two_qubit()) {
        let k = kak_decompose(&u).unwrap();
        prop_assert!(phase_distance(&u, &k.recompose()) < 1e-9);
        prop_assert!(in_weyl_chamber(k.triple(), 1e-9));
    }

    #[test]
    fn invariants_ignore_dressing(u in two_qubit(), a in local(), b in local(), c in local(), d in local()) {
        let t0 = local_invariants(&u).unwrap();
        let t1 = local_invariants(&(kron(&a, &b) * u * kron(&c, &d))).unwrap();
        prop_assert!((t0.0 - t1.0).abs() < 1e-8 && (t0.1 - t1.1).abs() < 1e-8 && (t0.2 - t1.2).abs() < 1e-8);
    }

    #[test]
    fn correction_never_hurts(e in two_qubit()) {
        let plan = kak_approx(&e).unwrap();
        prop_assert!(plan.predicted_fidelity >= unmitigated_fidelity(&e) - 1e-12);
        prop_assert!(plan.predicted_fidelity <= 1.0 + 1e-12);
    }

    #[test]
    fn noise_channels_are_cptp(ns in 0.0..1e5f64, t1 in 1.0..100.0f64, p in 0.0..=1.0f64, q in 0usize..2) {
        prop_assert!(amplitude_damping_superop(ns, t1, q).validate().is_ok());
        prop_assert!(depolarizing_superop(p, DepolarizingTarget::Qubit(q)).validate().is_ok());
        let ch = depolarizing_superop(p, DepolarizingTarget::Both).then(&amplitude_damping_superop(ns, t1, 1 - q));
        prop_assert!(ch.validate().is_ok());
    }

    #[test]
    fn channel_fidelity_matches_unitary_fidelity(u in two_qubit(), v in two_qubit()) {
        let f = avg_gate_fidelity(&u, &unitary_superop(&v)).unwrap();
        prop_assert!((f - unitary_fidelity(&u, &v)).abs() < 1e-12);
    }

    #[test]
    fn noise_only_lowers_fidelity(u in two_qubit(), p in 0.0..0.5f64, ns in 0.0..1e3f64) {
        let ch = unitary_superop(&u).then(&depolarizing_superop(p, DepolarizingTarget::Both)).then(&amplitude_damping_superop(ns, 25.0, 0));
        let f = avg_gate_fidelity(&u, &ch).unwrap();
        prop_assert!((0.2 - 1e-12..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn circuit_text_roundtrip(a in -PI..PI, b in -PI..PI, c in -PI..PI) {
        let text = format!("RZ(q0,{a}) RX(q1,{b})\nNAT(q0,q1,hw)\nRZ(q1,{c})\n");
        let circ: Circuit = text.parse().unwrap();
        let again: Circuit = circ.to_string().parse().unwrap();
        let set = NativeSet::single("hw", HardwareGateModel::perfect("hw", sqrt_iswap_dag(), 12.0));
        prop_assert!(phase_distance(&circuit_unitary(&circ, &set).unwrap(), &circuit_unitary(&again, &set).unwrap()) < 1e-14);
        let direct = kron(&Mat2::identity(), &rz(c)) * sqrt_iswap_dag() * kron(&rz(a), &rx(b));
        prop_assert!(phase_distance(&circuit_unitary(&circ, &set).unwrap(), &direct) < 1e-12);
    }

    #[test]
    fn seeds_are_spread(seed in any::<u64>(), i in 0u64..1_000_000) {
        prop_assert_ne!(derive_seed(seed, i), derive_seed(seed, i + 1));
    }
}

#[test]
fn symmetric_eigensolver_handles_degeneracy() {
    let b = magic_basis();
    let to_magic = |u: &Mat4| {
        let m = b.adjoint() * u * b;
        m.transpose() * m
    };
    let mut inputs: Vec<Mat4> = vec![Mat4::identity(), cz(), swap(), iswap(PI / 2.0), cphase(PI / 3.0), sqrt_iswap_dag()];
    inputs.push(kron(&rz(0.3), &rx(1.1)));
    let mut state = 1u64;
    let mut next = || {
        state = derive_seed(state, 0);
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 * PI - PI
    };
    while inputs.len() < 1000 {
        let (x, y, z) = match inputs.len() % 4 {
            0 => (next(), next(), next()),
            1 => (next(), 0.0, 0.0),
            2 => {
                let t = next();
                (t, t, 0.0)
            }
            _ => (FRAC_PI_4, FRAC_PI_4, next()),
        };
        let l = kron(&zxz(next(), next(), next()), &zxz(next(), next(), next()));
        inputs.push(l * u_a(x, y, z));
    }
    for u in &inputs {
        let m = to_magic(u);
        let eig = eig_unitary_symmetric(&m).unwrap();
        assert!((eig.reconstruct() - m).norm() < 1e-9);
        let o = eig.vectors;
        assert!((o.transpose() * o - nalgebra::Matrix4::identity()).norm() < 1e-9);
    }
}

#[test]
fn weyl_grid_counts() {
    assert_eq!(weyl_grid(20).len(), 3309);
    assert_eq!(weyl_grid(10).len(), 504);
    let n = |d: usize| (0..=d).map(|i| (0..=i).map(|j| 2 * j + 1).sum::<usize>()).sum::<usize>() - 2;
    for d in 1..12 {
        assert_eq!(weyl_grid(d).len(), n(d));
    }
}

#[test]
fn iswap_template_golden_under_table_noise() {
    let nm = NoiseModel::preset("tableI-1").unwrap();
    let set = NativeSet::single("hw", HardwareGateModel::perfect("hw", sqrt_iswap_dag(), nm.native_ns));
    let theta = PI / 6.0;
    let c = iswap_via_sqrt_iswap(theta, "hw");
    assert!(unitary_fidelity(&iswap(theta), &circuit_unitary(&c, &set).unwrap()) > 1.0 - 1e-14);
    let f = circuit_fidelity(&iswap(theta), &c, &set, &nm).unwrap();
    assert_eq!(c.duration(&nm.durations, &set).unwrap(), 54.0);
    assert!((f - 0.9911081371187127).abs() < 1e-12, "{f}");
}
