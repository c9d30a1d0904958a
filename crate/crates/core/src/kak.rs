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

//! KAK (Cartan) decomposition and Weyl-chamber canonicalization.
//!
//! Any two-qubit unitary factors as `g·(k1⊗k2)·U_A(α,β,γ)·(k3⊗k4)`. The
//! decomposition goes through the magic basis, where local gates become real
//! orthogonal matrices and `U_A` becomes diagonal.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::Matrix4;

use crate::error::Result;
use crate::gates::{rx, ry, rz, u_a};
use crate::linalg::{
    c64, check_unitary, eig_unitary_symmetric, kron, pauli_i, pauli_x, pauli_y, pauli_z, phase_distance, to_su2,
    to_su4, trace_overlap, Mat2, Mat4, C64,
};

/// Tolerance used to decide that a coordinate sits on a chamber face.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Result of [`kak_decompose`].
#[derive(Clone, Debug)]
pub struct KakDecomposition {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub k1: Mat2,
    pub k2: Mat2,
    pub k3: Mat2,
    pub k4: Mat2,
    pub global_phase: C64,
}

impl KakDecomposition {
    pub fn triple(&self) -> (f64, f64, f64) {
        (self.alpha, self.beta, self.gamma)
    }

    /// Left local factor `K_l = k1⊗k2`.
    pub fn left(&self) -> Mat4 {
        kron(&self.k1, &self.k2)
    }

    /// Right local factor `K_r = k3⊗k4`.
    pub fn right(&self) -> Mat4 {
        kron(&self.k3, &self.k4)
    }

    pub fn core(&self) -> Mat4 {
        u_a(self.alpha, self.beta, self.gamma)
    }

    pub fn recompose(&self) -> Mat4 {
        self.left() * self.core() * self.right() * self.global_phase
    }
}

/// The magic basis, columns ordered so that `B†·U_A·B` is diagonal.
pub fn magic_basis() -> Mat4 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (o, z, i) = (c64(s, 0.0), c64(0.0, 0.0), c64(0.0, s));
    Mat4::new(o, z, z, i, z, i, o, z, z, i, -o, z, o, z, z, -i)
}

/// Splits a 4×4 tensor product into two special-unitary factors and a phase,
/// `m = phase·(a⊗b)`. The result is meaningful only when `m` is (close to)
/// a product of local unitaries.
pub fn split_local(m: &Mat4) -> (Mat2, Mat2, C64) {
    let block = |i: usize, j: usize| m.fixed_view::<2, 2>(2 * i, 2 * j).into_owned();
    let (mut bi, mut bj, mut best) = (0, 0, -1.0);
    for i in 0..2 {
        for j in 0..2 {
            let n = block(i, j).norm();
            if n > best {
                (bi, bj, best) = (i, j, n);
            }
        }
    }
    let (b, _) = to_su2(&block(bi, bj));
    let mut a = Mat2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            a[(i, j)] = trace_overlap(&b, &block(i, j)) / 2.0;
        }
    }
    let (a, _) = to_su2(&a);
    let phase = trace_overlap(&kron(&a, &b), m) / 4.0;
    (a, b, phase)
}

/// Local gates accumulated while moving a triple into the chamber.
///
/// Invariant: `(l0⊗l1)·U_A(input)·(r0⊗r1) ∝ U_A(current)`.
struct Fixup {
    t: [f64; 3],
    l: [Mat2; 2],
    r: [Mat2; 2],
}

impl Fixup {
    fn left(&mut self, g: Mat2) {
        self.l = [g * self.l[0], g * self.l[1]];
    }

    fn conjugate(&mut self, g0: Mat2, g1: Mat2) {
        self.l = [g0 * self.l[0], g1 * self.l[1]];
        self.r = [self.r[0] * g0.adjoint(), self.r[1] * g1.adjoint()];
    }

    /// Shift coordinate `k` by `n·π/2`.
    fn shift(&mut self, k: usize, n: i64) {
        self.t[k] += n as f64 * FRAC_PI_2;
        if n.rem_euclid(2) == 1 {
            self.left([pauli_x(), pauli_y(), pauli_z()][k]);
        }
    }

    /// Negate the two coordinates other than `keep`.
    fn flip(&mut self, keep: usize) {
        let p = [pauli_x(), pauli_y(), pauli_z()][keep];
        self.conjugate(p, pauli_i());
        for k in 0..3 {
            if k != keep {
                self.t[k] = -self.t[k];
            }
        }
    }

    /// Exchange coordinates `i` and `j`.
    fn swap(&mut self, i: usize, j: usize) {
        let g = match (i.min(j), i.max(j)) {
            (0, 1) => rz(FRAC_PI_2),
            (1, 2) => rx(FRAC_PI_2),
            _ => ry(FRAC_PI_2),
        };
        self.conjugate(g, g);
        self.t.swap(i, j);
    }
}

/// Maps `(α, β, γ)` into the Weyl chamber `π/4 ≥ α ≥ β ≥ |γ|` (with `γ ≥ 0`
/// when `α = π/4`).
///
/// Returns the canonical triple and fixups `[f1, f2, f3, f4]` such that
/// `(f1⊗f2)·U_A(input)·(f3⊗f4)` equals `U_A(output)` up to global phase.
pub fn canonicalize(alpha: f64, beta: f64, gamma: f64) -> ((f64, f64, f64), [Mat2; 4]) {
    let id = pauli_i();
    let mut f = Fixup { t: [alpha, beta, gamma], l: [id, id], r: [id, id] };
    for k in 0..3 {
        let n = (f.t[k] / FRAC_PI_2).round() as i64;
        f.shift(k, -n);
    }
    for i in 0..3 {
        for j in (i + 1..3).rev() {
            if f.t[j].abs() > f.t[j - 1].abs() {
                f.swap(j - 1, j);
            }
        }
    }
    if f.t[0] < 0.0 {
        f.flip(1);
    }
    if f.t[1] < 0.0 {
        f.flip(0);
    }
    if (f.t[0] - FRAC_PI_4).abs() < BOUNDARY_TOL && f.t[2] < 0.0 {
        f.shift(0, -1);
        f.flip(1);
    }
    for x in f.t.iter_mut() {
        if *x == 0.0 {
            *x = 0.0;
        }
    }
    ((f.t[0], f.t[1], f.t[2]), [f.l[0], f.l[1], f.r[0], f.r[1]])
}

/// KAK decomposition of a two-qubit unitary with canonical coordinates.
pub fn kak_decompose(u: &Mat4) -> Result<KakDecomposition> {
    check_unitary(u, "two-qubit gate")?;
    let (su, g0) = to_su4(u);
    let b = magic_basis();
    let up = b.adjoint() * su * b;
    let eig = eig_unitary_symmetric(&(up.transpose() * up))?;
    let mut p: Matrix4<f64> = eig.vectors;
    if p.determinant() < 0.0 {
        p.column_mut(3).neg_mut();
    }
    let mut d = eig.eigenvalues.map(|l| l.arg() / 2.0);
    d[3] = -(d[0] + d[1] + d[2]);
    let pc = p.map(|x| c64(x, 0.0));
    let phases = Mat4::from_diagonal(&nalgebra::Vector4::from_fn(|k, _| C64::from_polar(1.0, -d[k])));
    let kp = up * pc * phases;
    let left = b * kp * b.adjoint();
    let right = b * pc.transpose() * b.adjoint();

    let raw = (
        (d[0] + d[1] - d[2] - d[3]) / 4.0,
        (-d[0] + d[1] - d[2] + d[3]) / 4.0,
        (d[0] - d[1] - d[2] + d[3]) / 4.0,
    );
    let (t, [f1, f2, f3, f4]) = canonicalize(raw.0, raw.1, raw.2);
    let (l1, l2, _) = split_local(&left);
    let (r1, r2, _) = split_local(&right);
    let (k1, _) = to_su2(&(l1 * f1.adjoint()));
    let (k2, _) = to_su2(&(l2 * f2.adjoint()));
    let (k3, _) = to_su2(&(f3.adjoint() * r1));
    let (k4, _) = to_su2(&(f4.adjoint() * r2));
    let mut kak = KakDecomposition { alpha: t.0, beta: t.1, gamma: t.2, k1, k2, k3, k4, global_phase: c64(1.0, 0.0) };
    let mut phase = trace_overlap(&kak.recompose(), u) / 4.0;
    phase /= phase.norm();
    if phase.re < 0.0 {
        kak.k1 = -kak.k1;
        phase = -phase;
    }
    kak.global_phase = phase;
    debug_assert!(phase_distance(&kak.recompose(), &(su * g0)) < 1e-8);
    Ok(kak)
}

/// Canonical coordinates only.
pub fn local_invariants(u: &Mat4) -> Result<(f64, f64, f64)> {
    kak_decompose(u).map(|k| k.triple())
}

/// Whether a triple satisfies the chamber inequalities within `tol`.
pub fn in_weyl_chamber(t: (f64, f64, f64), tol: f64) -> bool {
    let (a, b, c) = t;
    let ok = a <= FRAC_PI_4 + tol && a + tol >= b && b + tol >= c.abs();
    ok && !((a - FRAC_PI_4).abs() < tol && c < -tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{cphase, cz, iswap, swap};
    use crate::linalg::{haar_su4, haar_u2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn close(a: (f64, f64, f64), b: (f64, f64, f64), tol: f64) -> bool {
        (a.0 - b.0).abs() < tol && (a.1 - b.1).abs() < tol && (a.2 - b.2).abs() < tol
    }

    fn check_fixups(input: (f64, f64, f64)) -> (f64, f64, f64) {
        let (out, [f1, f2, f3, f4]) = canonicalize(input.0, input.1, input.2);
        let lhs = kron(&f1, &f2) * u_a(input.0, input.1, input.2) * kron(&f3, &f4);
        assert!(phase_distance(&lhs, &u_a(out.0, out.1, out.2)) < 1e-12, "{input:?} -> {out:?}");
        assert!(in_weyl_chamber(out, 1e-12), "{out:?}");
        out
    }

    #[test]
    fn canonicalize_named_triples() {
        let (t, f) = canonicalize(0.0, 0.0, 0.0);
        assert_eq!(t, (0.0, 0.0, 0.0));
        assert!(f.iter().all(|m| (m - pauli_i()).norm() < 1e-15));
        for &th in &[0.3, 1.0, PI / 2.0] {
            assert!(close(check_fixups((-th / 2.0, -th / 2.0, 0.0)), (th / 2.0, th / 2.0, 0.0), 1e-12));
        }
        for &phi in &[0.3, 2.0, PI] {
            assert!(close(check_fixups((0.0, 0.0, -phi / 4.0)), (phi / 4.0, 0.0, 0.0), 1e-12));
        }
        assert!(close(check_fixups((FRAC_PI_4, 0.2, -0.1)), (FRAC_PI_4, 0.2, 0.1), 1e-12));
    }

    #[test]
    fn canonicalize_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        use rand::Rng;
        for _ in 0..500 {
            let t = (rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            check_fixups(t);
        }
    }

    #[test]
    fn split_local_recovers_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let (a, b) = (haar_u2(&mut rng), haar_u2(&mut rng));
            let m = kron(&a, &b);
            let (x, y, ph) = split_local(&m);
            assert!((kron(&x, &y) * ph - m).norm() < 1e-12);
            assert!((x.determinant() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn named_gates() {
        let t = local_invariants(&Mat4::identity()).unwrap();
        assert!(close(t, (0.0, 0.0, 0.0), 1e-12));
        assert!(close(local_invariants(&cz()).unwrap(), (FRAC_PI_4, 0.0, 0.0), 1e-10));
        assert!(close(local_invariants(&iswap(PI / 2.0)).unwrap(), (FRAC_PI_4, FRAC_PI_4, 0.0), 1e-10));
        assert!(close(local_invariants(&swap()).unwrap(), (FRAC_PI_4, FRAC_PI_4, FRAC_PI_4), 1e-10));
        for k in 1..=20 {
            let phi = k as f64 * PI / 20.0;
            assert!(close(local_invariants(&cphase(phi)).unwrap(), (phi / 4.0, 0.0, 0.0), 1e-10));
            let th = k as f64 * PI / 40.0;
            assert!(close(local_invariants(&iswap(th)).unwrap(), (th / 2.0, th / 2.0, 0.0), 1e-10));
        }
    }

    #[test]
    fn roundtrip_and_determinants() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let u = haar_su4(&mut rng);
            let k = kak_decompose(&u).unwrap();
            assert!((k.recompose() - u).norm() < 1e-9);
            for m in [k.k1, k.k2, k.k3, k.k4] {
                assert!((m.determinant() - 1.0).norm() < 1e-10);
            }
            assert!(in_weyl_chamber(k.triple(), 1e-12));
            assert!(k.global_phase.re >= 0.0);
        }
    }

    #[test]
    fn rejects_non_unitary() {
        assert!(kak_decompose(&(Mat4::identity() * c64(2.0, 0.0))).is_err());
    }
}
