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

//! Fixed-size dense complex linear algebra for two-qubit work.
//!
//! Everything here operates on 2×2, 4×4 and 16×16 matrices. Qubit 0 is the
//! most significant tensor factor, so `kron(a, b)[2i+k][2j+l] = a[i][j]·b[k][l]`.

use nalgebra::{DMatrix, Matrix2, Matrix4, SMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type Mat16 = SMatrix<C64, 16, 16>;

/// Tolerance on unitarity and symmetry checks of inputs.
pub const INPUT_TOL: f64 = 1e-10;
/// Maximum Frobenius reconstruction error accepted from the eigensolver.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;
/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const CLUSTER_GAP: f64 = 1e-8;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn pauli_i() -> Mat2 {
    Mat2::identity()
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0))
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0))
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0))
}

/// Kronecker product of two single-qubit operators.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let aij = a[(i, j)];
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two 4×4 operators, used for superoperators.
pub fn kron4(a: &Mat4, b: &Mat4) -> Mat16 {
    let mut out = Mat16::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..4 {
                for l in 0..4 {
                    out[(4 * i + k, 4 * j + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of dynamically sized matrices.
///
/// Only used where the operand shapes are not known statically (matrix files).
pub fn kron_dyn(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// Two-qubit Pauli products appearing in the canonical entangling core.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliPair {
    XX,
    YY,
    ZZ,
}

impl PauliPair {
    pub fn single(self) -> Mat2 {
        match self {
            PauliPair::XX => pauli_x(),
            PauliPair::YY => pauli_y(),
            PauliPair::ZZ => pauli_z(),
        }
    }

    pub fn matrix(self) -> Mat4 {
        let p = self.single();
        kron(&p, &p)
    }
}

/// `exp(i·coeff·P⊗P)`, evaluated as `cos(coeff)·I + i·sin(coeff)·P⊗P`.
pub fn pauli_product_exp(coeff: f64, pair: PauliPair) -> Mat4 {
    let (s, c) = coeff.sin_cos();
    Mat4::identity() * c64(c, 0.0) + pair.matrix() * c64(0.0, s)
}

/// `Tr(a† b)` without forming the product.
pub fn trace_overlap<const N: usize>(a: &SMatrix<C64, N, N>, b: &SMatrix<C64, N, N>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Phase-invariant distance `1 − |Tr(A†B)|/4` between 4×4 unitaries.
pub fn phase_distance(a: &Mat4, b: &Mat4) -> f64 {
    (1.0 - trace_overlap(a, b).norm() / 4.0).max(0.0)
}

/// Largest entry of `|m†m − I|`.
pub fn unitarity_deviation<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    let p = m.adjoint() * m;
    let mut dev = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((p[(i, j)] - c64(target, 0.0)).norm());
        }
    }
    dev
}

pub fn is_unitary<const N: usize>(m: &SMatrix<C64, N, N>, tol: f64) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) && unitarity_deviation(m) <= tol
}

pub fn check_unitary<const N: usize>(m: &SMatrix<C64, N, N>, what: &'static str) -> Result<()> {
    let deviation = if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        unitarity_deviation(m)
    } else {
        f64::INFINITY
    };
    if deviation <= INPUT_TOL {
        Ok(())
    } else {
        Err(Error::NotUnitary { what, deviation })
    }
}

/// Rescale a 2×2 unitary to unit determinant. Returns the SU(2) part and the
/// phase `g` with `m = g·su`.
pub fn to_su2(m: &Mat2) -> (Mat2, C64) {
    let g = m.determinant().sqrt();
    (m / g, g)
}

/// Rescale a 4×4 unitary to unit determinant. Returns `(su, g)` with `m = g·su`.
pub fn to_su4(m: &Mat4) -> (Mat4, C64) {
    let g = m.determinant().powf(0.25);
    (m / g, g)
}

fn ginibre_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<C64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re * scale, im * scale)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random element of U(2).
pub fn haar_u2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let q = ginibre_unitary(2, rng);
    Mat2::from_fn(|i, j| q[(i, j)])
}

/// Haar-random element of U(4).
pub fn haar_u4<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let q = ginibre_unitary(4, rng);
    Mat4::from_fn(|i, j| q[(i, j)])
}

/// Haar-random element of SU(4).
pub fn haar_su4<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    to_su4(&haar_u4(rng)).0
}

/// Spectral decomposition `m = O·diag(λ)·Oᵀ` of a unitary complex-symmetric
/// matrix with real orthogonal `O`.
#[derive(Clone, Debug)]
pub struct SymmetricUnitaryEigen {
    pub eigenvalues: [C64; 4],
    pub vectors: Matrix4<f64>,
}

impl SymmetricUnitaryEigen {
    pub fn reconstruct(&self) -> Mat4 {
        let o = self.vectors.map(|x| c64(x, 0.0));
        let d = Mat4::from_diagonal(&nalgebra::Vector4::from_column_slice(&self.eigenvalues));
        o * d * o.transpose()
    }
}

/// Diagonalize a unitary, complex-symmetric 4×4 matrix by a real orthogonal basis.
///
/// Writing `m = A + iB`, unitarity and symmetry make `A` and `B` commuting real
/// symmetric matrices, so they share a real orthonormal eigenbasis. `A` is
/// diagonalized first; eigenvalue clusters closer than [`CLUSTER_GAP`] are then
/// resolved by diagonalizing `B` restricted to each cluster. If the
/// reconstruction check fails (near-degenerate clusters of `A` with a gap just
/// above the threshold) the same procedure is retried on rotated real
/// combinations of `A` and `B`.
pub fn eig_unitary_symmetric(m: &Mat4) -> Result<SymmetricUnitaryEigen> {
    let sym_dev = (m - m.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !sym_dev.is_finite() || sym_dev > INPUT_TOL {
        return Err(Error::NotSymmetric { deviation: sym_dev });
    }
    check_unitary(m, "symmetric eigensolver input")?;

    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    let re = (re + re.transpose()) * 0.5;
    let im = (im + im.transpose()) * 0.5;

    let mut worst = f64::INFINITY;
    for &t in &[0.0, 0.4142, 1.1071, 2.3562, 2.9] {
        let (s, c) = f64::sin_cos(t);
        let a = re * c + im * s;
        let b = im * c - re * s;
        let vectors = simultaneous_diagonalize(&a, &b);
        let oc = vectors.map(|x| c64(x, 0.0));
        let diag = oc.transpose() * m * oc;
        let mut eigenvalues = [C64::new(0.0, 0.0); 4];
        for (k, ev) in eigenvalues.iter_mut().enumerate() {
            let z = diag[(k, k)];
            *ev = if z.norm() > 0.0 { z / z.norm() } else { c64(1.0, 0.0) };
        }
        let eig = SymmetricUnitaryEigen { eigenvalues, vectors };
        let err = (eig.reconstruct() - m).norm();
        if err < RECONSTRUCTION_TOL {
            return Ok(eig);
        }
        worst = worst.min(err);
    }
    Err(Error::Eigen(format!(
        "no real orthogonal eigenbasis found; best reconstruction error {worst:.3e}"
    )))
}

fn simultaneous_diagonalize(a: &Matrix4<f64>, b: &Matrix4<f64>) -> Matrix4<f64> {
    let eig = SymmetricEigen::new(*a);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Matrix4::<f64>::zeros();
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }

    let mut start = 0;
    while start < 4 {
        let mut end = start + 1;
        while end < 4 && values[end] - values[end - 1] <= CLUSTER_GAP {
            end += 1;
        }
        let size = end - start;
        if size > 1 {
            let basis = vectors.columns(start, size).into_owned();
            let restricted = basis.transpose() * b * &basis;
            let sub = SymmetricEigen::new(restricted);
            let rotated = &basis * sub.eigenvectors;
            // re-orthonormalize within the cluster
            let qr = rotated.qr();
            let mut q = qr.q();
            let r = qr.r();
            for j in 0..size {
                if r[(j, j)] < 0.0 {
                    let mut col = q.column_mut(j);
                    col *= -1.0;
                }
            }
            for j in 0..size {
                vectors.set_column(start + j, &q.column(j));
            }
        }
        start = end;
    }
    vectors
}
