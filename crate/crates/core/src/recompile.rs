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

//! Numerical recompilation into a (possibly noisy) native two-qubit gate.
//!
//! The ansatz is `L_m·N·L_{m−1}·…·N·L_0` where `N` is the effective hardware
//! gate and each `L_l` is a layer of single-qubit rotations. Parameters are
//! fitted with multi-start BFGS on the phase-invariant infidelity.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{rx, rz, Circuit, GateOp, HardwareGateModel};
use crate::linalg::{c64, check_unitary, kron, pauli_x, pauli_z, trace_overlap, Mat2, Mat4, C64};

/// Infidelity at which a decomposition counts as exact.
pub const EXACT_TOL: f64 = 1e-8;
/// Largest supported native gate count.
pub const MAX_NATIVE_GATES: usize = 6;

/// Single-qubit layer parameterization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerKind {
    /// `R_Z(c)·R_X(b)·R_Z(a)` per qubit.
    FullSu2,
    /// `R_Z(a)` per qubit.
    RzOnly,
}

impl LayerKind {
    pub fn angles_per_qubit(self) -> usize {
        match self {
            LayerKind::FullSu2 => 3,
            LayerKind::RzOnly => 1,
        }
    }
}

/// Shape of the ansatz; the parameter vector lives alongside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ansatz {
    pub native_count: usize,
    pub layer_kind: LayerKind,
}

impl Ansatz {
    pub fn new(native_count: usize, layer_kind: LayerKind) -> Self {
        Ansatz { native_count, layer_kind }
    }

    pub fn param_count(&self) -> usize {
        2 * (self.native_count + 1) * self.layer_kind.angles_per_qubit()
    }

    fn local(&self, x: &[f64]) -> Mat2 {
        match self.layer_kind {
            LayerKind::FullSu2 => rz(x[2]) * rx(x[1]) * rz(x[0]),
            LayerKind::RzOnly => rz(x[0]),
        }
    }

    /// Per-qubit 2×2 gates of layer `l`.
    pub fn layer(&self, params: &[f64], l: usize) -> [Mat2; 2] {
        let k = self.layer_kind.angles_per_qubit();
        let base = 2 * k * l;
        [self.local(&params[base..base + k]), self.local(&params[base + k..base + 2 * k])]
    }

    pub fn unitary(&self, params: &[f64], native: &Mat4) -> Mat4 {
        let [a, b] = self.layer(params, 0);
        let mut u = kron(&a, &b);
        for l in 1..=self.native_count {
            let [a, b] = self.layer(params, l);
            u = kron(&a, &b) * native * u;
        }
        u
    }

    /// Circuit with native blocks labelled `native_id`. Angles are wrapped
    /// into `[−π, π)`, which changes only the global phase.
    pub fn circuit(&self, params: &[f64], native_id: &str) -> Circuit {
        let wrap = |a: f64| (a + PI).rem_euclid(2.0 * PI) - PI;
        let k = self.layer_kind.angles_per_qubit();
        let mut c = Circuit::new();
        for l in 0..=self.native_count {
            if l > 0 {
                c.push(vec![GateOp::native(native_id)]).expect("native moment");
            }
            let p = |q: usize, i: usize| wrap(params[2 * k * l + k * q + i]);
            match self.layer_kind {
                LayerKind::FullSu2 => {
                    c.push(vec![GateOp::rz(0, p(0, 0)), GateOp::rz(1, p(1, 0))]).expect("disjoint");
                    c.push(vec![GateOp::rx(0, p(0, 1)), GateOp::rx(1, p(1, 1))]).expect("disjoint");
                    c.push(vec![GateOp::rz(0, p(0, 2)), GateOp::rz(1, p(1, 2))]).expect("disjoint");
                }
                LayerKind::RzOnly => {
                    c.push(vec![GateOp::rz(0, p(0, 0)), GateOp::rz(1, p(1, 0))]).expect("disjoint");
                }
            }
        }
        c
    }
}

/// Settings for the multi-start optimizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Random restarts per native gate count.
    pub max_restarts: usize,
    pub max_iters: usize,
    /// A restart stops once the cost drops below this.
    pub stop_cost: f64,
    pub grad_tol: f64,
    /// Stop restarting once this many restarts agree on the best cost; 0 disables.
    pub patience: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { max_restarts: 20, max_iters: 1000, stop_cost: 1e-9, grad_tol: 1e-10, patience: 0, seed: 0 }
    }
}

/// Outcome of [`recompile`].
#[derive(Clone, Debug)]
pub struct RecompileResult {
    pub circuit: Circuit,
    pub ansatz: Ansatz,
    pub params: Vec<f64>,
    pub achieved_infidelity: f64,
    pub native_gates_used: usize,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Best parameters found for a fixed ansatz.
#[derive(Clone, Debug)]
pub struct FixedFit {
    pub params: Vec<f64>,
    pub cost: f64,
    pub restarts: usize,
}

struct Problem<'a> {
    target_dag: Mat4,
    native: &'a Mat4,
    ansatz: Ansatz,
}

fn neg_i_half(p: Mat2) -> Mat2 {
    p * c64(0.0, -0.5)
}

impl Problem<'_> {
    /// Derivatives of one qubit's local gate with respect to its angles.
    fn local_derivs(&self, x: &[f64]) -> Vec<Mat2> {
        let (z, xm) = (neg_i_half(pauli_z()), neg_i_half(pauli_x()));
        match self.ansatz.layer_kind {
            LayerKind::FullSu2 => {
                let (ra, rb, rc) = (rz(x[0]), rx(x[1]), rz(x[2]));
                vec![rc * rb * ra * z, rc * rb * xm * ra, z * rc * rb * ra]
            }
            LayerKind::RzOnly => vec![z * rz(x[0])],
        }
    }

    /// Infidelity and its gradient.
    fn cost_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let m = self.ansatz.native_count;
        let k = self.ansatz.layer_kind.angles_per_qubit();
        let layers: Vec<[Mat2; 2]> = (0..=m).map(|l| self.ansatz.layer(x, l)).collect();
        let full: Vec<Mat4> = layers.iter().map(|[a, b]| kron(a, b)).collect();
        let mut before = vec![Mat4::identity(); m + 1];
        for l in 0..m {
            before[l + 1] = self.native * full[l] * before[l];
        }
        let mut after = vec![Mat4::identity(); m + 1];
        for l in (0..m).rev() {
            after[l] = after[l + 1] * full[l + 1] * self.native;
        }
        let f = (self.target_dag * after[m] * full[m] * before[m]).trace();
        for l in 0..=m {
            let env = before[l] * self.target_dag * after[l];
            let [a, b] = layers[l];
            // Tr(env·(dA⊗B)) = Tr(e0·dA) with e0[j][i] = Σ env[2j+t][2i+s]·B[s][t]
            let mut e0 = Mat2::zeros();
            let mut e1 = Mat2::zeros();
            for i in 0..2 {
                for j in 0..2 {
                    for s in 0..2 {
                        for t in 0..2 {
                            e0[(j, i)] += env[(2 * j + t, 2 * i + s)] * b[(s, t)];
                            e1[(t, s)] += env[(2 * j + t, 2 * i + s)] * a[(i, j)];
                        }
                    }
                }
            }
            for (q, e) in [e0, e1].iter().enumerate() {
                let base = 2 * k * l + k * q;
                for (i, d) in self.local_derivs(&x[base..base + k]).iter().enumerate() {
                    let df = (e * d).trace();
                    grad[base + i] = -2.0 * (f.conj() * df).re / 20.0;
                }
            }
        }
        ((16.0 - f.norm_sqr()) / 20.0).max(0.0)
    }

    fn cost(&self, x: &[f64]) -> f64 {
        let f: C64 = trace_overlap(&self.target_dag.adjoint(), &self.ansatz.unitary(x, self.native));
        ((16.0 - f.norm_sqr()) / 20.0).max(0.0)
    }
}

/// BFGS with backtracking line search from `x0`. Returns the final point and cost.
fn bfgs(p: &Problem, x0: Vec<f64>, cfg: &OptimizerConfig) -> Result<(Vec<f64>, f64)> {
    let n = x0.len();
    let mut x = DVector::from_vec(x0);
    let mut g = DVector::zeros(n);
    let mut f = p.cost_grad(x.as_slice(), g.as_mut_slice());
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut gn = DVector::zeros(n);
    let mut stalls = 0;
    for it in 0..cfg.max_iters {
        if !f.is_finite() {
            return Err(Error::NonFiniteCost);
        }
        if f < cfg.stop_cost || g.norm() < cfg.grad_tol {
            break;
        }
        let mut d = -(&h * &g);
        let mut slope = g.dot(&d);
        if slope >= 0.0 {
            h.fill_with_identity();
            d = -g.clone();
            slope = -g.norm_squared();
        }
        let mut t = 1.0;
        let (xn, fnew) = loop {
            let xn = &x + &d * t;
            let fnew = p.cost_grad(xn.as_slice(), gn.as_mut_slice());
            if fnew <= f + 1e-4 * t * slope || t < 1e-14 {
                break (xn, fnew);
            }
            t *= 0.5;
        };
        if !fnew.is_finite() {
            return Err(Error::NonFiniteCost);
        }
        if fnew > f {
            break;
        }
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        if sy > 1e-18 {
            if it == 0 {
                h *= sy / y.norm_squared();
            }
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            h += (&s * s.transpose()) * (rho * (1.0 + rho * yhy)) - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
        stalls = if f - fnew <= 1e-14 * f.max(1e-300).max(1e-12) { stalls + 1 } else { 0 };
        x = xn;
        f = fnew;
        std::mem::swap(&mut g, &mut gn);
        if stalls >= 10 {
            break;
        }
    }
    let fx = p.cost(x.as_slice());
    if !fx.is_finite() {
        return Err(Error::NonFiniteCost);
    }
    Ok((x.data.into(), fx))
}

/// Multi-start fit of a fixed ansatz.
pub fn fit_ansatz(target: &Mat4, native: &Mat4, ansatz: Ansatz, cfg: &OptimizerConfig) -> Result<FixedFit> {
    let p = Problem { target_dag: target.adjoint(), native, ansatz };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (ansatz.native_count as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut best = FixedFit { params: vec![0.0; ansatz.param_count()], cost: f64::INFINITY, restarts: 0 };
    let mut agree = 0;
    for r in 0..cfg.max_restarts.max(1) {
        let x0: Vec<f64> = (0..ansatz.param_count()).map(|_| rng.random_range(-PI..PI)).collect();
        let (x, c) = bfgs(&p, x0, cfg)?;
        best.restarts = r + 1;
        let same = (c - best.cost).abs() <= 1e-7 * best.cost.max(1e-9);
        if c < best.cost {
            agree = if same { agree + 1 } else { 1 };
            best.params = x;
            best.cost = c;
        } else if same {
            agree += 1;
        }
        if best.cost < cfg.stop_cost || (cfg.patience > 0 && agree >= cfg.patience) {
            break;
        }
    }
    Ok(best)
}

/// Recompiles `target` into at most `m_max` applications of `hw`'s effective
/// gate. Gate counts are tried in increasing order and more gates are used
/// only when they strictly lower the infidelity.
pub fn recompile(
    target: &Mat4,
    hw: &HardwareGateModel,
    m_max: usize,
    layer_kind: LayerKind,
    cfg: &OptimizerConfig,
) -> Result<RecompileResult> {
    if m_max > MAX_NATIVE_GATES {
        return Err(Error::TooManyNativeGates(m_max));
    }
    check_unitary(target, "target")?;
    let native = hw.effective();
    let mut best: Option<(Ansatz, FixedFit)> = None;
    let mut restarts = 0;
    for m in 0..=m_max {
        let ansatz = Ansatz::new(m, layer_kind);
        let fit = fit_ansatz(target, &native, ansatz, cfg)?;
        restarts += fit.restarts;
        let better = best.as_ref().is_none_or(|(_, b)| fit.cost < b.cost);
        if better {
            best = Some((ansatz, fit));
        }
        if best.as_ref().is_some_and(|(_, b)| b.cost <= EXACT_TOL) {
            break;
        }
    }
    let (ansatz, fit) = best.expect("at least one gate count tried");
    Ok(RecompileResult {
        circuit: ansatz.circuit(&fit.params, &hw.label),
        ansatz,
        achieved_infidelity: fit.cost,
        native_gates_used: ansatz.native_count,
        restarts_used: restarts,
        converged: fit.cost <= EXACT_TOL,
        params: fit.params,
    })
}

/// Maximizes the fidelity of `K_l·core·K_r` to `target` over local gates.
/// Returns the fidelity and `[l0, l1, r0, r1]`.
pub fn optimize_local_dressing(target: &Mat4, core: &Mat4, cfg: &OptimizerConfig) -> Result<(f64, [Mat2; 4])> {
    let ansatz = Ansatz::new(1, LayerKind::FullSu2);
    let fit = fit_ansatz(target, core, ansatz, cfg)?;
    let [r0, r1] = ansatz.layer(&fit.params, 0);
    let [l0, l1] = ansatz.layer(&fit.params, 1);
    Ok((1.0 - fit.cost, [l0, l1, r0, r1]))
}

/// Weyl-chamber grid with `divisions` steps along α ∈ [0, π/4]: all points
/// `β ≤ α`, `|γ| ≤ β`, minus the identity and the mirror point
/// `(π/4, π/4, −π/4)` of SWAP.
pub fn weyl_grid(divisions: usize) -> Vec<(f64, f64, f64)> {
    let step = PI / 4.0 / divisions as f64;
    let n = divisions as i64;
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=i {
            for k in -j..=j {
                if (i, j, k) == (0, 0, 0) || (i, j, k) == (n, n, -n) {
                    continue;
                }
                out.push((i as f64 * step, j as f64 * step, k as f64 * step));
            }
        }
    }
    out
}

/// Number of grid divisions for a step angle, e.g. `π/80 → 20`.
pub fn divisions_for_step(step: f64) -> Result<usize> {
    let d = PI / 4.0 / step;
    if !(d.is_finite() && d >= 1.0) || (d - d.round()).abs() > 1e-6 {
        return Err(Error::Config(format!("grid step {step} does not divide π/4")));
    }
    Ok(d.round() as usize)
}

/// One row of an expressivity scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub m: usize,
    pub infidelity: f64,
    pub native_count: usize,
}

/// Stable per-item seed derived from a base seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fits every Weyl-grid target with exactly `m` native gates.
pub fn expressivity_scan(
    hw: &HardwareGateModel,
    grid_step: f64,
    m: usize,
    layer_kind: LayerKind,
    cfg: &OptimizerConfig,
) -> Result<Vec<ScanRecord>> {
    if m > MAX_NATIVE_GATES {
        return Err(Error::TooManyNativeGates(m));
    }
    let grid = weyl_grid(divisions_for_step(grid_step)?);
    let native = hw.effective();
    grid.par_iter()
        .enumerate()
        .map(|(idx, &(a, b, c))| {
            let cfg = OptimizerConfig { seed: derive_seed(cfg.seed, idx as u64), ..cfg.clone() };
            let fit = fit_ansatz(&crate::gates::u_a(a, b, c), &native, Ansatz::new(m, layer_kind), &cfg)?;
            Ok(ScanRecord { alpha: a, beta: b, gamma: c, m, infidelity: fit.cost, native_count: m })
        })
        .collect()
}
