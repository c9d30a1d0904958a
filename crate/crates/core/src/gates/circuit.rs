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

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{hadamard, rx, rz, NativeSet};
use crate::error::{Error, Result};
use crate::linalg::{kron, Mat2, Mat4};

/// Where a gate acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Site {
    Qubit(usize),
    Pair,
}

impl Site {
    fn covers(self, q: usize) -> bool {
        match self {
            Site::Qubit(s) => s == q,
            Site::Pair => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    Rz(f64),
    Rx(f64),
    Hadamard,
    /// Native two-qubit gate, resolved by model id.
    Native(String),
    /// Idle for the given number of nanoseconds.
    Idle(f64),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Rz(_) => "rz",
            GateKind::Rx(_) => "rx",
            GateKind::Hadamard => "h",
            GateKind::Native(_) => "native",
            GateKind::Idle(_) => "idle",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    kind: GateKind,
    site: Site,
}

impl GateOp {
    pub fn new(kind: GateKind, site: Site) -> Result<Self> {
        match (&kind, site) {
            (GateKind::Native(id), Site::Pair) => {
                if id.is_empty() || id.contains(|c: char| c.is_whitespace() || "(),#".contains(c)) {
                    return Err(Error::InvalidCircuit(format!("bad native model id '{id}'")));
                }
            }
            (GateKind::Native(_), Site::Qubit(_)) => {
                return Err(Error::InvalidCircuit("native gates act on both qubits".into()));
            }
            (_, Site::Pair) => {
                return Err(Error::InvalidCircuit(format!("{} acts on a single qubit", kind.name())));
            }
            (_, Site::Qubit(q)) if q > 1 => {
                return Err(Error::InvalidCircuit(format!("qubit index {q} out of range")));
            }
            (GateKind::Idle(t), _) if !(t.is_finite() && *t >= 0.0) => {
                return Err(Error::InvalidCircuit(format!("idle duration {t} must be ≥ 0")));
            }
            (GateKind::Rz(a) | GateKind::Rx(a), _) if !a.is_finite() => {
                return Err(Error::InvalidCircuit("non-finite rotation angle".into()));
            }
            _ => {}
        }
        Ok(GateOp { kind, site })
    }

    pub fn rz(q: usize, angle: f64) -> Self {
        Self::new(GateKind::Rz(angle), Site::Qubit(q)).expect("valid rz")
    }

    pub fn rx(q: usize, angle: f64) -> Self {
        Self::new(GateKind::Rx(angle), Site::Qubit(q)).expect("valid rx")
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::Hadamard, Site::Qubit(q)).expect("valid h")
    }

    pub fn idle(q: usize, ns: f64) -> Self {
        Self::new(GateKind::Idle(ns), Site::Qubit(q)).expect("valid idle")
    }

    pub fn native(model: &str) -> Self {
        Self::new(GateKind::Native(model.to_string()), Site::Pair).expect("valid native")
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn site(&self) -> Site {
        self.site
    }

    pub(crate) fn kind_mut(&mut self) -> &mut GateKind {
        &mut self.kind
    }

    /// Unitary of a single-qubit op; `None` for native gates.
    pub fn single_qubit_unitary(&self) -> Option<Mat2> {
        match self.kind {
            GateKind::Rz(a) => Some(rz(a)),
            GateKind::Rx(a) => Some(rx(a)),
            GateKind::Hadamard => Some(hadamard()),
            GateKind::Idle(_) => Some(Mat2::identity()),
            GateKind::Native(_) => None,
        }
    }

    pub fn duration(&self, durations: &Durations, natives: &NativeSet) -> Result<f64> {
        Ok(match &self.kind {
            GateKind::Rz(_) => durations.rz_ns,
            GateKind::Rx(_) => durations.rx_ns,
            GateKind::Hadamard => durations.hadamard_ns(),
            GateKind::Idle(t) => *t,
            GateKind::Native(id) => natives.get(id)?.duration_ns,
        })
    }
}

/// Single-qubit gate durations in nanoseconds. Native durations live on the
/// hardware model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Durations {
    pub rz_ns: f64,
    pub rx_ns: f64,
}

impl Durations {
    /// `H = R_Z(π/2)·R_X(π/2)·R_Z(π/2)`.
    pub fn hadamard_ns(&self) -> f64 {
        2.0 * self.rz_ns + self.rx_ns
    }
}

/// Gates executed in parallel on disjoint qubits.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Moment {
    ops: Vec<GateOp>,
}

impl Moment {
    pub fn new(ops: Vec<GateOp>) -> Result<Self> {
        for q in 0..2 {
            let n = ops.iter().filter(|op| op.site.covers(q)).count();
            if n > 1 {
                return Err(Error::InvalidCircuit(format!("qubit {q} used twice in one moment")));
            }
        }
        Ok(Moment { ops })
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub(crate) fn ops_mut(&mut self) -> &mut Vec<GateOp> {
        &mut self.ops
    }

    /// The op touching qubit `q`, if any.
    pub fn op_on(&self, q: usize) -> Option<&GateOp> {
        self.ops.iter().find(|op| op.site.covers(q))
    }

    pub fn has_native(&self) -> bool {
        self.ops.iter().any(|op| matches!(op.kind, GateKind::Native(_)))
    }

    pub fn unitary(&self, natives: &NativeSet) -> Result<Mat4> {
        let mut locals = [Mat2::identity(), Mat2::identity()];
        for op in &self.ops {
            match (&op.kind, op.site) {
                (GateKind::Native(id), _) => return Ok(natives.get(id)?.effective()),
                (_, Site::Qubit(q)) => locals[q] = op.single_qubit_unitary().expect("single-qubit op"),
                (_, Site::Pair) => unreachable!("validated in GateOp::new"),
            }
        }
        Ok(kron(&locals[0], &locals[1]))
    }

    /// Slot length: the longest op in the moment.
    pub fn slot_duration(&self, durations: &Durations, natives: &NativeSet) -> Result<f64> {
        let mut slot = 0.0f64;
        for op in &self.ops {
            slot = slot.max(op.duration(durations, natives)?);
        }
        Ok(slot)
    }
}

/// Timed sequence of moments on two qubits. Moments are listed in time order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    moments: Vec<Moment>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_moments(moments: Vec<Moment>) -> Self {
        Circuit { moments }
    }

    pub fn push(&mut self, ops: Vec<GateOp>) -> Result<()> {
        self.moments.push(Moment::new(ops)?);
        Ok(())
    }

    pub fn moments(&self) -> &[Moment] {
        &self.moments
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Circuit {
        let mut moments = self.moments.clone();
        moments.extend(other.moments.iter().cloned());
        Circuit { moments }
    }

    fn ops(&self) -> impl Iterator<Item = &GateOp> {
        self.moments.iter().flat_map(|m| m.ops.iter())
    }

    pub fn native_count(&self) -> usize {
        self.ops().filter(|op| matches!(op.kind, GateKind::Native(_))).count()
    }

    /// Number of `R_X` rotations, counting each Hadamard as one.
    pub fn rx_count(&self) -> usize {
        self.ops().filter(|op| matches!(op.kind, GateKind::Rx(_) | GateKind::Hadamard)).count()
    }

    /// Number of `R_Z` rotations, counting each Hadamard as two.
    pub fn rz_count(&self) -> usize {
        self.ops()
            .map(|op| match op.kind {
                GateKind::Rz(_) => 1,
                GateKind::Hadamard => 2,
                _ => 0,
            })
            .sum()
    }

    pub fn duration(&self, durations: &Durations, natives: &NativeSet) -> Result<f64> {
        let mut total = 0.0;
        for m in &self.moments {
            total += m.slot_duration(durations, natives)?;
        }
        Ok(total)
    }

    /// Copy of the circuit where every qubit left untouched in a moment gets an
    /// explicit idle op spanning the slot.
    pub fn with_idle_padding(&self, durations: &Durations, natives: &NativeSet) -> Result<Circuit> {
        let mut out = Vec::with_capacity(self.moments.len());
        for m in &self.moments {
            let slot = m.slot_duration(durations, natives)?;
            let mut ops = m.ops.clone();
            for q in 0..2 {
                if m.op_on(q).is_none() {
                    ops.push(GateOp::idle(q, slot));
                }
            }
            ops.sort_by_key(|op| match op.site {
                Site::Qubit(q) => q,
                Site::Pair => 0,
            });
            out.push(Moment::new(ops)?);
        }
        Ok(Circuit { moments: out })
    }
}

/// Unitary of a circuit; later moments multiply on the left.
pub fn circuit_unitary(c: &Circuit, natives: &NativeSet) -> Result<Mat4> {
    let mut u = Mat4::identity();
    for m in &c.moments {
        u = m.unitary(natives)? * u;
    }
    Ok(u)
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = match self.site {
            Site::Qubit(q) => q,
            Site::Pair => 0,
        };
        match &self.kind {
            GateKind::Rz(a) => write!(f, "RZ(q{q},{a:?})"),
            GateKind::Rx(a) => write!(f, "RX(q{q},{a:?})"),
            GateKind::Hadamard => write!(f, "H(q{q})"),
            GateKind::Idle(t) => write!(f, "IDLE(q{q},{t:?}ns)"),
            GateKind::Native(id) => write!(f, "NAT(q0,q1,{id})"),
        }
    }
}

/// One moment per line, ops separated by spaces, e.g.
/// `RZ(q0,1.5708) IDLE(q1,10ns)` or `NAT(q0,q1,native)`.
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.moments {
            let line: Vec<String> = m.ops.iter().map(|op| op.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

fn parse_qubit(s: &str) -> Result<usize> {
    match s.trim() {
        "q0" => Ok(0),
        "q1" => Ok(1),
        other => Err(Error::Parse(format!("unknown qubit '{other}'"))),
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}'")))
}

impl FromStr for GateOp {
    type Err = Error;

    fn from_str(token: &str) -> Result<Self> {
        let open = token.find('(').ok_or_else(|| Error::Parse(format!("expected '(' in '{token}'")))?;
        if !token.ends_with(')') {
            return Err(Error::Parse(format!("expected ')' at end of '{token}'")));
        }
        let name = &token[..open];
        let args: Vec<&str> = token[open + 1..token.len() - 1].split(',').collect();
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!("{name} takes {n} arguments in '{token}'")))
            }
        };
        match name {
            "RZ" | "RX" => {
                arity(2)?;
                let q = parse_qubit(args[0])?;
                let a = parse_f64(args[1])?;
                let kind = if name == "RZ" { GateKind::Rz(a) } else { GateKind::Rx(a) };
                GateOp::new(kind, Site::Qubit(q))
            }
            "H" => {
                arity(1)?;
                GateOp::new(GateKind::Hadamard, Site::Qubit(parse_qubit(args[0])?))
            }
            "IDLE" => {
                arity(2)?;
                let q = parse_qubit(args[0])?;
                let t = args[1].trim();
                let t = t.strip_suffix("ns").ok_or_else(|| Error::Parse(format!("idle needs ns unit: '{t}'")))?;
                GateOp::new(GateKind::Idle(parse_f64(t)?), Site::Qubit(q))
            }
            "NAT" => {
                arity(3)?;
                if parse_qubit(args[0])? != 0 || parse_qubit(args[1])? != 1 {
                    return Err(Error::Parse("native gates are written NAT(q0,q1,model)".into()));
                }
                GateOp::new(GateKind::Native(args[2].trim().to_string()), Site::Pair)
            }
            other => Err(Error::Parse(format!("unknown gate '{other}'"))),
        }
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut c = Circuit::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let ops = line
                .split_whitespace()
                .map(GateOp::from_str)
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            c.push(ops).map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(c)
    }
}
