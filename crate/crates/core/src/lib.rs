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

//! Software mitigation of coherent (parasitic) two-qubit gate errors.
//!
//! Two strategies are provided and compared against hardware baselines:
//!
//! * [`mitigate`]: analytic single-qubit correction derived from the KAK
//!   decomposition of the parasitic gate ("KAK-Approx").
//! * [`recompile`]: numerical recompilation of a target unitary directly into
//!   the noisy native gate interleaved with single-qubit layers.
//!
//! [`noise`] simulates circuits as superoperators under amplitude damping and
//! depolarizing noise, and [`experiments`] runs the parameter sweeps that
//! compare the strategies.

pub mod error;
pub mod experiments;
pub mod fidelity;
pub mod gates;
pub mod kak;
pub mod linalg;
pub mod mitigate;
pub mod noise;
pub mod recompile;

pub use error::{Error, Result};
pub use linalg::{Mat2, Mat4, Mat16, C64};
