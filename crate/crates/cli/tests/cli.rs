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


use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn paramit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paramit")).args(args).output().expect("spawn paramit")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn kak_from_gate_and_matrix_file() {
    let v = json_of(&paramit(&["kak", "--gate", "iswap(pi/3)"]));
    let pi = std::f64::consts::PI;
    assert!((v["alpha"].as_f64().unwrap() - pi / 6.0).abs() < 1e-10);
    assert!((v["beta"].as_f64().unwrap() - pi / 6.0).abs() < 1e-10);
    assert!(v["gamma"].as_f64().unwrap().abs() < 1e-10);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cz.json");
    let cz = "[[[1,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[-1,0]]]";
    fs::write(&path, cz).unwrap();
    let v = json_of(&paramit(&["kak", path.to_str().unwrap()]));
    assert!((v["alpha"].as_f64().unwrap() - pi / 4.0).abs() < 1e-10);

    fs::write(&path, "[[[1,0]]]").unwrap();
    assert!(!paramit(&["kak", path.to_str().unwrap()]).status.success());
}

#[test]
fn mitigate_cphase_is_diagonal() {
    let v = json_of(&paramit(&["mitigate", "--parasitic", "cphase(9deg)"]));
    assert_eq!(v["diagonal"], Value::Bool(true));
    let phi = 9f64.to_radians();
    for a in v["rz_angles"].as_array().unwrap() {
        assert!((a.as_f64().unwrap() - phi / 2.0).abs() < 1e-9);
    }
    let want = (14.0 + 6.0 * phi.cos()) / 20.0;
    assert!((v["unmitigated_fidelity"].as_f64().unwrap() - want).abs() < 1e-12);
}

#[test]
fn recompile_then_simulate() {
    let v = json_of(&paramit(&["recompile", "--target", "cphase(pi/2)", "--max-gates", "2", "--seed", "7"]));
    assert!(v["achieved_infidelity"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["native_gates_used"].as_u64(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("c.txt");
    fs::write(&circ, v["circuit"].as_str().unwrap()).unwrap();
    let s = json_of(&paramit(&["simulate", circ.to_str().unwrap(), "--target", "cphase(pi/2)"]));
    assert!(s["unitary_fidelity"].as_f64().unwrap() > 1.0 - 1e-8);
    assert_eq!(s["n2q"].as_u64(), Some(2));
    let noisy = json_of(&paramit(&["simulate", circ.to_str().unwrap(), "--target", "cphase(pi/2)", "--noise", "tableI-1"]));
    assert!(noisy["avg_gate_fidelity"].as_f64().unwrap() < s["avg_gate_fidelity"].as_f64().unwrap());
}

#[test]
fn scan_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let o = paramit(&["scan", "--grid-step", "pi/8", "--m", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,beta,gamma,m,infidelity,native_count"));
    let rows: Vec<_> = lines.collect();
    assert!(!rows.is_empty());
    for r in rows {
        let inf: f64 = r.split(',').nth(4).unwrap().parse().unwrap();
        assert!(inf < 1e-6, "{r}");
    }
}

#[test]
fn sweep_and_report_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.toml");
    fs::write(
        &spec,
        "strategies = [\"NoMitigate\", \"KAK-Approx\"]\nparasitic_deg = [0, 5, 10]\nnoise = [\"unitary-only\"]\n[targets]\nfamily = \"cphase-grid\"\ncount = 4\n",
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let o = paramit(&["sweep", "--spec", spec.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 1 + 4 * 2 * 3);

    let v = json_of(&paramit(&["report", "--in", csv.to_str().unwrap()]));
    assert_eq!(v["summary"].as_array().unwrap().len(), 6);
    let cross = &v["crossovers"][0];
    assert_eq!(cross["first"], "NoMitigate");
    assert!(cross["crossing_deg"].is_null());
}

#[test]
fn bad_input_exits_nonzero() {
    let o = paramit(&["mitigate", "--parasitic", "frobnicate(3)"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert!(!paramit(&["report", "--in", "/definitely/missing.csv"]).status.success());
}
