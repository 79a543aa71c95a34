// Copyright 2026 The dicke-selftest Authors
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

use std::process::Command as Proc;

use dicke_selftest_cli::*;

const BIN: &str = env!("CARGO_BIN_EXE_dicke-selftest");

fn exec(args: &[&str]) -> (i32, String, String) {
    let out = Proc::new(BIN).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn exit_codes() {
    assert_eq!(
        exec(&["verify", "--n", "4", "--k", "2", "--tolerance", "1e-12"]).0,
        0
    );
    assert_eq!(
        exec(&[
            "verify",
            "--n",
            "3",
            "--k",
            "1",
            "--noise",
            "rotate-z@1:0.1",
            "--tolerance",
            "1e-6"
        ])
        .0,
        1
    );
    let (code, _, err) = exec(&["verify", "--n", "4"]);
    assert_eq!(code, 2);
    assert!(err.contains("--k"));
    assert_eq!(
        exec(&["verify", "--n", "4", "--k", "2", "--noise", "perturb:abc"]).0,
        2
    );
    assert_eq!(exec(&["bound", "--n", "4", "--k", "2", "--eps", "-1"]).0, 2);
    let (code, _, err) = exec(&["verify", "--experiment", "/nonexistent/exp.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("/nonexistent/exp.json"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    let (code, stdout, _) = exec(&[
        "bound", "--n", "5", "--k", "2", "--eps", "1e-4", "--format", "csv",
    ]);
    assert_eq!(code, 0);
    let (code, quiet, _) = exec(&[
        "bound",
        "--n",
        "5",
        "--k",
        "2",
        "--eps",
        "1e-4",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(quiet.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout);
    assert!(stdout.starts_with("n,k,epsilon,branch_norm,"));
}

#[test]
fn experiment_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let exp = dicke_selftest::perturb_state(
        &dicke_selftest::reference_experiment(3, 1).unwrap(),
        0.02,
        8,
    )
    .unwrap();
    let path = dir.path().join("exp.json");
    std::fs::write(&path, exp.to_json().unwrap()).unwrap();
    let (code, from_file, _) = exec(&["verify", "--experiment", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, generated, _) = exec(&[
        "verify",
        "--n",
        "3",
        "--k",
        "1",
        "--noise",
        "perturb:0.02",
        "--seed",
        "8",
    ]);
    assert_eq!(from_file, generated);
    assert_eq!(
        exec(&["verify", "--experiment", path.to_str().unwrap(), "--n", "4"]).0,
        2
    );
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command": "bound", "n": 4, "k": 2, "eps": 0.001, "format": "csv"}"#,
    )
    .unwrap();
    let (code, a, _) = exec(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, b, _) = exec(&[
        "bound", "--n", "4", "--k", "2", "--eps", "0.001", "--format", "csv",
    ]);
    assert_eq!(a, b);
    let (_, c, _) = exec(&["--config", cfg.to_str().unwrap(), "--eps", "0"]);
    assert!(c.lines().nth(1).unwrap().contains(",0.0000000000000000e0,"));
}

#[test]
fn sampled_runs_need_a_seed() {
    assert_eq!(
        exec(&["verify", "--n", "3", "--k", "1", "--shots", "100"]).0,
        2
    );
    assert_eq!(
        exec(&["verify", "--n", "3", "--k", "1", "--shots", "100", "--seed", "1"]).0,
        0
    );
    assert_eq!(
        exec(&[
            "verify",
            "--n",
            "3",
            "--k",
            "1",
            "--noise",
            "shots:100",
            "--seed",
            "1"
        ])
        .0,
        0
    );
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = [
        "sweep",
        "--n",
        "4",
        "--k",
        "2",
        "--noise",
        "rotate-d:0,0.01,0.02",
    ];
    let one = Proc::new(BIN)
        .args(args)
        .env(THREADS_ENV, "1")
        .output()
        .unwrap();
    let many = Proc::new(BIN)
        .args(args)
        .env(THREADS_ENV, "4")
        .output()
        .unwrap();
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn strict_sweep_over_rotations() {
    let mut cfg = RunConfig::new(Command::Sweep);
    cfg.n = Some(4);
    cfg.k = Some(2);
    cfg.noise = "rotate-x@2:0,0.005,0.01,0.02".parse().unwrap();
    cfg.strict = true;
    let out = run(&cfg).unwrap();
    assert!(out.passed);
    assert_eq!(out.artifact.lines().count(), 5);
    assert!(out
        .artifact
        .lines()
        .skip(1)
        .all(|l| l.contains("measurement_rotation_X2")));
}
