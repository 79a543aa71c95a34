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

//! Executes a resolved [`RunConfig`].

use std::path::Path;

use dicke_selftest::bounds::{swap_count_oracle, ORACLE_MAX_N};
use dicke_selftest::certify::{sweep_to_csv, sweep_to_json};
use dicke_selftest::io::{to_csv_string, to_json_string};
use dicke_selftest::{
    certify_with, reference_experiment, run_sweep, swap_count, total_bound, verify_with, Exec,
    ExperimentSpec, Label, NoiseSpec, SweepNoise, VerifyMode,
};
use serde::Serialize;

use crate::config::{Command, Format, NoiseArg, RunConfig, Shots};
use crate::error::CliError;

/// Result of a run: the artifact text and whether all checks passed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub artifact: String,
    pub passed: bool,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Serialize)]
struct OracleRow {
    n: usize,
    k: usize,
    formula: u128,
    enumeration: u128,
    agree: bool,
}

const ORACLE_CSV_HEADER: [&str; 5] = ["n", "k", "formula", "enumeration", "agree"];

fn need(v: Option<usize>, flag: &str) -> Result<usize, CliError> {
    v.ok_or_else(|| CliError::usage(flag, "required for this command"))
}

fn need_seed(cfg: &RunConfig, why: &str) -> Result<u64, CliError> {
    cfg.seed
        .ok_or_else(|| CliError::usage("--seed", format!("required when {why}")))
}

/// Shot count from `--shots` and `--noise shots:..`, which must agree.
fn shot_count(cfg: &RunConfig) -> Result<Option<u64>, CliError> {
    let from_noise = match cfg.noise {
        NoiseArg::Shots(c) => Some(c),
        _ => None,
    };
    let from_flag = match cfg.shots {
        Shots::Exact => None,
        Shots::Count(c) => Some(c),
    };
    match (from_flag, from_noise) {
        (Some(a), Some(b)) if a != b => Err(CliError::usage(
            "--shots",
            format!("{a} conflicts with --noise shots:{b}"),
        )),
        (a, b) => Ok(a.or(b)),
    }
}

fn verify_mode(cfg: &RunConfig) -> Result<VerifyMode, CliError> {
    Ok(match shot_count(cfg)? {
        None => VerifyMode::Exact,
        Some(shots) => VerifyMode::Sampled {
            shots,
            seed: need_seed(cfg, "sampling with finite shots")?,
        },
    })
}

fn load_experiment(cfg: &RunConfig) -> Result<ExperimentSpec, CliError> {
    match &cfg.experiment {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let exp = ExperimentSpec::from_json(&text).map_err(|e| CliError::io(path, e))?;
            for (flag, given, actual) in [("--n", cfg.n, exp.n()), ("--k", cfg.k, exp.k())] {
                if given.is_some_and(|g| g != actual) {
                    return Err(CliError::usage(
                        flag,
                        format!("conflicts with the experiment file ({actual})"),
                    ));
                }
            }
            Ok(exp)
        }
        None => {
            let (n, k) = (need(cfg.n, "--n")?, need(cfg.k, "--k")?);
            reference_experiment(n, k).map_err(|e| CliError::usage("--n/--k", e.to_string()))
        }
    }
}

fn noise_spec(cfg: &RunConfig, n: usize) -> Result<NoiseSpec, CliError> {
    Ok(match &cfg.noise {
        NoiseArg::None | NoiseArg::Shots(_) => NoiseSpec::None,
        NoiseArg::Perturb(v) => {
            if v.len() != 1 {
                return Err(CliError::usage(
                    "--noise",
                    "perturb takes a single angle outside sweep",
                ));
            }
            NoiseSpec::StatePerturbation {
                theta: v[0],
                seed: need_seed(cfg, "the state is perturbed")?,
            }
        }
        NoiseArg::Rotate {
            label,
            party,
            angles,
        } => {
            let angles = match party {
                None => angles.clone(),
                Some(p) => {
                    if angles.len() != 1 {
                        return Err(CliError::usage(
                            "--noise",
                            "rotate@P takes a single angle outside sweep",
                        ));
                    }
                    if *p > n {
                        return Err(CliError::usage(
                            "--noise",
                            format!("party {p} outside 1..={n}"),
                        ));
                    }
                    let mut v = vec![0.0; *p];
                    v[p - 1] = angles[0];
                    v
                }
            };
            NoiseSpec::MeasurementRotation {
                label: *label,
                angles,
            }
        }
    })
}

fn noisy_experiment(cfg: &RunConfig) -> Result<ExperimentSpec, CliError> {
    let exp = load_experiment(cfg)?;
    let noise = noise_spec(cfg, exp.n())?;
    noise
        .apply(&exp)
        .map_err(|e| CliError::usage("--noise", e.to_string()))
}

fn tolerance_ok(cfg: &RunConfig, eps: f64) -> bool {
    cfg.tolerance.is_none_or(|t| eps <= t)
}

fn format_or(cfg: &RunConfig, default: Format) -> Format {
    cfg.format.unwrap_or(default)
}

fn run_verify(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let exp = noisy_experiment(cfg)?;
    let report = verify_with(&exp, verify_mode(cfg)?, Exec::default())?;
    let artifact = match format_or(cfg, Format::Json) {
        Format::Json => report.to_json()?,
        Format::Csv => report.to_csv()?,
    };
    Ok(RunOutcome {
        artifact,
        passed: tolerance_ok(cfg, report.epsilon),
    })
}

fn run_certify(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    if cfg.format == Some(Format::Csv) {
        return Err(CliError::usage("--format", "certify reports are JSON only"));
    }
    let exp = noisy_experiment(cfg)?;
    let report = certify_with(&exp, verify_mode(cfg)?, Exec::default())?;
    let passed = tolerance_ok(cfg, report.epsilon) && (!cfg.strict || report.bound_respected);
    Ok(RunOutcome {
        artifact: report.to_json()?,
        passed,
    })
}

fn run_bound(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let (n, k) = (need(cfg.n, "--n")?, need(cfg.k, "--k")?);
    let eps = cfg
        .eps
        .ok_or_else(|| CliError::usage("--eps", "required for bound"))?;
    let b = total_bound(n, k, eps).map_err(|e| CliError::usage("--eps", e.to_string()))?;
    let artifact = match format_or(cfg, Format::Json) {
        Format::Json => b.to_json()?,
        Format::Csv => b.to_csv()?,
    };
    Ok(RunOutcome {
        artifact,
        passed: true,
    })
}

fn run_sweep_cmd(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    if cfg.experiment.is_some() {
        return Err(CliError::usage(
            "--experiment",
            "sweep always starts from the reference experiment",
        ));
    }
    let (n, k) = (need(cfg.n, "--n")?, need(cfg.k, "--k")?);
    reference_experiment(n, k).map_err(|e| CliError::usage("--n/--k", e.to_string()))?;
    let (noise, grid, seed) = match &cfg.noise {
        NoiseArg::Perturb(v) => (
            SweepNoise::Perturb,
            v.clone(),
            need_seed(cfg, "the state is perturbed")?,
        ),
        NoiseArg::Rotate {
            label,
            party,
            angles,
        } => {
            let party = party.unwrap_or(if *label == Label::D { n } else { 1 });
            if party > n {
                return Err(CliError::usage(
                    "--noise",
                    format!("party {party} outside 1..={n}"),
                ));
            }
            (
                SweepNoise::Rotate {
                    party,
                    label: *label,
                },
                angles.clone(),
                cfg.seed.unwrap_or(0),
            )
        }
        NoiseArg::None | NoiseArg::Shots(_) => {
            return Err(CliError::usage(
                "--noise",
                "sweep needs perturb:<list> or rotate..:<list>",
            ))
        }
    };
    let rows = run_sweep(n, k, noise, &grid, seed, verify_mode(cfg)?, Exec::default())
        .map_err(|e| CliError::usage("--noise", e.to_string()))?;
    let artifact = match format_or(cfg, Format::Csv) {
        Format::Csv => sweep_to_csv(&rows)?,
        Format::Json => sweep_to_json(&rows)?,
    };
    let passed = rows
        .iter()
        .all(|r| tolerance_ok(cfg, r.epsilon) && (!cfg.strict || r.bound_respected));
    Ok(RunOutcome { artifact, passed })
}

fn run_oracle(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    if !(2..=ORACLE_MAX_N).contains(&cfg.max_n) {
        return Err(CliError::usage(
            "--max-n",
            format!("must lie in 2..={ORACLE_MAX_N}"),
        ));
    }
    let mut rows = Vec::new();
    for n in 2..=cfg.max_n {
        for k in 1..n {
            let formula = swap_count(n, k)?;
            let enumeration = swap_count_oracle(n, k)?;
            rows.push(OracleRow {
                n,
                k,
                formula,
                enumeration,
                agree: formula == enumeration,
            });
        }
    }
    let passed = rows.iter().all(|r| r.agree);
    let artifact = match format_or(cfg, Format::Json) {
        Format::Json => to_json_string(&rows)?,
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.k.to_string(),
                        r.formula.to_string(),
                        r.enumeration.to_string(),
                        r.agree.to_string(),
                    ]
                })
                .collect();
            to_csv_string(&ORACLE_CSV_HEADER, &table)?
        }
    };
    Ok(RunOutcome { artifact, passed })
}

/// Runs the command and writes the artifact to `--out` when given.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    if let Some(t) = cfg.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::usage("--tolerance", "must be finite and >= 0"));
        }
    }
    let outcome = match cfg.command {
        Command::Verify => run_verify(cfg),
        Command::Certify => run_certify(cfg),
        Command::Bound => run_bound(cfg),
        Command::Sweep => run_sweep_cmd(cfg),
        Command::Oracle => run_oracle(cfg),
    }?;
    if let Some(path) = &cfg.out {
        write_artifact(path, &outcome.artifact)?;
    }
    Ok(outcome)
}

fn write_artifact(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: Command, n: usize, k: usize) -> RunConfig {
        RunConfig {
            n: Some(n),
            k: Some(k),
            ..RunConfig::new(command)
        }
    }

    #[test]
    fn reference_verify_passes_tight_tolerance() {
        let mut c = cfg(Command::Verify, 4, 2);
        c.tolerance = Some(1e-12);
        let out = run(&c).unwrap();
        assert!(out.passed);
        let v: serde_json::Value = serde_json::from_str(&out.artifact).unwrap();
        assert!(v["epsilon"].as_f64().unwrap() <= 1e-12);
    }

    #[test]
    fn bound_at_zero() {
        let mut c = cfg(Command::Bound, 4, 2);
        c.eps = Some(0.0);
        let v: serde_json::Value = serde_json::from_str(&run(&c).unwrap().artifact).unwrap();
        assert_eq!(v["total"].as_f64().unwrap(), 0.0);
    }

    #[test]
    fn missing_inputs_are_usage_errors() {
        let c = RunConfig::new(Command::Verify);
        assert!(matches!(run(&c), Err(CliError::Usage { flag, .. }) if flag == "--n"));
        let c = cfg(Command::Bound, 4, 2);
        assert!(matches!(run(&c), Err(CliError::Usage { flag, .. }) if flag == "--eps"));
        let mut c = cfg(Command::Verify, 4, 2);
        c.noise = NoiseArg::Perturb(vec![0.1]);
        assert!(matches!(run(&c), Err(CliError::Usage { flag, .. }) if flag == "--seed"));
        let mut c = cfg(Command::Verify, 4, 2);
        c.shots = Shots::Count(10);
        c.noise = NoiseArg::Shots(20);
        assert!(matches!(run(&c), Err(CliError::Usage { flag, .. }) if flag == "--shots"));
        let c = cfg(Command::Verify, 4, 4);
        assert!(matches!(run(&c), Err(CliError::Usage { .. })));
    }

    #[test]
    fn tolerance_failure() {
        let mut c = cfg(Command::Verify, 3, 1);
        c.noise = NoiseArg::Rotate {
            label: Label::X,
            party: Some(2),
            angles: vec![0.1],
        };
        c.tolerance = Some(1e-6);
        let out = run(&c).unwrap();
        assert!(!out.passed);
        assert_eq!(out.exit_code(), 1);
    }

    #[test]
    fn oracle_table() {
        let mut c = RunConfig::new(Command::Oracle);
        c.max_n = 6;
        c.format = Some(Format::Csv);
        let out = run(&c).unwrap();
        assert!(out.passed);
        assert!(out.artifact.starts_with("n,k,formula,enumeration,agree\n"));
        assert_eq!(out.artifact.lines().count(), 1 + (1 + 2 + 3 + 4 + 5));
        c.max_n = 1;
        assert!(run(&c).is_err());
    }
}
