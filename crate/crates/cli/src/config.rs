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

//! Command-line flags, the flat JSON config file and their merge.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use dicke_selftest::Label;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    Certify,
    Bound,
    Sweep,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// `--shots` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Shots {
    #[default]
    Exact,
    Count(u64),
}

impl FromStr for Shots {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "exact" {
            return Ok(Shots::Exact);
        }
        match s.parse::<u64>() {
            Ok(0) => Ok(Shots::Exact),
            Ok(c) => Ok(Shots::Count(c)),
            Err(_) => Err(format!("expected a shot count or 'exact', got '{s}'")),
        }
    }
}

/// `--noise` value.
///
/// Grammar: `none`, `perturb:T[,T..]`, `rotate[-x|-z|-d][@P]:T[,T..]`,
/// `shots:COUNT`. A rotation without `@P` lists one angle per party; with
/// `@P` it rotates party `P` only. In a sweep the list is the grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum NoiseArg {
    #[default]
    None,
    Perturb(Vec<f64>),
    Rotate {
        label: Label,
        party: Option<usize>,
        angles: Vec<f64>,
    },
    Shots(u64),
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    let out = s
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("bad angle '{t}'"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        return Err("empty parameter list".into());
    }
    Ok(out)
}

impl FromStr for NoiseArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "none" {
            return Ok(NoiseArg::None);
        }
        let (kind, param) = s
            .split_once(':')
            .ok_or_else(|| format!("expected <kind>:<param>, got '{s}'"))?;
        match kind {
            "perturb" => Ok(NoiseArg::Perturb(parse_list(param)?)),
            "shots" => param
                .parse::<u64>()
                .ok()
                .filter(|&c| c > 0)
                .map(NoiseArg::Shots)
                .ok_or_else(|| format!("bad shot count '{param}'")),
            _ if kind.starts_with("rotate") => {
                let rest = &kind["rotate".len()..];
                let (label_part, party) = match rest.split_once('@') {
                    Some((l, p)) => {
                        let p = p
                            .parse::<usize>()
                            .ok()
                            .filter(|&p| p >= 1)
                            .ok_or_else(|| format!("bad party '{p}'"))?;
                        (l, Some(p))
                    }
                    None => (rest, None),
                };
                let label = match label_part {
                    "" | "-x" => Label::X,
                    "-z" => Label::Z,
                    "-d" => Label::D,
                    other => return Err(format!("unknown rotation target '{other}'")),
                };
                Ok(NoiseArg::Rotate {
                    label,
                    party,
                    angles: parse_list(param)?,
                })
            }
            other => Err(format!("unknown noise kind '{other}'")),
        }
    }
}

impl fmt::Display for NoiseArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            NoiseArg::None => write!(f, "none"),
            NoiseArg::Perturb(v) => write!(f, "perturb:{}", list(v)),
            NoiseArg::Shots(c) => write!(f, "shots:{c}"),
            NoiseArg::Rotate {
                label,
                party,
                angles,
            } => {
                let l = label.to_string().to_lowercase();
                match party {
                    Some(p) => write!(f, "rotate-{l}@{p}:{}", list(angles)),
                    None => write!(f, "rotate-{l}:{}", list(angles)),
                }
            }
        }
    }
}

#[derive(Debug, Parser, Default)]
#[command(
    name = "dicke-selftest",
    version,
    about = "Certifies Dicke-state experiments from correlator statistics"
)]
pub struct Cli {
    /// verify | certify | bound | sweep | oracle (may come from --config)
    #[arg(value_enum)]
    pub command: Option<Command>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// none, perturb:T, rotate[-x|-z|-d][@P]:T,.., shots:COUNT
    #[arg(long)]
    pub noise: Option<NoiseArg>,
    /// Shots per setting, or `exact`
    #[arg(long)]
    pub shots: Option<Shots>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Deviation fed to `bound`
    #[arg(long)]
    pub eps: Option<f64>,
    /// Fail (exit 1) when epsilon exceeds this value
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Fail (exit 1) when the empirical distance exceeds the bound
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Experiment JSON replacing the generated reference experiment
    #[arg(long)]
    pub experiment: Option<PathBuf>,
    #[arg(long = "max-n")]
    pub max_n: Option<usize>,
    /// Flat JSON file with the same keys; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Shot value in a config file: a count or `"exact"`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FileShots {
    Count(u64),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<Command>,
    n: Option<usize>,
    k: Option<usize>,
    noise: Option<String>,
    shots: Option<FileShots>,
    seed: Option<u64>,
    eps: Option<f64>,
    tolerance: Option<f64>,
    strict: Option<bool>,
    out: Option<PathBuf>,
    format: Option<Format>,
    experiment: Option<PathBuf>,
    #[serde(alias = "max-n")]
    max_n: Option<usize>,
}

/// Fully resolved run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub noise: NoiseArg,
    pub shots: Shots,
    pub seed: Option<u64>,
    pub eps: Option<f64>,
    pub tolerance: Option<f64>,
    pub strict: bool,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub experiment: Option<PathBuf>,
    pub max_n: usize,
}

pub const DEFAULT_MAX_N: usize = 10;

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            n: None,
            k: None,
            noise: NoiseArg::None,
            shots: Shots::Exact,
            seed: None,
            eps: None,
            tolerance: None,
            strict: false,
            out: None,
            format: None,
            experiment: None,
            max_n: DEFAULT_MAX_N,
        }
    }

    /// Merges parsed flags over the optional config file.
    pub fn resolve(cli: Cli) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::usage("--config", format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let command = cli.command.or(file.command).ok_or_else(|| {
            CliError::usage(
                "command",
                "missing subcommand (verify, certify, bound, sweep, oracle)",
            )
        })?;
        let noise = match (cli.noise, file.noise) {
            (Some(n), _) => n,
            (None, Some(text)) => text
                .parse()
                .map_err(|e: String| CliError::usage("--noise", e))?,
            (None, None) => NoiseArg::None,
        };
        let shots = match (cli.shots, file.shots) {
            (Some(s), _) => s,
            (None, Some(FileShots::Count(0))) => Shots::Exact,
            (None, Some(FileShots::Count(c))) => Shots::Count(c),
            (None, Some(FileShots::Text(t))) => t
                .parse()
                .map_err(|e: String| CliError::usage("--shots", e))?,
            (None, None) => Shots::Exact,
        };
        Ok(RunConfig {
            command,
            n: cli.n.or(file.n),
            k: cli.k.or(file.k),
            noise,
            shots,
            seed: cli.seed.or(file.seed),
            eps: cli.eps.or(file.eps),
            tolerance: cli.tolerance.or(file.tolerance),
            strict: cli.strict || file.strict.unwrap_or(false),
            out: cli.out.or(file.out),
            format: cli.format.or(file.format),
            experiment: cli.experiment.or(file.experiment),
            max_n: cli.max_n.or(file.max_n).unwrap_or(DEFAULT_MAX_N),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_grammar() {
        assert_eq!("none".parse::<NoiseArg>().unwrap(), NoiseArg::None);
        assert_eq!(
            "perturb:0.01".parse::<NoiseArg>().unwrap(),
            NoiseArg::Perturb(vec![0.01])
        );
        assert_eq!(
            "rotate-z@3:0.1,0.2".parse::<NoiseArg>().unwrap(),
            NoiseArg::Rotate {
                label: Label::Z,
                party: Some(3),
                angles: vec![0.1, 0.2]
            }
        );
        assert_eq!(
            "rotate:0,0.05".parse::<NoiseArg>().unwrap(),
            NoiseArg::Rotate {
                label: Label::X,
                party: None,
                angles: vec![0.0, 0.05]
            }
        );
        assert_eq!(
            "shots:100".parse::<NoiseArg>().unwrap(),
            NoiseArg::Shots(100)
        );
        for bad in [
            "perturb",
            "perturb:x",
            "shots:0",
            "rotate-y:0.1",
            "rotate@0:0.1",
            "warp:1",
            "perturb:nan",
        ] {
            assert!(bad.parse::<NoiseArg>().is_err(), "{bad}");
        }
        for s in [
            "none",
            "perturb:0.01,0.02",
            "rotate-d@4:0.5",
            "rotate-x:0,0.1",
            "shots:7",
        ] {
            assert_eq!(s.parse::<NoiseArg>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn shots_values() {
        assert_eq!("exact".parse::<Shots>().unwrap(), Shots::Exact);
        assert_eq!("0".parse::<Shots>().unwrap(), Shots::Exact);
        assert_eq!("1000".parse::<Shots>().unwrap(), Shots::Count(1000));
        assert!("many".parse::<Shots>().is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("dicke-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.json");
        std::fs::write(
            &path,
            r#"{"command": "verify", "n": 5, "k": 2, "shots": "exact", "seed": 4, "max-n": 7}"#,
        )
        .unwrap();
        let cli = Cli::try_parse_from([
            "dicke-selftest",
            "--config",
            path.to_str().unwrap(),
            "--n",
            "4",
        ])
        .unwrap();
        let cfg = RunConfig::resolve(cli).unwrap();
        assert_eq!(cfg.command, Command::Verify);
        assert_eq!(
            (cfg.n, cfg.k, cfg.seed, cfg.max_n),
            (Some(4), Some(2), Some(4), 7)
        );

        std::fs::write(&path, r#"{"command": "verify", "bogus": 1}"#).unwrap();
        let cli =
            Cli::try_parse_from(["dicke-selftest", "--config", path.to_str().unwrap()]).unwrap();
        assert!(matches!(
            RunConfig::resolve(cli),
            Err(CliError::Usage { .. })
        ));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
