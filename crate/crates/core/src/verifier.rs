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

//! The correlator schedule that certifies `|D_n^k>`, and its evaluation on
//! an experiment.
//!
//! The schedule has two parts:
//!
//! * `Zbasis`: the probability of every weight-`k` outcome string when all
//!   parties measure Z; ideal value `1/C(n,k)`.
//! * Five correlator families. For a cyclic shift `c` of `(A_1, ..., A_{n-1})`
//!   giving `(C_1, ..., C_{n-1})` and a prefix string `a` of length `n - 2`
//!   and weight `k - 1`, the setting is
//!   `P^{a_1}_{C_1} ... P^{a_{n-2}}_{C_{n-2}} O_{C_{n-1}} O'_{A_n}` with
//!   `(O, O')` one of `XX, ZZ, XZ, XD, ZD`.
//!
//! Projectors are derived from each party's physical Z as
//! `P^a = (I + (-1)^a Z) / 2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, binomial_f64, bits_to_string, weight_strings};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::experiment::{ExperimentSpec, Label};
use crate::io::{fmt_f64, to_csv_string, to_json_string};
use crate::observable::{expectation, SettingProduct};
use crate::sampling::{outcome_distribution, z_basis_distribution, OutcomeDistribution};
use crate::state::check_dicke_params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    Zbasis,
    XX,
    ZZ,
    XZ,
    XD,
    ZD,
}

impl Family {
    pub const CORRELATORS: [Family; 5] =
        [Family::XX, Family::ZZ, Family::XZ, Family::XD, Family::ZD];

    /// Labels measured on `C_{n-1}` and `A_n`.
    fn labels(self) -> Option<(Label, Label)> {
        match self {
            Family::Zbasis => None,
            Family::XX => Some((Label::X, Label::X)),
            Family::ZZ => Some((Label::Z, Label::Z)),
            Family::XZ => Some((Label::X, Label::Z)),
            Family::XD => Some((Label::X, Label::D)),
            Family::ZD => Some((Label::Z, Label::D)),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One required correlator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SettingDescriptor {
    pub family: Family,
    /// Length `n` for `Zbasis`, `n - 2` otherwise.
    pub a: Vec<u8>,
    /// Unused (0) for `Zbasis`.
    pub cyclic_shift: usize,
}

/// Party `C_j` (1-indexed `j`) of the cyclic relabeling with shift `c`.
pub fn cyclic_party(n: usize, shift: usize, j: usize) -> usize {
    (shift + j - 1) % (n - 1) + 1
}

impl SettingDescriptor {
    /// The physical operator product this descriptor prescribes.
    pub fn setting_product(&self, exp: &ExperimentSpec) -> Result<SettingProduct> {
        let n = exp.n();
        let mut factors = Vec::with_capacity(n);
        match self.family.labels() {
            None => {
                if self.a.len() != n {
                    return Err(Error::Domain("Zbasis string must have length n".into()));
                }
                for (i, &bit) in self.a.iter().enumerate() {
                    factors.push(exp.projector(i + 1, bit)?);
                }
            }
            Some((on_c, on_last)) => {
                if self.a.len() != n - 2 || self.cyclic_shift >= n - 1 {
                    return Err(Error::Domain("malformed correlator descriptor".into()));
                }
                for (j, &bit) in self.a.iter().enumerate() {
                    factors.push(exp.projector(cyclic_party(n, self.cyclic_shift, j + 1), bit)?);
                }
                factors.push(*exp.observable(cyclic_party(n, self.cyclic_shift, n - 1), on_c)?);
                factors.push(*exp.observable(n, on_last)?);
            }
        }
        SettingProduct::new(factors)
    }
}

/// `C(n,k) + 5 (n-1) C(n-2, k-1)`.
pub fn settings_count(n: usize, k: usize) -> u128 {
    binomial(n as u64, k as u64) + 5 * (n as u128 - 1) * binomial(n as u64 - 2, k as u64 - 1)
}

/// The full schedule, ordered by family, then shift, then `a`
/// lexicographically.
pub fn required_settings(n: usize, k: usize) -> Result<Vec<SettingDescriptor>> {
    check_dicke_params(n, k)?;
    if k - 1 > n - 2 {
        return Err(Error::Domain(format!(
            "prefix weight {} exceeds prefix length {}",
            k - 1,
            n - 2
        )));
    }
    let mut out: Vec<SettingDescriptor> = weight_strings(n, k)
        .into_iter()
        .map(|a| SettingDescriptor {
            family: Family::Zbasis,
            a,
            cyclic_shift: 0,
        })
        .collect();
    let prefixes = weight_strings(n - 2, k - 1);
    for family in Family::CORRELATORS {
        for shift in 0..n - 1 {
            for a in &prefixes {
                out.push(SettingDescriptor {
                    family,
                    a: a.clone(),
                    cyclic_shift: shift,
                });
            }
        }
    }
    Ok(out)
}

/// Ideal value of a descriptor on the reference experiment.
pub fn ideal_value(d: &SettingDescriptor, n: usize, k: usize) -> f64 {
    let inv = 1.0 / binomial_f64(n, k);
    let sqrt2 = std::f64::consts::SQRT_2;
    match d.family {
        Family::Zbasis => inv,
        Family::XX => 2.0 * inv,
        Family::ZZ => -2.0 * inv,
        Family::XZ => 0.0,
        Family::XD => sqrt2 * inv,
        Family::ZD => -sqrt2 * inv,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerifyMode {
    Exact,
    /// Each setting is estimated from `shots` draws, seeded with
    /// `seed ^ ordinal` where `ordinal` is its schedule position.
    Sampled {
        shots: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub descriptor: SettingDescriptor,
    pub ideal: f64,
    pub measured: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatisticsReport {
    pub n: usize,
    pub k: usize,
    pub entries: Vec<ReportEntry>,
    /// `max |measured - ideal|` over the schedule.
    pub epsilon: f64,
    pub settings_count: usize,
}

#[derive(Serialize)]
struct EntryRow {
    family: Family,
    shift: usize,
    a: String,
    ideal: f64,
    measured: f64,
    deviation: f64,
}

#[derive(Serialize)]
struct ReportDoc {
    n: usize,
    k: usize,
    epsilon: f64,
    settings_count: usize,
    entries: Vec<EntryRow>,
}

pub const REPORT_CSV_HEADER: [&str; 6] = ["family", "shift", "a", "ideal", "measured", "deviation"];

impl StatisticsReport {
    fn rows(&self) -> Vec<EntryRow> {
        self.entries
            .iter()
            .map(|e| EntryRow {
                family: e.descriptor.family,
                shift: e.descriptor.cyclic_shift,
                a: bits_to_string(&e.descriptor.a),
                ideal: e.ideal,
                measured: e.measured,
                deviation: e.deviation,
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        to_json_string(&ReportDoc {
            n: self.n,
            k: self.k,
            epsilon: self.epsilon,
            settings_count: self.settings_count,
            entries: self.rows(),
        })
    }

    pub fn to_csv(&self) -> Result<String> {
        let rows: Vec<Vec<String>> = self
            .rows()
            .into_iter()
            .map(|r| {
                vec![
                    r.family.to_string(),
                    r.shift.to_string(),
                    r.a,
                    fmt_f64(r.ideal),
                    fmt_f64(r.measured),
                    fmt_f64(r.deviation),
                ]
            })
            .collect();
        to_csv_string(&REPORT_CSV_HEADER, &rows)
    }
}

pub fn verify(exp: &ExperimentSpec, mode: VerifyMode) -> Result<StatisticsReport> {
    verify_with(exp, mode, Exec::default())
}

/// Evaluates every required setting. Entries come back in schedule order
/// whatever `exec` is.
pub fn verify_with(exp: &ExperimentSpec, mode: VerifyMode, exec: Exec) -> Result<StatisticsReport> {
    let (n, k) = (exp.n(), exp.k());
    let schedule: Vec<(usize, SettingDescriptor)> =
        required_settings(n, k)?.into_iter().enumerate().collect();
    let entries = exec.try_map(&schedule, |(ordinal, d)| {
        let setting = d.setting_product(exp)?;
        let measured = match mode {
            VerifyMode::Exact => expectation(exp.state(), &setting)?,
            VerifyMode::Sampled { shots, seed } => {
                crate::sampling::sample_correlator(exp, &setting, shots, seed ^ *ordinal as u64)?
            }
        };
        let ideal = ideal_value(d, n, k);
        Ok::<_, Error>(ReportEntry {
            descriptor: d.clone(),
            ideal,
            measured,
            deviation: measured - ideal,
        })
    })?;
    let epsilon = entries
        .iter()
        .map(|e| e.deviation.abs())
        .fold(0.0, f64::max);
    Ok(StatisticsReport {
        n,
        k,
        settings_count: entries.len(),
        entries,
        epsilon,
    })
}

/// Exact outcome distributions of every scheduled setting, in schedule
/// order; used for per-entry standard errors.
pub fn schedule_distributions(exp: &ExperimentSpec) -> Result<Vec<OutcomeDistribution>> {
    required_settings(exp.n(), exp.k())?
        .iter()
        .map(|d| outcome_distribution(exp.state(), &d.setting_product(exp)?))
        .collect()
}

/// Largest probability of an all-Z outcome string whose weight is not `k`.
pub fn zbasis_distribution_check(exp: &ExperimentSpec) -> Result<f64> {
    let probs = z_basis_distribution(exp)?;
    Ok(probs
        .iter()
        .enumerate()
        .filter(|(idx, _)| idx.count_ones() as usize != exp.k())
        .map(|(_, &p)| p)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{perturb_state, reference_experiment};

    /// Counting oracle: enumerate every length-`n` string for Zbasis and
    /// every (shift, length-(n-2) string) for the correlator families.
    fn brute_force_count(n: usize, k: usize) -> usize {
        let z = (0..1usize << n)
            .filter(|i| i.count_ones() as usize == k)
            .count();
        let prefixes = (0..1usize << (n - 2))
            .filter(|i| i.count_ones() as usize == k - 1)
            .count();
        z + 5 * (n - 1) * prefixes
    }

    #[test]
    fn schedule_sizes() {
        assert_eq!(brute_force_count(4, 2), 36);
        assert_eq!(brute_force_count(3, 1), 13);
        assert_eq!(brute_force_count(2, 1), 7);
        assert_eq!(required_settings(4, 2).unwrap().len(), 36);
        assert_eq!(required_settings(3, 1).unwrap().len(), 13);
        let s21 = required_settings(2, 1).unwrap();
        assert_eq!(s21.len(), 7);
        assert_eq!(s21.iter().filter(|d| d.family == Family::Zbasis).count(), 2);
        assert!(s21
            .iter()
            .filter(|d| d.family != Family::Zbasis)
            .all(|d| d.a.is_empty()));
        for n in 2..=10 {
            for k in 1..n {
                let len = required_settings(n, k).unwrap().len();
                assert_eq!(len, brute_force_count(n, k));
                assert_eq!(len as u128, settings_count(n, k));
            }
        }
        assert!(required_settings(3, 3).is_err());
        assert!(required_settings(3, 0).is_err());
    }

    #[test]
    fn schedule_is_sorted_and_unique() {
        let s = required_settings(5, 2).unwrap();
        let mut sorted = s.clone();
        sorted.sort_by(|x, y| {
            (x.family, x.cyclic_shift, &x.a).cmp(&(y.family, y.cyclic_shift, &y.a))
        });
        sorted.dedup();
        assert_eq!(s, sorted);
    }

    #[test]
    fn cyclic_relabeling() {
        // n = 5: (A1..A4) shifted by 1 is (A2, A3, A4, A1)
        let c: Vec<usize> = (1..=4).map(|j| cyclic_party(5, 1, j)).collect();
        assert_eq!(c, vec![2, 3, 4, 1]);
        let c: Vec<usize> = (1..=4).map(|j| cyclic_party(5, 0, j)).collect();
        assert_eq!(c, vec![1, 2, 3, 4]);
    }

    #[test]
    fn ideal_values() {
        let d = |family| SettingDescriptor {
            family,
            a: vec![],
            cyclic_shift: 0,
        };
        assert!((ideal_value(&d(Family::Zbasis), 3, 1) - 1.0 / 3.0).abs() < 1e-16);
        assert!((ideal_value(&d(Family::ZZ), 4, 2) + 1.0 / 3.0).abs() < 1e-16);
        assert!((ideal_value(&d(Family::XD), 4, 2) - 2f64.sqrt() / 6.0).abs() < 1e-16);
        assert_eq!(ideal_value(&d(Family::XZ), 4, 2), 0.0);
    }

    #[test]
    fn reference_statistics_are_ideal() {
        for n in 2..=6 {
            for k in 1..n {
                let r = verify(&reference_experiment(n, k).unwrap(), VerifyMode::Exact).unwrap();
                assert!(r.epsilon <= 1e-12, "({n},{k}) eps {}", r.epsilon);
            }
        }
    }

    #[test]
    fn perturbed_epsilon_within_envelope() {
        let theta: f64 = 0.05;
        let exp = perturb_state(&reference_experiment(4, 2).unwrap(), theta, 1).unwrap();
        let r = verify(&exp, VerifyMode::Exact).unwrap();
        assert!(r.epsilon > 0.0);
        assert!(
            r.epsilon <= 2.0 * theta + theta * theta,
            "eps {}",
            r.epsilon
        );
    }

    #[test]
    fn offsector_probability() {
        let exp = reference_experiment(4, 2).unwrap();
        assert!(zbasis_distribution_check(&exp).unwrap() <= 1e-14);
        for theta in [0.01, 0.1, 0.5, 1.2] {
            let p = perturb_state(&exp, theta, 11).unwrap();
            let off = zbasis_distribution_check(&p).unwrap();
            assert!(off > 0.0 && off <= theta.sin().powi(2) + 1e-15);
        }
    }

    #[test]
    fn sequential_and_parallel_reports_agree() {
        let exp = perturb_state(&reference_experiment(5, 2).unwrap(), 0.1, 4).unwrap();
        let a = verify_with(&exp, VerifyMode::Exact, Exec::Sequential).unwrap();
        let b = verify_with(&exp, VerifyMode::Exact, Exec::Parallel).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let mode = VerifyMode::Sampled {
            shots: 1000,
            seed: 3,
        };
        let a = verify_with(&exp, mode, Exec::Sequential).unwrap();
        let b = verify_with(&exp, mode, Exec::Parallel).unwrap();
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    }

    #[test]
    fn report_serialization_shape() {
        let r = verify(&reference_experiment(3, 1).unwrap(), VerifyMode::Exact).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(v["entries"].as_array().unwrap().len(), 13);
        assert_eq!(v["entries"][0]["family"], "Zbasis");
        assert_eq!(v["entries"][0]["a"], "001");
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("family,shift,a,ideal,measured,deviation\n"));
        assert_eq!(csv.lines().count(), 14);
    }
}
