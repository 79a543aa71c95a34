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

//! End-to-end certification of one experiment, and sweeps over noise
//! strength.

use serde::{Deserialize, Serialize};

use crate::bounds::{total_bound, BoundBreakdown};
use crate::error::Result;
use crate::exec::Exec;
use crate::experiment::{
    perturb_state, reference_experiment, rotate_measurement, ExperimentSpec, Label,
};
use crate::io::{fmt_f64, to_csv_string, to_json_string};
use crate::isometry::{certify_measurement_with, state_distance_with};
use crate::residuals::{identity_residuals_with, IdentityResiduals};
use crate::verifier::{verify_with, zbasis_distribution_check, VerifyMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDistance {
    pub party: usize,
    pub label: Label,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub max_offsector_probability: f64,
    pub empirical_distance: f64,
    pub dicke_fidelity: f64,
    pub best_junk_fidelity: f64,
    pub measurement_distances: Vec<MeasurementDistance>,
    pub residuals: IdentityResiduals,
    pub bound: BoundBreakdown,
    pub bound_respected: bool,
}

impl CertificationReport {
    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }

    pub fn max_measurement_distance(&self) -> f64 {
        self.measurement_distances
            .iter()
            .map(|m| m.distance)
            .fold(0.0, f64::max)
    }
}

/// Exact-statistics certification.
pub fn certify(exp: &ExperimentSpec) -> Result<CertificationReport> {
    certify_with(exp, VerifyMode::Exact, Exec::default())
}

/// `epsilon` comes from the verifier in `mode`; distances are always exact.
pub fn certify_with(
    exp: &ExperimentSpec,
    mode: VerifyMode,
    exec: Exec,
) -> Result<CertificationReport> {
    let stats = verify_with(exp, mode, exec)?;
    let sd = state_distance_with(exp, exec)?;
    let labels = exp.labels();
    let distances = exec.try_map(&labels, |&(party, label)| {
        Ok::<_, crate::error::Error>(MeasurementDistance {
            party,
            label,
            distance: certify_measurement_with(exp, party, label, &sd.junk, Exec::Sequential)?,
        })
    })?;
    let bound = total_bound(exp.n(), exp.k(), stats.epsilon)?;
    Ok(CertificationReport {
        n: exp.n(),
        k: exp.k(),
        epsilon: stats.epsilon,
        max_offsector_probability: zbasis_distribution_check(exp)?,
        empirical_distance: sd.l2_distance,
        dicke_fidelity: sd.dicke_fidelity,
        best_junk_fidelity: sd.best_junk_fidelity,
        measurement_distances: distances,
        residuals: identity_residuals_with(exp, exec)?,
        bound_respected: sd.l2_distance <= bound.total,
        bound,
    })
}

/// Noise family swept by [`run_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepNoise {
    /// State tilt by the swept angle.
    Perturb,
    /// Rotation of one observable by the swept angle.
    Rotate { party: usize, label: Label },
}

impl SweepNoise {
    pub fn name(&self) -> String {
        match self {
            SweepNoise::Perturb => "state_perturbation".to_string(),
            SweepNoise::Rotate { party, label } => format!("measurement_rotation_{label}{party}"),
        }
    }

    pub fn apply(&self, exp: &ExperimentSpec, param: f64, seed: u64) -> Result<ExperimentSpec> {
        match *self {
            SweepNoise::Perturb => perturb_state(exp, param, seed),
            SweepNoise::Rotate { party, label } => rotate_measurement(exp, party, label, param),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub noise_kind: String,
    pub noise_param: f64,
    pub epsilon: f64,
    pub empirical_distance: f64,
    pub fidelity: f64,
    pub delta1: f64,
    pub total_bound: f64,
    pub bound_respected: bool,
}

pub const SWEEP_CSV_HEADER: [&str; 10] = [
    "n",
    "k",
    "noise_kind",
    "noise_param",
    "epsilon",
    "empirical_distance",
    "fidelity",
    "delta1",
    "total_bound",
    "bound_respected",
];

pub fn sweep_to_csv(rows: &[SweepRow]) -> Result<String> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.k.to_string(),
                r.noise_kind.clone(),
                fmt_f64(r.noise_param),
                fmt_f64(r.epsilon),
                fmt_f64(r.empirical_distance),
                fmt_f64(r.fidelity),
                fmt_f64(r.delta1),
                fmt_f64(r.total_bound),
                r.bound_respected.to_string(),
            ]
        })
        .collect();
    to_csv_string(&SWEEP_CSV_HEADER, &rows)
}

pub fn sweep_to_json(rows: &[SweepRow]) -> Result<String> {
    to_json_string(rows)
}

/// Certifies the reference `(n, k)` experiment under each noise parameter.
/// Rows follow the order of `params`.
pub fn run_sweep(
    n: usize,
    k: usize,
    noise: SweepNoise,
    params: &[f64],
    seed: u64,
    mode: VerifyMode,
    exec: Exec,
) -> Result<Vec<SweepRow>> {
    let reference = reference_experiment(n, k)?;
    exec.try_map(params, |&param| {
        let exp = noise.apply(&reference, param, seed)?;
        let report = certify_with(&exp, mode, Exec::Sequential)?;
        Ok(SweepRow {
            n,
            k,
            noise_kind: noise.name(),
            noise_param: param,
            epsilon: report.epsilon,
            empirical_distance: report.empirical_distance,
            fidelity: report.dicke_fidelity,
            delta1: report.bound.delta1,
            total_bound: report.bound.total,
            bound_respected: report.bound_respected,
        })
    })
}
