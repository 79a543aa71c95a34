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

//! Finite-shot estimation of correlators.
//!
//! The factors of a setting act on distinct parties and therefore commute,
//! so they can be measured jointly. The exact joint distribution follows
//! from rotating each measured party into its observable's eigenbasis; shot
//! counts are then drawn from that distribution by sequential conditional
//! binomials.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::experiment::{ExperimentSpec, Label};
use crate::observable::{expectation, LocalObservable, Matrix2, SettingProduct};
use crate::state::{apply_2x2_in_place, PureState};

/// Distribution of the product of outcomes over the computational
/// eigenbasis. `values[i]` is the outcome product for basis index `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub values: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.probabilities)
            .map(|(v, p)| v * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let second: f64 = self
            .values
            .iter()
            .zip(&self.probabilities)
            .map(|(v, p)| v * v * p)
            .sum();
        (second - m * m).max(0.0)
    }

    /// Standard error of the sample mean over `shots` draws.
    pub fn standard_error(&self, shots: u64) -> f64 {
        (self.variance() / shots as f64).sqrt()
    }

    /// Draws `shots` outcomes and returns their empirical mean.
    pub fn sample_mean(&self, shots: u64, rng: &mut ChaCha8Rng) -> Result<f64> {
        if shots == 0 {
            return Err(Error::Domain("cannot sample zero shots".into()));
        }
        let mut remaining = shots;
        let mut mass_left: f64 = self.probabilities.iter().sum();
        let mut total = 0.0;
        for (&p, &v) in self.probabilities.iter().zip(&self.values) {
            if remaining == 0 {
                break;
            }
            if p <= 0.0 {
                continue;
            }
            let q = if mass_left <= p {
                1.0
            } else {
                (p / mass_left).clamp(0.0, 1.0)
            };
            let count = Binomial::new(remaining, q)
                .map_err(|e| Error::Domain(format!("binomial sampling failed: {e}")))?
                .sample(rng);
            total += count as f64 * v;
            remaining -= count;
            mass_left -= p;
        }
        Ok(total / shots as f64)
    }
}

/// Exact joint distribution of measuring every factor of `setting`.
pub fn outcome_distribution(
    state: &PureState,
    setting: &SettingProduct,
) -> Result<OutcomeDistribution> {
    let n = state.n_qubits();
    let mut amps = state.amplitudes().to_vec();
    let mut eigenvalues: Vec<Option<[f64; 2]>> = vec![None; n];
    for f in setting.factors() {
        if f.party() > n {
            return Err(Error::PartyOutOfRange {
                party: f.party(),
                n_qubits: n,
            });
        }
        let (vals, vecs) = f.matrix().hermitian_eigen();
        apply_2x2_in_place(&mut amps, f.party() - 1, &vecs.adjoint());
        eigenvalues[f.party() - 1] = Some(vals);
    }
    let values = (0..amps.len())
        .map(|idx| {
            eigenvalues
                .iter()
                .enumerate()
                .filter_map(|(bit, ev)| ev.map(|ev| ev[(idx >> bit) & 1]))
                .product()
        })
        .collect();
    let probabilities = amps.iter().map(|a| a.norm_sqr()).collect();
    Ok(OutcomeDistribution {
        values,
        probabilities,
    })
}

/// Probabilities of every outcome string `a` when all parties measure
/// their physical Z; bit `i - 1` of the index is party `i`'s outcome, with
/// outcome 0 meaning eigenvalue +1.
pub fn z_basis_distribution(exp: &ExperimentSpec) -> Result<Vec<f64>> {
    let mut amps = exp.state().amplitudes().to_vec();
    for party in 1..=exp.n() {
        let z = exp.observable(party, Label::Z)?.matrix();
        let (_, vecs) = z.hermitian_eigen();
        // columns ordered (+1, -1)
        let [[a, b], [c, d]] = vecs.entries();
        let basis = Matrix2::new([[b, a], [d, c]]);
        apply_2x2_in_place(&mut amps, party - 1, &basis.adjoint());
    }
    Ok(amps.iter().map(|a| a.norm_sqr()).collect())
}

fn check_assigned(exp: &ExperimentSpec, factor: &LocalObservable) -> Result<()> {
    let party = factor.party();
    let tol = 1e-12;
    let mut candidates = vec![
        *exp.observable(party, Label::X)?.matrix(),
        *exp.observable(party, Label::Z)?.matrix(),
    ];
    if let Ok(d) = exp.observable(party, Label::D) {
        candidates.push(*d.matrix());
    }
    candidates.push(*exp.projector(party, 0)?.matrix());
    candidates.push(*exp.projector(party, 1)?.matrix());
    if candidates
        .iter()
        .any(|m| m.max_abs_diff(factor.matrix()) <= tol)
    {
        Ok(())
    } else {
        Err(Error::UnassignedOperator(format!(
            "{} on party {party} does not match any assigned observable",
            factor.kind()
        )))
    }
}

/// Empirical mean of the outcome product over `shots` draws. `shots == 0`
/// returns the exact expectation.
pub fn sample_correlator(
    exp: &ExperimentSpec,
    setting: &SettingProduct,
    shots: u64,
    seed: u64,
) -> Result<f64> {
    for f in setting.factors() {
        check_assigned(exp, f)?;
    }
    if shots == 0 {
        return expectation(exp.state(), setting);
    }
    let dist = outcome_distribution(exp.state(), setting)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    dist.sample_mean(shots, &mut rng)
}
