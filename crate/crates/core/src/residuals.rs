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

//! Numerical residuals of the operator identities the ideal statistics
//! imply. On the reference experiment every residual vanishes; under noise
//! each is compared with its closed-form envelope in [`crate::bounds`].

use serde::{Deserialize, Serialize};

use crate::combinatorics::weight_strings;
use crate::error::Result;
use crate::exec::Exec;
use crate::experiment::{ExperimentSpec, Label};
use crate::io::to_json_string;
use crate::state::{inner, PureState, C64};
use crate::verifier::cyclic_party;

/// Maximum residual of each identity family over all cyclic shifts and
/// admissible strings.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IdentityResiduals {
    /// `|| P X_{C_{n-1}} psi - P X_{A_n} psi ||`
    pub relabel_x: f64,
    /// `|| P Z_{C_{n-1}} psi + P Z_{A_n} psi ||`
    pub relabel_z: f64,
    /// `| <P X_{C_{n-1}} psi, P Z_{A_n} psi> |`
    pub orthogonality: f64,
    /// `|| P D_{A_n} psi - P (X_{A_n} + Z_{A_n})/sqrt(2) psi ||`
    pub d_substitution: f64,
    /// `|| P D_{A_n} psi - P (X_{C_{n-1}} - Z_{C_{n-1}})/sqrt(2) psi ||`
    pub d_substitution_cyclic: f64,
    /// `|| P (X Z + Z X)_{A_n} psi ||`
    pub anticommutation: f64,
    /// `|| P (X Z + Z X)_{C_{n-1}} psi ||`
    pub anticommutation_cyclic: f64,
    /// `|| (... P^0_i ... X_j P^1_j ... - ... X_i P^1_i ... P^0_j ...) psi ||`
    pub swapping: f64,
}

impl IdentityResiduals {
    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }

    fn merge(self, o: IdentityResiduals) -> IdentityResiduals {
        IdentityResiduals {
            relabel_x: self.relabel_x.max(o.relabel_x),
            relabel_z: self.relabel_z.max(o.relabel_z),
            orthogonality: self.orthogonality.max(o.orthogonality),
            d_substitution: self.d_substitution.max(o.d_substitution),
            d_substitution_cyclic: self.d_substitution_cyclic.max(o.d_substitution_cyclic),
            anticommutation: self.anticommutation.max(o.anticommutation),
            anticommutation_cyclic: self.anticommutation_cyclic.max(o.anticommutation_cyclic),
            swapping: self.swapping.max(o.swapping),
        }
    }
}

pub fn identity_residuals(exp: &ExperimentSpec) -> Result<IdentityResiduals> {
    identity_residuals_with(exp, Exec::default())
}

pub fn identity_residuals_with(exp: &ExperimentSpec, exec: Exec) -> Result<IdentityResiduals> {
    let n = exp.n();
    let k = exp.k();
    let mut jobs = Vec::new();
    for shift in 0..n - 1 {
        for a in weight_strings(n - 2, k - 1) {
            jobs.push((shift, a));
        }
    }
    let prefix_parts = exec.try_map(&jobs, |(shift, a)| prefix_residuals(exp, *shift, a))?;
    let swapping = swapping_residual(exp, exec)?;
    Ok(prefix_parts
        .into_iter()
        .fold(IdentityResiduals::default(), IdentityResiduals::merge)
        .merge(IdentityResiduals {
            swapping,
            ..Default::default()
        }))
}

fn prefix_residuals(exp: &ExperimentSpec, shift: usize, a: &[u8]) -> Result<IdentityResiduals> {
    let n = exp.n();
    let mut projected = exp.state().clone();
    for (j, &bit) in a.iter().enumerate() {
        let party = cyclic_party(n, shift, j + 1);
        projected = projected.apply_on_party(party, exp.projector(party, bit)?.matrix())?;
    }
    let c = cyclic_party(n, shift, n - 1);
    let on = |party: usize, label: Label, v: &PureState| -> Result<PureState> {
        v.apply_on_party(party, exp.observable(party, label)?.matrix())
    };
    let xc = on(c, Label::X, &projected)?;
    let zc = on(c, Label::Z, &projected)?;
    let xn = on(n, Label::X, &projected)?;
    let zn = on(n, Label::Z, &projected)?;
    let dn = on(n, Label::D, &projected)?;
    let r2 = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);

    let anti = |party: usize| -> Result<f64> {
        let xz = on(party, Label::X, &on(party, Label::Z, &projected)?)?;
        let zx = on(party, Label::Z, &on(party, Label::X, &projected)?)?;
        Ok(xz.add(&zx)?.norm())
    };

    Ok(IdentityResiduals {
        relabel_x: xc.distance(&xn)?,
        relabel_z: zc.add(&zn)?.norm(),
        orthogonality: inner(&xc, &zn)?.norm(),
        d_substitution: dn.distance(&xn.add(&zn)?.scale(r2))?,
        d_substitution_cyclic: dn.distance(&xc.sub(&zc)?.scale(r2))?,
        anticommutation: anti(n)?,
        anticommutation_cyclic: anti(c)?,
        swapping: 0.0,
    })
}

/// Max over every weight-`k` string `a` and every pair `(i, j)` with
/// `a_i = 0`, `a_j = 1` of `|| X_j P^a psi - X_i P^{a'} psi ||`, where `a'`
/// is `a` with positions `i` and `j` exchanged.
fn swapping_residual(exp: &ExperimentSpec, exec: Exec) -> Result<f64> {
    let n = exp.n();
    let k = exp.k();
    let strings: Vec<usize> = (0..1usize << n)
        .filter(|a| a.count_ones() as usize == k)
        .collect();
    let project = |a: usize| -> Result<PureState> {
        let mut v = exp.state().clone();
        for party in 1..=n {
            let bit = ((a >> (party - 1)) & 1) as u8;
            v = v.apply_on_party(party, exp.projector(party, bit)?.matrix())?;
        }
        Ok(v)
    };
    let projected: std::collections::HashMap<usize, PureState> = strings
        .iter()
        .copied()
        .zip(exec.try_map(&strings, |&a| project(a))?)
        .collect();
    let per_string = exec.try_map(&strings, |&a| {
        let mut worst: f64 = 0.0;
        for i in 1..=n {
            for j in 1..=n {
                let (mi, mj) = (1usize << (i - 1), 1usize << (j - 1));
                if a & mi != 0 || a & mj == 0 {
                    continue;
                }
                let swapped = (a | mi) & !mj;
                let left =
                    projected[&a].apply_on_party(j, exp.observable(j, Label::X)?.matrix())?;
                let right =
                    projected[&swapped].apply_on_party(i, exp.observable(i, Label::X)?.matrix())?;
                worst = worst.max(left.distance(&right)?);
            }
        }
        Ok::<_, crate::error::Error>(worst)
    })?;
    Ok(per_string.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{perturb_state, reference_experiment};

    #[test]
    fn reference_residuals_vanish() {
        for (n, k) in [(2, 1), (3, 1), (4, 2), (5, 2), (6, 3)] {
            let r = identity_residuals(&reference_experiment(n, k).unwrap()).unwrap();
            for v in [
                r.relabel_x,
                r.relabel_z,
                r.orthogonality,
                r.d_substitution,
                r.d_substitution_cyclic,
                r.anticommutation,
                r.anticommutation_cyclic,
                r.swapping,
            ] {
                assert!(v <= 1e-10, "({n},{k}) {r:?}");
            }
        }
    }

    #[test]
    fn perturbation_makes_residuals_positive() {
        let p = perturb_state(&reference_experiment(4, 2).unwrap(), 0.1, 6).unwrap();
        let r = identity_residuals(&p).unwrap();
        assert!(r.relabel_x > 0.0 && r.swapping > 0.0);
        let seq = identity_residuals_with(&p, Exec::Sequential).unwrap();
        assert_eq!(seq, r);
    }

    #[test]
    fn json_is_keyed_by_family() {
        let r = identity_residuals(&reference_experiment(3, 1).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert!(v.get("anticommutation").is_some());
        assert!(v.get("swapping").is_some());
    }
}
