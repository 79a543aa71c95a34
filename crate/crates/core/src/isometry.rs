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

//! The certifying local isometry.
//!
//! Each party gets one ancilla qubit in `|0>`; the per-party circuit is
//! `H` on the ancilla, ancilla-controlled physical `Z`, `H` again, then
//! ancilla-controlled physical `X`. On the joint register this is
//!
//! ```text
//! Phi(|psi>|0...0>) = sum_a  X^{a_1}...X^{a_n} P^{a_1}...P^{a_n} |psi> |a>
//! ```
//!
//! The output is kept in branch form: ancilla string `a` maps to the
//! (unnormalized) system vector multiplying `|a>`. Ancilla indices follow the
//! same little-endian convention as system indices, and ancilla `i` belongs
//! to party `i`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::combinatorics::{binomial_f64, bits_to_string, index_to_bits};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::experiment::{ExperimentSpec, Label};
use crate::io::to_json_string;
use crate::observable::{LocalObservable, Matrix2};
use crate::state::{inner, weight_superposition, PureState, C64, COMBINED_QUBIT_CAP};

/// Branches at or below this norm are dropped from an output.
pub const BRANCH_NORM_FLOOR: f64 = 1e-14;

/// Junk branches at or below this norm are treated as missing.
pub const DEGENERATE_NORM: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct IsometryOutput {
    pub n: usize,
    pub k: usize,
    /// Ancilla index to system branch vector.
    pub branches: BTreeMap<usize, PureState>,
}

impl IsometryOutput {
    pub fn branch(&self, ancilla: usize) -> Option<&PureState> {
        self.branches.get(&ancilla)
    }

    /// `sum_a ||branch(a)||^2`, the squared norm of the joint vector.
    pub fn norm_sqr(&self) -> f64 {
        self.branches.values().map(PureState::norm_sqr).sum()
    }

    /// Marginal probability of each ancilla string.
    pub fn ancilla_probabilities(&self) -> BTreeMap<usize, f64> {
        self.branches
            .iter()
            .map(|(&a, b)| (a, b.norm_sqr()))
            .collect()
    }

    /// Largest `||self.branch(a) - other.branch(a)||` over the union of
    /// keys, with absent branches read as zero.
    pub fn max_branch_difference(&self, other: &IsometryOutput) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for key in self.branches.keys().chain(other.branches.keys()) {
            let d = match (self.branches.get(key), other.branches.get(key)) {
                (Some(a), Some(b)) => a.distance(b)?,
                (Some(a), None) | (None, Some(a)) => a.norm(),
                (None, None) => unreachable!(),
            };
            worst = worst.max(d);
        }
        Ok(worst)
    }

    /// `|| self - junk (x) ancilla ||_2` for a product target.
    pub fn distance_to_product(&self, junk: &PureState, ancilla: &PureState) -> Result<f64> {
        if ancilla.n_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                left: ancilla.n_qubits(),
                right: self.n,
            });
        }
        let mut total = 0.0;
        for (a, &coeff) in ancilla.amplitudes().iter().enumerate() {
            total += match self.branches.get(&a) {
                Some(b) => b.sub(&junk.scale(coeff))?.norm_sqr(),
                None => coeff.norm_sqr() * junk.norm_sqr(),
            };
        }
        for (a, b) in &self.branches {
            if *a >= ancilla.amplitudes().len() {
                total += b.norm_sqr();
            }
        }
        Ok(total.sqrt())
    }

    /// `<junk (x) ancilla | self>`.
    pub fn overlap_with_product(&self, junk: &PureState, ancilla: &PureState) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (a, b) in &self.branches {
            let coeff = ancilla.amplitudes().get(*a).copied().unwrap_or_default();
            if coeff != C64::new(0.0, 0.0) {
                acc += coeff.conj() * inner(junk, b)?;
            }
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            branches: BTreeMap<String, &'a [C64]>,
        }
        let branches = self
            .branches
            .iter()
            .map(|(&a, b)| (bits_to_string(&index_to_bits(a, self.n)), b.amplitudes()))
            .collect();
        to_json_string(&Doc { branches })
    }
}

fn check_combined_cap(n: usize) -> Result<()> {
    if 2 * n > COMBINED_QUBIT_CAP {
        return Err(Error::CapExceeded {
            requested: 2 * n,
            cap: COMBINED_QUBIT_CAP,
        });
    }
    Ok(())
}

fn physical_ops(exp: &ExperimentSpec) -> Result<Vec<(LocalObservable, [LocalObservable; 2])>> {
    (1..=exp.n())
        .map(|p| {
            Ok((
                *exp.observable(p, Label::X)?,
                [exp.projector(p, 0)?, exp.projector(p, 1)?],
            ))
        })
        .collect()
}

/// `X^{a} P^{a} |input>` for every ancilla string `a`, using the
/// experiment's physical operators.
pub fn isometry_formula_on(
    exp: &ExperimentSpec,
    input: &PureState,
    exec: Exec,
) -> Result<IsometryOutput> {
    let n = exp.n();
    check_combined_cap(n)?;
    if input.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            left: input.n_qubits(),
            right: n,
        });
    }
    let ops = physical_ops(exp)?;
    let branches = exec.map_range(1 << n, |a| {
        let mut v = input.clone();
        for (i, (x, proj)) in ops.iter().enumerate() {
            let bit = (a >> i) & 1;
            v = v.apply_on_party(i + 1, proj[bit].matrix())?;
            if bit == 1 {
                v = v.apply_on_party(i + 1, x.matrix())?;
            }
        }
        Ok::<_, Error>((a, v))
    });
    let mut out = BTreeMap::new();
    for item in branches {
        let (a, v) = item?;
        if v.norm() > BRANCH_NORM_FLOOR {
            out.insert(a, v);
        }
    }
    Ok(IsometryOutput {
        n,
        k: exp.k(),
        branches: out,
    })
}

pub fn apply_isometry_formula(exp: &ExperimentSpec) -> Result<IsometryOutput> {
    isometry_formula_on(exp, exp.state(), Exec::default())
}

/// Sparse joint register: ancilla index to system vector.
struct Register {
    n: usize,
    slots: BTreeMap<usize, PureState>,
}

impl Register {
    fn hadamard_on_ancilla(&mut self, party: usize) -> Result<()> {
        let mask = 1usize << (party - 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut next: BTreeMap<usize, PureState> = BTreeMap::new();
        for (&a, v) in &self.slots {
            let sign = if a & mask == 0 { 1.0 } else { -1.0 };
            for (target, factor) in [(a & !mask, h), (a | mask, sign * h)] {
                let term = v.scale(C64::new(factor, 0.0));
                let merged = match next.remove(&target) {
                    Some(prev) => prev.add(&term)?,
                    None => term,
                };
                next.insert(target, merged);
            }
        }
        self.slots = next;
        Ok(())
    }

    fn controlled(&mut self, party: usize, op: &Matrix2, exec: Exec) -> Result<()> {
        let mask = 1usize << (party - 1);
        let entries: Vec<(usize, PureState)> =
            std::mem::take(&mut self.slots).into_iter().collect();
        let updated = exec.try_map(&entries, |(a, v)| {
            if a & mask != 0 {
                Ok::<_, Error>((*a, v.apply_on_party(party, op)?))
            } else {
                Ok((*a, v.clone()))
            }
        })?;
        self.slots = updated.into_iter().collect();
        Ok(())
    }
}

/// Gate-level simulation of the per-party circuit, reorganized into branch
/// form keyed by ancilla string.
pub fn apply_isometry_circuit(exp: &ExperimentSpec) -> Result<IsometryOutput> {
    apply_isometry_circuit_with(exp, exp.state(), Exec::default())
}

pub fn apply_isometry_circuit_with(
    exp: &ExperimentSpec,
    input: &PureState,
    exec: Exec,
) -> Result<IsometryOutput> {
    let n = exp.n();
    check_combined_cap(n)?;
    let mut reg = Register {
        n,
        slots: BTreeMap::from([(0usize, input.clone())]),
    };
    for party in 1..=n {
        let z = *exp.observable(party, Label::Z)?.matrix();
        let x = *exp.observable(party, Label::X)?.matrix();
        reg.hadamard_on_ancilla(party)?;
        reg.controlled(party, &z, exec)?;
        reg.hadamard_on_ancilla(party)?;
        reg.controlled(party, &x, exec)?;
    }
    let branches = reg
        .slots
        .into_iter()
        .filter(|(_, v)| v.norm() > BRANCH_NORM_FLOOR)
        .collect();
    Ok(IsometryOutput {
        n: reg.n,
        k: exp.k(),
        branches,
    })
}

/// The isometry's ideal output `|Theta> = j (x) sum_{|a| = k} |a>`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealTheta {
    /// `X_1...X_k P^1_1...P^1_k P^0_{k+1}...P^0_n |psi>`, unnormalized.
    pub junk_branch: PureState,
    pub output: IsometryOutput,
}

impl IdealTheta {
    /// `||Theta||_2 = sqrt(C(n,k)) ||j||`.
    pub fn norm(&self) -> f64 {
        self.output.norm_sqr().sqrt()
    }
}

pub fn ideal_theta(exp: &ExperimentSpec) -> Result<IdealTheta> {
    let (n, k) = (exp.n(), exp.k());
    let mut j = exp.state().clone();
    for party in 1..=n {
        let outcome = u8::from(party <= k);
        j = j.apply_on_party(party, exp.projector(party, outcome)?.matrix())?;
    }
    for party in 1..=k {
        j = j.apply_on_party(party, exp.observable(party, Label::X)?.matrix())?;
    }
    let branches = (0..1usize << n)
        .filter(|a| a.count_ones() as usize == k)
        .map(|a| (a, j.clone()))
        .collect();
    Ok(IdealTheta {
        junk_branch: j,
        output: IsometryOutput { n, k, branches },
    })
}

/// Distance of the isometry output to `junk (x) |D_n^k>`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDistance {
    pub l2_distance: f64,
    pub dicke_fidelity: f64,
    /// Unit-norm junk with its phase chosen so the overlap with the output
    /// is real and nonnegative.
    pub junk: PureState,
    /// Largest fidelity over all unit junk vectors (diagnostic only).
    pub best_junk_fidelity: f64,
}

/// Compares `Phi(|psi>)` with `junk (x) |D_n^k>` where `junk` is the
/// normalized junk branch of [`ideal_theta`].
pub fn state_distance(exp: &ExperimentSpec) -> Result<StateDistance> {
    state_distance_with(exp, Exec::default())
}

pub fn state_distance_with(exp: &ExperimentSpec, exec: Exec) -> Result<StateDistance> {
    let (n, k) = (exp.n(), exp.k());
    let output = isometry_formula_on(exp, exp.state(), exec)?;
    let theta = ideal_theta(exp)?;
    let j_norm = theta.junk_branch.norm();
    if j_norm <= DEGENERATE_NORM {
        return Err(Error::Degenerate(
            "junk branch has zero norm; the state has no support on the reference weight-k string"
                .into(),
        ));
    }
    let junk = theta.junk_branch.scale(C64::new(1.0 / j_norm, 0.0));
    let dicke = weight_superposition(n, k);
    let overlap = output.overlap_with_product(&junk, &dicke)?;
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let junk = junk.scale(phase);
    let l2_distance = output.distance_to_product(&junk, &dicke)?;

    // Optimal junk is proportional to C(n,k)^{-1/2} sum_{|a|=k} branch(a).
    let mut w = PureState::zero_vector(n);
    for (a, b) in &output.branches {
        if a.count_ones() as usize == k {
            w = w.add(b)?;
        }
    }
    let best_junk_fidelity = w.norm_sqr() / binomial_f64(n, k);

    Ok(StateDistance {
        l2_distance,
        dicke_fidelity: overlap.norm_sqr(),
        junk,
        best_junk_fidelity,
    })
}

/// `M*|D_n^k>` on the ancilla register for the ideal counterpart of `label`.
fn ideal_target(n: usize, k: usize, party: usize, label: Label) -> Result<PureState> {
    weight_superposition(n, k).apply_on_party(party, &label.ideal_matrix())
}

/// `|| Phi(M|psi>) - junk (x) M*|D_n^k> ||_2` with `junk` from
/// [`state_distance`].
pub fn certify_measurement(exp: &ExperimentSpec, party: usize, label: Label) -> Result<f64> {
    let sd = state_distance(exp)?;
    certify_measurement_with(exp, party, label, &sd.junk, Exec::default())
}

pub fn certify_measurement_with(
    exp: &ExperimentSpec,
    party: usize,
    label: Label,
    junk: &PureState,
    exec: Exec,
) -> Result<f64> {
    let m = exp.observable(party, label)?;
    let moved = exp.state().apply_on_party(party, m.matrix())?;
    let output = isometry_formula_on(exp, &moved, exec)?;
    output.distance_to_product(junk, &ideal_target(exp.n(), exp.k(), party, label)?)
}

/// Certification distance for `Z` on `party` computed from the branches of
/// `Phi(|psi>)` via `P^a Z = (-1)^a P^a`, without applying Z to the state.
pub fn certify_z_via_sign(exp: &ExperimentSpec, party: usize, junk: &PureState) -> Result<f64> {
    if party == 0 || party > exp.n() {
        return Err(Error::PartyOutOfRange {
            party,
            n_qubits: exp.n(),
        });
    }
    let mut output = apply_isometry_formula(exp)?;
    let mask = 1usize << (party - 1);
    for (a, b) in output.branches.iter_mut() {
        if a & mask != 0 {
            *b = b.scale(C64::new(-1.0, 0.0));
        }
    }
    output.distance_to_product(junk, &ideal_target(exp.n(), exp.k(), party, Label::Z)?)
}
