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

//! Reference and physical experiments, plus the coherent noise models used
//! to produce non-ideal statistics.
//!
//! Noise stays in the pure-state picture: the state can be tilted towards a
//! seeded random direction orthogonal to the Dicke state, and individual
//! measurement observables can be rotated about the y axis of their Bloch
//! sphere. Neither model is prescribed by the protocol itself; they are the
//! simplest ways to generate a nonzero deviation `epsilon` reproducibly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observable::{LocalObservable, Matrix2, ObservableKind};
use crate::state::{check_dicke_params, dicke_state, inner, PureState, C64, SYSTEM_QUBIT_CAP};

/// Measurement labels a party can be asked to perform. `D` exists only on
/// the last party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    X,
    Z,
    D,
}

impl Label {
    pub fn kind(self) -> ObservableKind {
        match self {
            Label::X => ObservableKind::X,
            Label::Z => ObservableKind::Z,
            Label::D => ObservableKind::D,
        }
    }

    /// The ideal spin observable this label is certified against.
    pub fn ideal_matrix(self) -> Matrix2 {
        match self {
            Label::X => Matrix2::pauli_x(),
            Label::Z => Matrix2::pauli_z(),
            Label::D => Matrix2::diagonal_d(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.kind(), f)
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "X" => Ok(Label::X),
            "Z" => Ok(Label::Z),
            "D" => Ok(Label::D),
            other => Err(Error::Domain(format!(
                "unknown measurement label {other:?}"
            ))),
        }
    }
}

/// The observables one party holds.
#[derive(Debug, Clone, PartialEq)]
pub struct PartyOps {
    pub x: LocalObservable,
    pub z: LocalObservable,
    pub d: Option<LocalObservable>,
}

/// A (possibly non-ideal) realization of the protocol: a shared state and
/// each party's physical observables.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    n: usize,
    k: usize,
    state: PureState,
    parties: Vec<PartyOps>,
}

impl ExperimentSpec {
    /// Builds and validates an experiment.
    pub fn new(n: usize, k: usize, state: PureState, parties: Vec<PartyOps>) -> Result<Self> {
        let exp = ExperimentSpec {
            n,
            k,
            state,
            parties,
        };
        exp.validate()?;
        Ok(exp)
    }

    pub fn validate(&self) -> Result<()> {
        check_dicke_params(self.n, self.k)?;
        if self.n > SYSTEM_QUBIT_CAP {
            return Err(Error::CapExceeded {
                requested: self.n,
                cap: SYSTEM_QUBIT_CAP,
            });
        }
        if self.state.n_qubits() != self.n {
            return Err(Error::InvalidExperiment(format!(
                "state has {} qubits, experiment has {} parties",
                self.state.n_qubits(),
                self.n
            )));
        }
        if !self.state.is_normalized() {
            return Err(Error::InvalidExperiment("state is not normalized".into()));
        }
        if self.parties.len() != self.n {
            return Err(Error::InvalidExperiment(format!(
                "{} parties carry measurements, expected {}",
                self.parties.len(),
                self.n
            )));
        }
        for (idx, ops) in self.parties.iter().enumerate() {
            let party = idx + 1;
            let expect_d = party == self.n;
            if ops.d.is_some() != expect_d {
                return Err(Error::InvalidExperiment(format!(
                    "party {party} must carry {} labels",
                    if expect_d { 3 } else { 2 }
                )));
            }
            let mut labelled = vec![(Label::X, &ops.x), (Label::Z, &ops.z)];
            if let Some(d) = &ops.d {
                labelled.push((Label::D, d));
            }
            for (label, obs) in labelled {
                if obs.party() != party || obs.kind() != label.kind() {
                    return Err(Error::InvalidExperiment(format!(
                        "observable stored as {label} on party {party} is {} on party {}",
                        obs.kind(),
                        obs.party()
                    )));
                }
                // Revalidate the matrix against the observable invariants.
                LocalObservable::new(party, label.kind(), *obs.matrix())?;
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn parties(&self) -> &[PartyOps] {
        &self.parties
    }

    pub fn observable(&self, party: usize, label: Label) -> Result<&LocalObservable> {
        let ops = self
            .parties
            .get(party.wrapping_sub(1))
            .ok_or(Error::PartyOutOfRange {
                party,
                n_qubits: self.n,
            })?;
        match label {
            Label::X => Ok(&ops.x),
            Label::Z => Ok(&ops.z),
            Label::D => ops.d.as_ref().ok_or_else(|| {
                Error::UnassignedOperator(format!("party {party} has no D measurement"))
            }),
        }
    }

    /// `P^outcome` built from the party's physical Z.
    pub fn projector(&self, party: usize, outcome: u8) -> Result<LocalObservable> {
        LocalObservable::projector_from_z(self.observable(party, Label::Z)?, outcome)
    }

    /// All `(party, label)` pairs the experiment assigns, in party order.
    pub fn labels(&self) -> Vec<(usize, Label)> {
        let mut out = Vec::with_capacity(2 * self.n + 1);
        for party in 1..=self.n {
            out.push((party, Label::X));
            out.push((party, Label::Z));
            if party == self.n {
                out.push((party, Label::D));
            }
        }
        out
    }

    pub fn with_state(&self, state: PureState) -> Result<Self> {
        Self::new(self.n, self.k, state, self.parties.clone())
    }

    fn with_observable(&self, party: usize, label: Label, matrix: Matrix2) -> Result<Self> {
        let obs = LocalObservable::new(party, label.kind(), matrix)?;
        let mut parties = self.parties.clone();
        let ops = &mut parties[party - 1];
        match label {
            Label::X => ops.x = obs,
            Label::Z => ops.z = obs,
            Label::D => ops.d = Some(obs),
        }
        Self::new(self.n, self.k, self.state.clone(), parties)
    }

    pub fn to_document(&self) -> ExperimentDocument {
        let mut measurements = BTreeMap::new();
        for (party, label) in self.labels() {
            let m = *self
                .observable(party, label)
                .expect("label listed by labels()")
                .matrix();
            measurements
                .entry(party)
                .or_insert_with(BTreeMap::new)
                .insert(label, m);
        }
        ExperimentDocument {
            n: self.n,
            k: self.k,
            state: self.state.amplitudes().to_vec(),
            measurements,
        }
    }

    pub fn from_document(doc: ExperimentDocument) -> Result<Self> {
        check_dicke_params(doc.n, doc.k)?;
        let state = PureState::normalized_from(doc.state)?;
        let mut parties = Vec::with_capacity(doc.n);
        for party in 1..=doc.n {
            let labels = doc.measurements.get(&party).ok_or_else(|| {
                Error::InvalidExperiment(format!("no measurements for party {party}"))
            })?;
            let expected = if party == doc.n { 3 } else { 2 };
            if labels.len() != expected {
                return Err(Error::InvalidExperiment(format!(
                    "party {party} carries {} labels, expected {expected}",
                    labels.len()
                )));
            }
            let get = |label: Label| -> Result<LocalObservable> {
                let m = labels.get(&label).ok_or_else(|| {
                    Error::InvalidExperiment(format!("party {party} is missing label {label}"))
                })?;
                LocalObservable::new(party, label.kind(), *m)
            };
            parties.push(PartyOps {
                x: get(Label::X)?,
                z: get(Label::Z)?,
                d: if party == doc.n {
                    Some(get(Label::D)?)
                } else {
                    None
                },
            });
        }
        if doc.measurements.keys().any(|&p| p == 0 || p > doc.n) {
            return Err(Error::InvalidExperiment(
                "measurement for unknown party".into(),
            ));
        }
        Self::new(doc.n, doc.k, state, parties)
    }

    pub fn to_json(&self) -> Result<String> {
        crate::io::to_json_string(&self.to_document())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(text)?)
    }
}

/// On-disk form of an experiment. Amplitudes use the little-endian basis
/// order of [`PureState`]; matrices are row-major `[[re, im], ...]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDocument {
    pub n: usize,
    pub k: usize,
    pub state: Vec<C64>,
    pub measurements: BTreeMap<usize, BTreeMap<Label, Matrix2>>,
}

/// The ideal experiment: `|D_n^k>` with Pauli X, Z on every party and
/// `(X + Z)/sqrt(2)` on party `n`.
pub fn reference_experiment(n: usize, k: usize) -> Result<ExperimentSpec> {
    let state = dicke_state(n, k)?;
    let parties = (1..=n)
        .map(|p| {
            Ok(PartyOps {
                x: LocalObservable::pauli_x(p)?,
                z: LocalObservable::pauli_z(p)?,
                d: if p == n {
                    Some(LocalObservable::diagonal_d(p)?)
                } else {
                    None
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ExperimentSpec::new(n, k, state, parties)
}

/// Seeded unit vector orthogonal to `reference`.
pub fn orthogonal_direction(reference: &PureState, seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = reference.amplitudes().len();
    let raw: Vec<C64> = (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        })
        .collect();
    let raw = PureState::from_amplitudes(raw)?;
    let unit_ref = reference.normalize()?;
    let overlap = inner(&unit_ref, &raw)?;
    let chi = raw.sub(&unit_ref.scale(overlap))?;
    // second pass removes rounding leftovers
    let overlap = inner(&unit_ref, &chi)?;
    chi.sub(&unit_ref.scale(overlap))?.normalize()
}

/// Replaces the state by `cos(theta)|D_n^k> + sin(theta)|chi>` with `chi` a
/// seeded random unit vector orthogonal to the Dicke state.
pub fn perturb_state(exp: &ExperimentSpec, theta: f64, seed: u64) -> Result<ExperimentSpec> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::Domain(format!(
            "perturbation angle {theta} outside [0, pi/2]"
        )));
    }
    if theta == 0.0 {
        return Ok(exp.clone());
    }
    let dicke = dicke_state(exp.n, exp.k)?;
    let chi = orthogonal_direction(&dicke, seed)?;
    let (s, c) = theta.sin_cos();
    let mixed = dicke
        .scale(C64::new(c, 0.0))
        .add(&chi.scale(C64::new(s, 0.0)))?;
    exp.with_state(mixed.normalize()?)
}

/// Replaces one observable `M` by `R M R^dagger`, `R` a y-axis Bloch
/// rotation by `theta`.
pub fn rotate_measurement(
    exp: &ExperimentSpec,
    party: usize,
    label: Label,
    theta: f64,
) -> Result<ExperimentSpec> {
    if !theta.is_finite() {
        return Err(Error::Domain("rotation angle must be finite".into()));
    }
    let current = *exp.observable(party, label)?.matrix();
    let r = Matrix2::rotation_y(theta);
    exp.with_observable(party, label, r.mul(&current).mul(&r.adjoint()))
}

/// Noise applied to a reference experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    None,
    /// Tilt of the shared state, see [`perturb_state`].
    StatePerturbation {
        theta: f64,
        seed: u64,
    },
    /// Per-party rotation angle of one label; entry `i` is party `i + 1`.
    /// Missing entries mean no rotation.
    MeasurementRotation {
        label: Label,
        angles: Vec<f64>,
    },
    /// Finite-shot estimation of every correlator.
    ShotNoise {
        shots: u64,
        seed: u64,
    },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        let check_angle = |t: f64| {
            if (0.0..=std::f64::consts::PI).contains(&t) {
                Ok(())
            } else {
                Err(Error::Domain(format!("noise angle {t} outside [0, pi]")))
            }
        };
        match self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::StatePerturbation { theta, .. } => check_angle(*theta),
            NoiseSpec::MeasurementRotation { angles, .. } => {
                angles.iter().try_for_each(|&t| check_angle(t))
            }
            NoiseSpec::ShotNoise { shots, .. } => {
                if *shots >= 1 {
                    Ok(())
                } else {
                    Err(Error::Domain("shot noise needs at least one shot".into()))
                }
            }
        }
    }

    /// Applies the coherent part of the noise. Shot noise leaves the
    /// experiment unchanged; it only affects how statistics are estimated.
    pub fn apply(&self, exp: &ExperimentSpec) -> Result<ExperimentSpec> {
        self.validate()?;
        match self {
            NoiseSpec::None | NoiseSpec::ShotNoise { .. } => Ok(exp.clone()),
            NoiseSpec::StatePerturbation { theta, seed } => perturb_state(exp, *theta, *seed),
            NoiseSpec::MeasurementRotation { label, angles } => {
                if angles.len() > exp.n {
                    return Err(Error::Domain(format!(
                        "{} rotation angles given for {} parties",
                        angles.len(),
                        exp.n
                    )));
                }
                let mut out = exp.clone();
                for (idx, &theta) in angles.iter().enumerate() {
                    if theta != 0.0 {
                        out = rotate_measurement(&out, idx + 1, *label, theta)?;
                    }
                }
                Ok(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_assignments() {
        let exp = reference_experiment(4, 2).unwrap();
        assert_eq!(exp.labels().len(), 9);
        assert_eq!(
            *exp.observable(4, Label::D).unwrap().matrix(),
            Matrix2::diagonal_d()
        );
        assert!(exp.observable(3, Label::D).is_err());
        assert!(exp.observable(5, Label::X).is_err());
        assert!(exp.observable(0, Label::X).is_err());
        assert!(reference_experiment(4, 4).is_err());
        let w = reference_experiment(3, 1).unwrap();
        assert_eq!(w.state(), &dicke_state(3, 1).unwrap());
    }

    #[test]
    fn perturbation_edges() {
        let exp = reference_experiment(4, 2).unwrap();
        assert_eq!(perturb_state(&exp, 0.0, 9).unwrap(), exp);
        let orth = perturb_state(&exp, std::f64::consts::FRAC_PI_2, 9).unwrap();
        let f = inner(exp.state(), orth.state()).unwrap().norm_sqr();
        assert!(f < 1e-24, "fidelity {f}");
        let a = perturb_state(&exp, 0.3, 42).unwrap();
        let b = perturb_state(&exp, 0.3, 42).unwrap();
        assert_eq!(a.state().amplitudes(), b.state().amplitudes());
        assert!(perturb_state(&exp, 2.0, 1).is_err());
        assert!(perturb_state(&exp, -0.1, 1).is_err());
    }

    #[test]
    fn rotating_x_by_quarter_turn_gives_minus_z() {
        let exp = reference_experiment(3, 1).unwrap();
        let rotated = rotate_measurement(&exp, 2, Label::X, std::f64::consts::FRAC_PI_2).unwrap();
        let m = rotated.observable(2, Label::X).unwrap().matrix();
        let minus_z = Matrix2::pauli_z().scale(C64::new(-1.0, 0.0));
        assert!(m.max_abs_diff(&minus_z) <= 1e-14);
        assert_eq!(rotate_measurement(&exp, 2, Label::X, 0.0).unwrap(), exp);
        assert!(rotate_measurement(&exp, 2, Label::D, 0.1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let exp = perturb_state(&reference_experiment(3, 1).unwrap(), 0.2, 5).unwrap();
        let exp = rotate_measurement(&exp, 3, Label::D, 0.1).unwrap();
        let text = exp.to_json().unwrap();
        let back = ExperimentSpec::from_json(&text).unwrap();
        assert_eq!(back.n(), 3);
        assert!(back.state().distance(exp.state()).unwrap() < 1e-15);
        let m0 = exp.observable(3, Label::D).unwrap().matrix();
        let m1 = back.observable(3, Label::D).unwrap().matrix();
        assert!(m0.max_abs_diff(m1) < 1e-15);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["state"].as_array().unwrap().len(), 8);
        assert!(value["measurements"]["3"]["D"].is_array());
        assert!(value["measurements"]["1"].get("D").is_none());
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let mut doc = reference_experiment(3, 1).unwrap().to_document();
        doc.measurements
            .get_mut(&1)
            .unwrap()
            .insert(Label::D, Matrix2::diagonal_d());
        assert!(ExperimentSpec::from_document(doc).is_err());

        let mut doc = reference_experiment(3, 1).unwrap().to_document();
        doc.state[0] = C64::new(1.0, 0.0);
        assert!(ExperimentSpec::from_document(doc).is_err());

        let mut doc = reference_experiment(3, 1).unwrap().to_document();
        doc.measurements
            .get_mut(&2)
            .unwrap()
            .insert(Label::X, Matrix2::real([[1.0, 0.5], [0.5, 1.0]]));
        assert!(ExperimentSpec::from_document(doc).is_err());
    }

    #[test]
    fn noise_specs() {
        let exp = reference_experiment(4, 2).unwrap();
        assert_eq!(NoiseSpec::None.apply(&exp).unwrap(), exp);
        assert!(NoiseSpec::ShotNoise { shots: 0, seed: 1 }
            .apply(&exp)
            .is_err());
        assert!(NoiseSpec::StatePerturbation {
            theta: 4.0,
            seed: 1
        }
        .apply(&exp)
        .is_err());
        let rot = NoiseSpec::MeasurementRotation {
            label: Label::X,
            angles: vec![0.1, 0.0, 0.2],
        }
        .apply(&exp)
        .unwrap();
        assert_ne!(rot.observable(1, Label::X), exp.observable(1, Label::X));
        assert_eq!(rot.observable(2, Label::X), exp.observable(2, Label::X));
        let bad_d = NoiseSpec::MeasurementRotation {
            label: Label::D,
            angles: vec![0.1],
        };
        assert!(bad_d.apply(&exp).is_err());
    }
}
