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

//! Single-party operators and products of them across distinct parties.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{inner, PureState, C64};

/// Tolerance for Hermiticity, involution and idempotence checks.
pub const OPERATOR_TOL: f64 = 1e-12;

/// Imaginary residue above which an expectation value is rejected.
pub const IMAG_TOL: f64 = 1e-12;

/// A 2x2 complex matrix, row-major. Serializes as
/// `[[[re, im], [re, im]], [[re, im], [re, im]]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matrix2([[C64; 2]; 2]);

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

impl Matrix2 {
    pub const fn new(entries: [[C64; 2]; 2]) -> Self {
        Matrix2(entries)
    }

    pub fn real(m: [[f64; 2]; 2]) -> Self {
        Matrix2([
            [C64::new(m[0][0], 0.0), C64::new(m[0][1], 0.0)],
            [C64::new(m[1][0], 0.0), C64::new(m[1][1], 0.0)],
        ])
    }

    pub fn entries(&self) -> [[C64; 2]; 2] {
        self.0
    }

    pub fn identity() -> Self {
        Matrix2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn pauli_x() -> Self {
        Matrix2::real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_y() -> Self {
        Matrix2([[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]])
    }

    pub fn pauli_z() -> Self {
        Matrix2::real([[1.0, 0.0], [0.0, -1.0]])
    }

    /// `(X + Z) / sqrt(2)`.
    pub fn diagonal_d() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Matrix2::real([[h, h], [h, -h]])
    }

    pub fn hadamard() -> Self {
        Self::diagonal_d()
    }

    /// `exp(-i theta Y / 2)`, a Bloch rotation about the y axis.
    pub fn rotation_y(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Matrix2::real([[c, -s], [s, c]])
    }

    /// `(I + (-1)^outcome Z) / 2` for an arbitrary involution `z`.
    pub fn projector_from(z: &Matrix2, outcome: u8) -> Self {
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        Matrix2::identity()
            .add(&z.scale(C64::new(sign, 0.0)))
            .scale(C64::new(0.5, 0.0))
    }

    pub fn mul(&self, rhs: &Matrix2) -> Matrix2 {
        let (a, b) = (self.0, rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Matrix2(out)
    }

    pub fn add(&self, rhs: &Matrix2) -> Matrix2 {
        let mut out = self.0;
        for (row, rrow) in out.iter_mut().zip(&rhs.0) {
            for (cell, r) in row.iter_mut().zip(rrow) {
                *cell += r;
            }
        }
        Matrix2(out)
    }

    pub fn scale(&self, f: C64) -> Matrix2 {
        let mut out = self.0;
        out.iter_mut().flatten().for_each(|x| *x *= f);
        Matrix2(out)
    }

    pub fn adjoint(&self) -> Matrix2 {
        let a = self.0;
        Matrix2([
            [a[0][0].conj(), a[1][0].conj()],
            [a[0][1].conj(), a[1][1].conj()],
        ])
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Matrix2) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(rhs.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// Eigenvalues (ascending) and matching orthonormal eigenvectors of a
    /// Hermitian matrix. Column `i` of the returned unitary is eigenvector `i`.
    pub fn hermitian_eigen(&self) -> ([f64; 2], Matrix2) {
        let [[a, b], [_, d]] = self.0;
        let (a, d) = (a.re, d.re);
        let mean = 0.5 * (a + d);
        let half = 0.5 * (a - d);
        let radius = (half * half + b.norm_sqr()).sqrt();
        let (lo, hi) = (mean - radius, mean + radius);
        if b.norm() <= 1e-15 * (1.0 + radius) {
            return if a <= d {
                ([a, d], Matrix2::identity())
            } else {
                ([d, a], Matrix2([[ZERO, ONE], [ONE, ZERO]]))
            };
        }
        // (A - lambda) v = 0  =>  v = (b, lambda - a)
        let vec_for = |lambda: f64| {
            let v0 = b;
            let v1 = C64::new(lambda - a, 0.0);
            let n = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
            (v0 / n, v1 / n)
        };
        let (l0, l1) = (vec_for(lo), vec_for(hi));
        ([lo, hi], Matrix2([[l0.0, l1.0], [l0.1, l1.1]]))
    }
}

/// Which protocol role a local operator plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ObservableKind {
    X,
    Z,
    D,
    P0,
    P1,
    I,
}

impl ObservableKind {
    pub fn is_involution(self) -> bool {
        matches!(
            self,
            ObservableKind::X | ObservableKind::Z | ObservableKind::D | ObservableKind::I
        )
    }
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ObservableKind::X => "X",
            ObservableKind::Z => "Z",
            ObservableKind::D => "D",
            ObservableKind::P0 => "P0",
            ObservableKind::P1 => "P1",
            ObservableKind::I => "I",
        };
        f.write_str(s)
    }
}

/// A 2x2 Hermitian operator acting on one party (1-indexed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalObservable {
    party: usize,
    kind: ObservableKind,
    matrix: Matrix2,
}

impl LocalObservable {
    /// Validates Hermiticity and, by kind, `M^2 = I` or `M^2 = M`.
    pub fn new(party: usize, kind: ObservableKind, matrix: Matrix2) -> Result<Self> {
        if party == 0 {
            return Err(Error::InvalidObservable("party indices start at 1".into()));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidObservable(format!(
                "{kind} on party {party} has non-finite entries"
            )));
        }
        let herm = matrix.max_abs_diff(&matrix.adjoint());
        if herm > OPERATOR_TOL {
            return Err(Error::InvalidObservable(format!(
                "{kind} on party {party} is not Hermitian (residue {herm:e})"
            )));
        }
        let sq = matrix.mul(&matrix);
        let target = if kind.is_involution() {
            Matrix2::identity()
        } else {
            matrix
        };
        let res = sq.max_abs_diff(&target);
        if res > OPERATOR_TOL {
            let what = if kind.is_involution() {
                "an involution"
            } else {
                "idempotent"
            };
            return Err(Error::InvalidObservable(format!(
                "{kind} on party {party} is not {what} (residue {res:e})"
            )));
        }
        Ok(LocalObservable {
            party,
            kind,
            matrix,
        })
    }

    pub fn pauli_x(party: usize) -> Result<Self> {
        Self::new(party, ObservableKind::X, Matrix2::pauli_x())
    }

    pub fn pauli_z(party: usize) -> Result<Self> {
        Self::new(party, ObservableKind::Z, Matrix2::pauli_z())
    }

    pub fn diagonal_d(party: usize) -> Result<Self> {
        Self::new(party, ObservableKind::D, Matrix2::diagonal_d())
    }

    pub fn identity(party: usize) -> Result<Self> {
        Self::new(party, ObservableKind::I, Matrix2::identity())
    }

    /// Projector `P^outcome = (I + (-1)^outcome Z) / 2` derived from this
    /// party's (physical) Z observable.
    pub fn projector_from_z(z: &LocalObservable, outcome: u8) -> Result<Self> {
        let kind = if outcome == 0 {
            ObservableKind::P0
        } else {
            ObservableKind::P1
        };
        Self::new(z.party, kind, Matrix2::projector_from(&z.matrix, outcome))
    }

    pub fn party(&self) -> usize {
        self.party
    }

    pub fn kind(&self) -> ObservableKind {
        self.kind
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.matrix
    }
}

/// A product of local observables on distinct parties; unlisted parties act
/// as identity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SettingProduct {
    factors: Vec<LocalObservable>,
}

impl SettingProduct {
    pub fn new(factors: Vec<LocalObservable>) -> Result<Self> {
        let mut parties: Vec<usize> = factors.iter().map(|f| f.party).collect();
        parties.sort_unstable();
        if parties.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidObservable(
                "setting product has two factors on the same party".into(),
            ));
        }
        Ok(SettingProduct { factors })
    }

    pub fn factors(&self) -> &[LocalObservable] {
        &self.factors
    }

    /// Applies every factor; the result is unnormalized.
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        let mut out = state.clone();
        for f in &self.factors {
            out = apply_local(f, &out)?;
        }
        Ok(out)
    }
}

/// Applies `op` on its party's bit. The normalized flag is cleared.
pub fn apply_local(op: &LocalObservable, state: &PureState) -> Result<PureState> {
    state.apply_on_party(op.party, &op.matrix)
}

/// `<psi| prod factors |psi>` for a normalized state.
pub fn expectation(state: &PureState, setting: &SettingProduct) -> Result<f64> {
    if !state.is_normalized() {
        return Err(Error::Domain(
            "expectation requires a normalized state".into(),
        ));
    }
    let value = inner(state, &setting.apply(state)?)?;
    if value.im.abs() > IMAG_TOL {
        return Err(Error::NonHermitianSetting {
            residue: value.im.abs(),
        });
    }
    Ok(value.re)
}
