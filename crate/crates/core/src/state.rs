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

//! Dense pure states over `n` qubits.
//!
//! Basis convention, fixed for the whole crate: party `i` (1-indexed) owns
//! bit `i - 1` of the basis index, so the bitstring `(a_1, ..., a_n)` sits at
//! index `sum_i a_i * 2^(i-1)` (little-endian).

use num_complex::Complex64;

use crate::combinatorics::{binomial, bits_to_index, weight_strings};
use crate::error::{Error, Result};
use crate::observable::Matrix2;

pub type C64 = Complex64;

/// Default cap on system-only qubit counts.
pub const SYSTEM_QUBIT_CAP: usize = 14;
/// Cap on system + ancilla qubit counts.
pub const COMBINED_QUBIT_CAP: usize = 24;

/// Tolerance on `|<psi|psi> - 1|` for states flagged normalized.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
    normalized: bool,
}

impl PureState {
    /// Builds an unnormalized state from raw amplitudes; the length must be a
    /// power of two.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Domain(format!(
                "amplitude vector length {len} is not a power of two"
            )));
        }
        Ok(PureState {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
            normalized: false,
        })
    }

    /// Builds a state that is checked to be normalized.
    pub fn normalized_from(amplitudes: Vec<C64>) -> Result<Self> {
        let mut s = Self::from_amplitudes(amplitudes)?;
        let n2 = s.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!(
                "state has squared norm {n2}, expected 1"
            )));
        }
        s.normalized = true;
        Ok(s)
    }

    pub fn zero_vector(n_qubits: usize) -> Self {
        PureState {
            n_qubits,
            amplitudes: vec![C64::new(0.0, 0.0); 1 << n_qubits],
            normalized: false,
        }
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if index >= 1 << n_qubits {
            return Err(Error::Domain(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut s = Self::zero_vector(n_qubits);
        s.amplitudes[index] = C64::new(1.0, 0.0);
        s.normalized = true;
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Returns the state scaled to unit norm with the flag set.
    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm();
        if norm <= f64::EPSILON {
            return Err(Error::Degenerate("cannot normalize a zero vector".into()));
        }
        Ok(PureState {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a / norm).collect(),
            normalized: true,
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        PureState {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
            normalized: false,
        }
    }

    pub fn add(&self, other: &PureState) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PureState) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &PureState, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(PureState {
            n_qubits: self.n_qubits,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            normalized: false,
        })
    }

    /// `||self - other||_2`.
    pub fn distance(&self, other: &PureState) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    fn check_same_dim(&self, other: &PureState) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Applies a 2x2 matrix on the bit owned by `party` (1-indexed).
    pub fn apply_on_party(&self, party: usize, matrix: &Matrix2) -> Result<Self> {
        if party == 0 || party > self.n_qubits {
            return Err(Error::PartyOutOfRange {
                party,
                n_qubits: self.n_qubits,
            });
        }
        let mut out = self.amplitudes.clone();
        apply_2x2_in_place(&mut out, party - 1, matrix);
        Ok(PureState {
            n_qubits: self.n_qubits,
            amplitudes: out,
            normalized: false,
        })
    }

    /// Swaps the bits of parties `i` and `j` in every basis index.
    pub fn swap_parties(&self, i: usize, j: usize) -> Result<Self> {
        for p in [i, j] {
            if p == 0 || p > self.n_qubits {
                return Err(Error::PartyOutOfRange {
                    party: p,
                    n_qubits: self.n_qubits,
                });
            }
        }
        let (bi, bj) = (i - 1, j - 1);
        let mut out = vec![C64::new(0.0, 0.0); self.amplitudes.len()];
        for (idx, &amp) in self.amplitudes.iter().enumerate() {
            let x = ((idx >> bi) ^ (idx >> bj)) & 1;
            let target = idx ^ ((x << bi) | (x << bj));
            out[target] = amp;
        }
        Ok(PureState {
            n_qubits: self.n_qubits,
            amplitudes: out,
            normalized: self.normalized,
        })
    }

    /// Tensor with `|0>^{m}`; ancillas take the next `m` bit positions.
    pub fn append_ancillas(&self, m: usize) -> Result<Self> {
        append_ancillas_capped(self, m, COMBINED_QUBIT_CAP)
    }
}

/// In-place `matrix` on bit `bit` of a dense amplitude vector.
pub(crate) fn apply_2x2_in_place(amps: &mut [C64], bit: usize, m: &Matrix2) {
    let stride = 1usize << bit;
    let [[m00, m01], [m10, m11]] = m.entries();
    let mut base = 0;
    while base < amps.len() {
        for i in base..base + stride {
            let a0 = amps[i];
            let a1 = amps[i + stride];
            amps[i] = m00 * a0 + m01 * a1;
            amps[i + stride] = m10 * a0 + m11 * a1;
        }
        base += 2 * stride;
    }
}

/// Hermitian inner product `<a|b>`.
pub fn inner(a: &PureState, b: &PureState) -> Result<C64> {
    a.check_same_dim(b)?;
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

pub fn append_ancillas_capped(state: &PureState, m: usize, cap: usize) -> Result<PureState> {
    let total = state.n_qubits + m;
    if total > cap {
        return Err(Error::CapExceeded {
            requested: total,
            cap,
        });
    }
    let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << total];
    amplitudes[..state.amplitudes.len()].copy_from_slice(&state.amplitudes);
    Ok(PureState {
        n_qubits: total,
        amplitudes,
        normalized: state.normalized,
    })
}

/// The Dicke state `|D_n^k>`: amplitude `C(n,k)^{-1/2}` on every weight-`k`
/// basis string.
pub fn dicke_state(n: usize, k: usize) -> Result<PureState> {
    dicke_state_capped(n, k, SYSTEM_QUBIT_CAP)
}

pub fn dicke_state_capped(n: usize, k: usize, cap: usize) -> Result<PureState> {
    check_dicke_params(n, k)?;
    if n > cap {
        return Err(Error::CapExceeded { requested: n, cap });
    }
    Ok(weight_superposition(n, k))
}

/// Unchecked equal superposition over weight-`k` strings; also used for the
/// ancilla register.
pub(crate) fn weight_superposition(n: usize, k: usize) -> PureState {
    let amp = 1.0 / (binomial(n as u64, k as u64) as f64).sqrt();
    let mut s = PureState::zero_vector(n);
    for bits in weight_strings(n, k) {
        s.amplitudes[bits_to_index(&bits)] = C64::new(amp, 0.0);
    }
    s.normalized = true;
    s
}

pub(crate) fn check_dicke_params(n: usize, k: usize) -> Result<()> {
    if n < 2 || k < 1 || k >= n {
        return Err(Error::Domain(format!(
            "Dicke parameters require 1 <= k <= n - 1, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observable::Matrix2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn dicke_2_1() {
        let d = dicke_state(2, 1).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert_eq!(d.amplitudes(), &[c(0.0), c(h), c(h), c(0.0)]);
        assert!(d.is_normalized());
    }

    #[test]
    fn dicke_3_1_and_4_2() {
        let d = dicke_state(3, 1).unwrap();
        let a = 1.0 / 3f64.sqrt();
        for (idx, amp) in d.amplitudes().iter().enumerate() {
            let expect = if idx.count_ones() == 1 { a } else { 0.0 };
            assert!((amp - c(expect)).norm() < 1e-15);
        }
        let d = dicke_state(4, 2).unwrap();
        let a = 1.0 / 6f64.sqrt();
        let support: Vec<usize> = (0..16)
            .filter(|&i| d.amplitudes()[i].norm() > 0.0)
            .collect();
        assert_eq!(support, vec![3, 5, 6, 9, 10, 12]);
        for &i in &support {
            assert!((d.amplitudes()[i] - c(a)).norm() < 1e-15);
        }
    }

    #[test]
    fn dicke_domain_errors() {
        assert!(matches!(dicke_state(4, 0), Err(Error::Domain(_))));
        assert!(matches!(dicke_state(4, 4), Err(Error::Domain(_))));
        assert!(matches!(dicke_state(1, 1), Err(Error::Domain(_))));
        assert!(matches!(dicke_state(15, 3), Err(Error::CapExceeded { .. })));
        assert!(dicke_state_capped(15, 3, 16).is_ok());
    }

    #[test]
    fn inner_products() {
        let d31 = dicke_state(3, 1).unwrap();
        let b = PureState::basis(3, 0b001).unwrap();
        assert!((inner(&d31, &b).unwrap() - c(1.0 / 3f64.sqrt())).norm() < 1e-15);
        assert!((inner(&d31, &d31).unwrap() - c(1.0)).norm() < 1e-15);
        let z = inner(&dicke_state(4, 1).unwrap(), &dicke_state(4, 2).unwrap()).unwrap();
        assert_eq!(z, c(0.0));
        assert!(matches!(
            inner(&d31, &dicke_state(4, 1).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ancillas() {
        let s = PureState::normalized_from(vec![c(0.6), C64::new(0.0, 0.8)]).unwrap();
        assert_eq!(s.append_ancillas(0).unwrap(), s);
        let t = s.append_ancillas(1).unwrap();
        assert_eq!(
            t.amplitudes(),
            &[c(0.6), C64::new(0.0, 0.8), c(0.0), c(0.0)]
        );
        assert!((t.append_ancillas(3).unwrap().norm() - 1.0).abs() < 1e-15);
        assert!(matches!(
            s.append_ancillas(24),
            Err(Error::CapExceeded {
                requested: 25,
                cap: 24
            })
        ));
    }

    #[test]
    fn apply_on_party_uses_little_endian_bits() {
        // |q1 = 1, q2 = 0> sits at index 1
        let s = PureState::basis(2, 1).unwrap();
        let x = Matrix2::pauli_x();
        let t = s.apply_on_party(2, &x).unwrap();
        assert_eq!(t.amplitudes()[3], c(1.0));
        assert!(!t.is_normalized());
        assert!(matches!(
            s.apply_on_party(3, &x),
            Err(Error::PartyOutOfRange { .. })
        ));
    }

    #[test]
    fn normalized_flag_is_checked() {
        assert!(PureState::normalized_from(vec![c(1.0), c(1.0)]).is_err());
        assert!(PureState::from_amplitudes(vec![c(1.0); 3]).is_err());
        assert!(PureState::zero_vector(2).normalize().is_err());
    }
}
