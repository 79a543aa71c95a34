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

//! Closed-form robustness bound: how far the isometry output can be from
//! `junk (x) |D_n^k>` when every scheduled correlator deviates from its ideal
//! value by at most `epsilon`.
//!
//! With `C = C(n,k)`:
//!
//! ```text
//! branch_norm  = sqrt|2/C - 4 eps|
//! relabel      = sqrt(6 eps)
//! xz_overlap   = eps + branch_norm * relabel
//! delta1       = (2 + 2 sqrt2) sqrt2 * sqrt(|2 (sqrt2 - 4) eps| + xz_overlap)
//! swap_count   = (n-1)! / ((k-1)! (n-k-1)!)
//! first_term   = (2^n - C) eps + swap_count (2 delta1 + relabel)
//! second_term  = | sqrt|1 + C eps| - 1 |
//! total        = first_term + second_term
//! ```

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, hamming, weight_strings};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, to_csv_string, to_json_string};
use crate::state::check_dicke_params;

/// Largest `n` for which [`swap_count_oracle`] enumerates.
pub const ORACLE_MAX_N: usize = 20;

/// Number of swapping-identity applications needed to bring every weight-`k`
/// branch onto the reference string: `Gamma(n) / (Gamma(k) Gamma(n - k))`,
/// evaluated exactly as `C(n-1, k-1) (n - k)`.
pub fn swap_count(n: usize, k: usize) -> Result<u128> {
    check_dicke_params(n, k)?;
    Ok(binomial(n as u64 - 1, k as u64 - 1) * (n - k) as u128)
}

/// Brute-force `sum_{|a| = k} d_H(a, a*) / 2` with `a* = 1^k 0^{n-k}`.
pub fn swap_count_oracle(n: usize, k: usize) -> Result<u128> {
    check_dicke_params(n, k)?;
    let mut reference = vec![0u8; n];
    reference[..k].iter_mut().for_each(|b| *b = 1);
    swap_count_oracle_from(n, k, &reference)
}

/// Same enumeration with an arbitrary weight-`k` reference string.
pub fn swap_count_oracle_from(n: usize, k: usize, reference: &[u8]) -> Result<u128> {
    check_dicke_params(n, k)?;
    if n > ORACLE_MAX_N {
        return Err(Error::Domain(format!(
            "enumeration limited to n <= {ORACLE_MAX_N}"
        )));
    }
    if reference.len() != n || reference.iter().map(|&b| b as usize).sum::<usize>() != k {
        return Err(Error::Domain(
            "reference string must have length n and weight k".into(),
        ));
    }
    let total: usize = weight_strings(n, k)
        .iter()
        .map(|a| hamming(a, reference))
        .sum();
    debug_assert!(total.is_multiple_of(2));
    Ok((total / 2) as u128)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::Domain(format!(
            "epsilon must be finite and >= 0, got {eps}"
        )));
    }
    Ok(())
}

fn branch_norm(c: f64, eps: f64) -> f64 {
    (2.0 / c - 4.0 * eps).abs().sqrt()
}

fn relabel_error(eps: f64) -> f64 {
    (6.0 * eps.abs()).sqrt()
}

fn xz_overlap(c: f64, eps: f64) -> f64 {
    eps.abs() + branch_norm(c, eps) * relabel_error(eps)
}

fn delta1_from(c: f64, eps: f64) -> f64 {
    let sqrt2 = std::f64::consts::SQRT_2;
    let scale = (2.0 + 2.0 * sqrt2) * sqrt2;
    scale * ((2.0 * (sqrt2 - 4.0) * eps).abs() + xz_overlap(c, eps)).sqrt()
}

/// Error scale of the anticommutation identity.
pub fn delta1(n: usize, k: usize, eps: f64) -> Result<f64> {
    check_dicke_params(n, k)?;
    check_eps(eps)?;
    Ok(delta1_from(binomial(n as u64, k as u64) as f64, eps))
}

/// Every intermediate of the bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub branch_norm: f64,
    pub relabel_error: f64,
    pub xz_overlap_bound: f64,
    pub delta1: f64,
    pub swap_count: u64,
    /// `(2^n - C(n,k)) eps`, the wrong-weight branches.
    pub wrong_weight_term: f64,
    /// `swap_count (2 delta1 + sqrt(6 eps))`.
    pub swap_term: f64,
    pub first_term: f64,
    pub second_term: f64,
    pub total: f64,
    /// Non-normative: first term with `sqrt(eps)` per wrong-weight branch,
    /// which is what the branch-norm argument gives.
    pub first_term_sqrt_variant: f64,
    /// Non-normative: `first_term_sqrt_variant + second_term`.
    pub total_sqrt_variant: f64,
}

pub const BOUND_CSV_HEADER: [&str; 16] = [
    "n",
    "k",
    "epsilon",
    "branch_norm",
    "relabel_error",
    "xz_overlap_bound",
    "delta1",
    "swap_count",
    "wrong_weight_term",
    "swap_term",
    "first_term",
    "second_term",
    "total",
    "first_term_sqrt_variant",
    "total_sqrt_variant",
    "wrong_weight_count",
];

impl BoundBreakdown {
    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }

    pub fn to_csv(&self) -> Result<String> {
        let wrong = (1u128 << self.n) - binomial(self.n as u64, self.k as u64);
        let row = vec![
            self.n.to_string(),
            self.k.to_string(),
            fmt_f64(self.epsilon),
            fmt_f64(self.branch_norm),
            fmt_f64(self.relabel_error),
            fmt_f64(self.xz_overlap_bound),
            fmt_f64(self.delta1),
            self.swap_count.to_string(),
            fmt_f64(self.wrong_weight_term),
            fmt_f64(self.swap_term),
            fmt_f64(self.first_term),
            fmt_f64(self.second_term),
            fmt_f64(self.total),
            fmt_f64(self.first_term_sqrt_variant),
            fmt_f64(self.total_sqrt_variant),
            wrong.to_string(),
        ];
        to_csv_string(&BOUND_CSV_HEADER, &[row])
    }
}

/// Evaluates the full bound for deviation `eps`.
pub fn total_bound(n: usize, k: usize, eps: f64) -> Result<BoundBreakdown> {
    check_dicke_params(n, k)?;
    check_eps(eps)?;
    if n >= 64 {
        return Err(Error::Domain("n too large for the bound arithmetic".into()));
    }
    let c_int = binomial(n as u64, k as u64);
    let c = c_int as f64;
    let wrong_weight = ((1u128 << n) - c_int) as f64;
    let swaps = swap_count(n, k)?;
    let d1 = delta1_from(c, eps);
    let relabel = relabel_error(eps);

    let wrong_weight_term = wrong_weight * eps.abs();
    let swap_term = swaps as f64 * (2.0 * d1 + relabel);
    let first_term = wrong_weight_term + swap_term;
    // |sqrt(1 + x) - 1| with x = c eps >= 0, written to avoid cancellation
    let x = c * eps;
    let second_term = x / ((1.0 + x).sqrt() + 1.0);
    let first_term_sqrt_variant = wrong_weight * eps.abs().sqrt() + swap_term;

    Ok(BoundBreakdown {
        n,
        k,
        epsilon: eps,
        branch_norm: branch_norm(c, eps),
        relabel_error: relabel,
        xz_overlap_bound: xz_overlap(c, eps),
        delta1: d1,
        swap_count: u64::try_from(swaps)
            .map_err(|_| Error::Domain("swap count overflows u64".into()))?,
        wrong_weight_term,
        swap_term,
        first_term,
        second_term,
        total: first_term + second_term,
        first_term_sqrt_variant,
        total_sqrt_variant: first_term_sqrt_variant + second_term,
    })
}
