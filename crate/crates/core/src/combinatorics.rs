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

//! Exact integer combinatorics over bitstrings.

use crate::error::{Error, Result};

/// Binomial coefficient `C(n, k)` in exact integer arithmetic.
///
/// Returns 0 when `k > n`. Overflows only far beyond the sizes this crate
/// simulates.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is always divisible by (i + 1) at this point.
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// `C(n, k)` as a float, for use in bound arithmetic.
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    binomial(n as u64, k as u64) as f64
}

/// All bitstrings of length `len` with exactly `weight` ones, in
/// lexicographic order of `(a_1, ..., a_len)`.
pub fn weight_strings(len: usize, weight: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(binomial(len as u64, weight as u64) as usize);
    if weight > len {
        return out;
    }
    let mut current = Vec::with_capacity(len);
    fill(len, weight, &mut current, &mut out);
    out
}

fn fill(len: usize, ones_left: usize, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    let remaining = len - current.len();
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    // '0' sorts before '1'
    if remaining > ones_left {
        current.push(0);
        fill(len, ones_left, current, out);
        current.pop();
    }
    if ones_left > 0 {
        current.push(1);
        fill(len, ones_left - 1, current, out);
        current.pop();
    }
}

/// Packs `bits` (bit `i` is party `i + 1`) into a little-endian basis index.
pub fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0usize, |acc, (i, &b)| acc | (usize::from(b & 1) << i))
}

/// Inverse of [`bits_to_index`].
pub fn index_to_bits(index: usize, len: usize) -> Vec<u8> {
    (0..len).map(|i| ((index >> i) & 1) as u8).collect()
}

/// Renders a bitstring with party 1 as the first character.
pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter()
        .map(|&b| if b == 0 { '0' } else { '1' })
        .collect()
}

pub fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::Serialization(format!(
                "invalid bit character {other:?}"
            ))),
        })
        .collect()
}

pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}
