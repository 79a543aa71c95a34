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

//! Exact simulation of the Dicke-state self-testing protocol.
//!
//! The crate evaluates the correlator schedule that certifies
//! `|D_n^k>` on an arbitrary pure-state experiment, applies the certifying
//! local isometry (both as a closed-form map and as a gate circuit), measures
//! the distance of its output to `junk (x) |D_n^k>`, and evaluates the
//! closed-form robustness bound that turns a statistics deviation `epsilon`
//! into a bound on that distance.
//!
//! Basis convention: party `i` (1-indexed) owns bit `i - 1` of every basis
//! index (little-endian). Ancilla `i` of the isometry belongs to party `i` and
//! uses the same convention on the ancilla register.
//!
//! Parallelism is controlled by the `parallel` feature (on by default) and
//! per call through [`Exec`].

pub mod bounds;
pub mod certify;
pub mod combinatorics;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod io;
pub mod isometry;
pub mod observable;
pub mod residuals;
pub mod sampling;
pub mod state;
pub mod verifier;

pub use bounds::{delta1, swap_count, swap_count_oracle, total_bound, BoundBreakdown};
pub use certify::{certify, certify_with, run_sweep, CertificationReport, SweepNoise, SweepRow};
pub use error::{Error, Result};
pub use exec::Exec;
pub use experiment::{
    perturb_state, reference_experiment, rotate_measurement, ExperimentSpec, Label, NoiseSpec,
};
pub use isometry::{
    apply_isometry_circuit, apply_isometry_formula, certify_measurement, ideal_theta,
    state_distance, IsometryOutput,
};
pub use observable::{
    apply_local, expectation, LocalObservable, Matrix2, ObservableKind, SettingProduct,
};
pub use residuals::{identity_residuals, IdentityResiduals};
pub use sampling::sample_correlator;
pub use state::{dicke_state, inner, PureState, C64};
pub use verifier::{
    ideal_value, required_settings, verify, verify_with, zbasis_distribution_check, Family,
    SettingDescriptor, StatisticsReport, VerifyMode,
};
