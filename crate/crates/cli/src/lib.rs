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

//! Command-line harness for the `dicke-selftest` engine.

pub mod config;
pub mod error;
pub mod run;

pub use config::{Cli, Command, Format, NoiseArg, RunConfig, Shots};
pub use error::CliError;
pub use run::{run, RunOutcome};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "DICKE_SELFTEST_THREADS";

/// Parses a thread cap; `0` or empty means no cap.
pub fn parse_thread_cap(value: &str) -> Result<Option<usize>, CliError> {
    let v = value.trim();
    if v.is_empty() {
        return Ok(None);
    }
    match v.parse::<usize>() {
        Ok(0) => Ok(None),
        Ok(t) => Ok(Some(t)),
        Err(_) => Err(CliError::usage(
            THREADS_ENV,
            format!("expected a thread count, got '{value}'"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_cap() {
        assert_eq!(parse_thread_cap("4").unwrap(), Some(4));
        assert_eq!(parse_thread_cap("0").unwrap(), None);
        assert_eq!(parse_thread_cap(" ").unwrap(), None);
        assert!(parse_thread_cap("four").is_err());
    }
}
