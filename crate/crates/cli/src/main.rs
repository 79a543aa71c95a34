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

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use dicke_selftest_cli::{parse_thread_cap, run, Cli, CliError, RunConfig, THREADS_ENV};

fn init_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let cap = parse_thread_cap(&value)?;
    #[cfg(feature = "parallel")]
    if let Some(t) = cap {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::usage(THREADS_ENV, e.to_string()))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = cap;
    Ok(())
}

fn main_inner() -> Result<i32, CliError> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return Ok(code);
        }
    };
    init_threads()?;
    let cfg = RunConfig::resolve(cli)?;
    let outcome = run(&cfg)?;
    if cfg.out.is_none() {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(outcome.artifact.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e))?;
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
