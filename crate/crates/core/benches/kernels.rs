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

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dicke_selftest::isometry::isometry_formula_on;
use dicke_selftest::*;
use std::hint::black_box;

const EXECS: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn bench_verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_exact");
    for (n, k) in [(6, 3), (8, 4), (10, 5)] {
        let exp = perturb_state(&reference_experiment(n, k).unwrap(), 0.01, 1).unwrap();
        for (name, exec) in EXECS {
            group.bench_with_input(
                BenchmarkId::new(name, format!("{n}_{k}")),
                &exp,
                |b, exp| b.iter(|| verify_with(black_box(exp), VerifyMode::Exact, exec).unwrap()),
            );
        }
    }
    group.finish();
}

fn bench_isometry(c: &mut Criterion) {
    let mut group = c.benchmark_group("isometry_formula");
    for (n, k) in [(6, 3), (8, 4), (10, 5)] {
        let exp = perturb_state(&reference_experiment(n, k).unwrap(), 0.01, 1).unwrap();
        for (name, exec) in EXECS {
            group.bench_with_input(
                BenchmarkId::new(name, format!("{n}_{k}")),
                &exp,
                |b, exp| b.iter(|| isometry_formula_on(black_box(exp), exp.state(), exec).unwrap()),
            );
        }
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let params: Vec<f64> = (0..8).map(|i| 0.0025 * i as f64).collect();
    for (name, exec) in EXECS {
        group.bench_function(BenchmarkId::new(name, "5_2"), |b| {
            b.iter(|| {
                run_sweep(
                    5,
                    2,
                    SweepNoise::Perturb,
                    black_box(&params),
                    3,
                    VerifyMode::Exact,
                    exec,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_verify, bench_isometry, bench_sweep);
criterion_main!(benches);
