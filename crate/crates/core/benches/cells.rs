use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use esspath_core::checks::{self, VerifyOptions};
use esspath_core::endo::{EndAlgebra, Product};
use esspath_core::graph::builtin;
use esspath_core::{EssentialSpace, Parallelism, SpaceOptions};

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("rayon", Parallelism::Rayon)];

fn options(par: Parallelism) -> SpaceOptions {
    SpaceOptions { parallelism: par, ..SpaceOptions::default() }
}

fn cell_bases(c: &mut Criterion) {
    let mut group = c.benchmark_group("cell_bases");
    group.sample_size(10);
    for name in ["D6", "E6"] {
        let g = builtin(name).unwrap();
        for (mode, par) in MODES {
            group.bench_with_input(BenchmarkId::new(mode, name), &g, |b, g| {
                b.iter(|| EssentialSpace::from_graph(g.clone(), options(par)).unwrap())
            });
        }
    }
    group.finish();
}

fn end_algebra(c: &mut Criterion) {
    let mut group = c.benchmark_group("end_algebra");
    group.sample_size(10);
    let space = EssentialSpace::from_graph(builtin("E6").unwrap(), SpaceOptions::default()).unwrap();
    for (mode, par) in MODES {
        group.bench_function(BenchmarkId::new(mode, "E6"), |b| {
            b.iter(|| EndAlgebra::with_parallelism(space.clone(), par))
        });
    }
    group.finish();
}

fn sampled_checks(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampled_checks");
    group.sample_size(10);
    let space = EssentialSpace::from_graph(builtin("E6").unwrap(), SpaceOptions::default()).unwrap();
    let alg = EndAlgebra::new(space.clone());
    for (mode, par) in MODES {
        let opts = VerifyOptions { parallelism: par, samples: 100, ..VerifyOptions::default() };
        group.bench_function(BenchmarkId::new("projector", mode), |b| {
            b.iter(|| checks::check_projector_identity(&space, &opts))
        });
        group.bench_function(BenchmarkId::new("homomorphism", mode), |b| {
            b.iter(|| checks::check_homomorphism(&alg, false, Product::Bullet, &opts))
        });
    }
    group.finish();
}

criterion_group!(benches, cell_bases, end_algebra, sampled_checks);
criterion_main!(benches);
