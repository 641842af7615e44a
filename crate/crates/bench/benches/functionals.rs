use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use mtf_core::grid::{make_grid, GridScheme};
use mtf_core::momentum::{energy_mtf, repulsion_m_direct, repulsion_m_layercake};
use mtf_core::position::energy_tf;
use mtf_core::profile::{RadialProfile, Space};
use mtf_core::rearrange::rearrange_decreasing;
use mtf_core::rng::SplitMix64;
use mtf_core::{
    default_density_grid, minimizer_density, solve_tf_ode, transform_t, AtomConfig,
};

fn smooth(space: Space, n: usize) -> RadialProfile {
    let grid = make_grid(GridScheme::Log, n, 1e-3, 40.0).unwrap();
    let values: Vec<f64> = grid.nodes().iter().map(|r| (-r).exp()).collect();
    RadialProfile::new(grid, values, space).unwrap()
}

fn staircase(n: usize, seed: u64) -> RadialProfile {
    let mut rng = SplitMix64::new(seed);
    let mut breaks: Vec<f64> = (0..6).map(|_| rng.uniform(0.3, 8.0)).collect();
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 0.05);
    let levels: Vec<f64> = (0..breaks.len()).map(|_| rng.uniform(0.05, 2.0)).collect();
    RadialProfile::piecewise_constant(Space::Momentum, &breaks, &levels, n, 0.01, 10.0).unwrap()
}

fn bench_energies(c: &mut Criterion) {
    let cfg = AtomConfig::test_gauge(1.0, 1.0).unwrap();
    let mut group = c.benchmark_group("energies");
    for n in [512usize, 2048] {
        let rho = smooth(Space::Position, n);
        group.bench_with_input(BenchmarkId::new("energy_tf", n), &rho, |b, rho| {
            b.iter(|| energy_tf(black_box(rho), &cfg).unwrap())
        });
        let tau = smooth(Space::Momentum, n);
        group.bench_with_input(BenchmarkId::new("energy_mtf", n), &tau, |b, tau| {
            b.iter(|| energy_mtf(black_box(tau), &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_repulsion_paths(c: &mut Criterion) {
    let cfg = AtomConfig::test_gauge(1.0, 1.0).unwrap();
    let mut group = c.benchmark_group("repulsion");
    for n in [256usize, 1024] {
        let tau = staircase(n, 42);
        group.bench_with_input(BenchmarkId::new("direct", n), &tau, |b, tau| {
            b.iter(|| repulsion_m_direct(black_box(tau), &cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("layercake", n), &tau, |b, tau| {
            b.iter(|| repulsion_m_layercake(black_box(tau), &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_transform_and_rearrange(c: &mut Criterion) {
    let cfg = AtomConfig::test_gauge(1.0, 1.0).unwrap();
    let rho = smooth(Space::Position, 2048);
    c.bench_function("transform_t/2048", |b| {
        b.iter(|| transform_t(black_box(&rho), &cfg).unwrap())
    });
    let tau = staircase(1024, 11);
    c.bench_function("rearrange_decreasing/1024", |b| {
        b.iter(|| rearrange_decreasing(black_box(&tau)).unwrap())
    });
}

fn bench_solver(c: &mut Criterion) {
    let cfg = AtomConfig::new(1.0, 1.0, 2.0).unwrap();
    let mut group = c.benchmark_group("solver");
    group.sample_size(10);
    group.bench_function("solve_tf_ode/neutral", |b| {
        b.iter(|| solve_tf_ode(black_box(&cfg), 1e-8).unwrap())
    });
    let sol = solve_tf_ode(&cfg, 1e-8).unwrap();
    group.bench_function("minimizer_density/4096", |b| {
        let grid = default_density_grid(&sol, &cfg, 4096).unwrap();
        b.iter(|| minimizer_density(black_box(&sol), &cfg, &grid).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_energies,
    bench_repulsion_paths,
    bench_transform_and_rearrange,
    bench_solver
);
criterion_main!(benches);
