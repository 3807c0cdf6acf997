use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hypertuple_core::algebra::compute_characters;
use hypertuple_core::construct::{build_tuple, gallery, GalleryParams};
use hypertuple_core::numkit::{eigenvalues, random_matrix, Field, Tolerance};
use hypertuple_core::orbit::{coverage, enumerate_orbit, BoxRegion, OrbitBudget};
use hypertuple_core::semigroup::{independent_reals, kronecker_approx, Scheme};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn eig(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigenvalues");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [4usize, 8, 16] {
        let a = random_matrix(Field::Complex, n, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| eigenvalues(black_box(a))));
    }
    group.finish();
}

fn characters(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("characters");
    for n in [2usize, 4, 6] {
        let alg = gallery("diag", GalleryParams { n: Some(n), ..Default::default() }, &tol)
            .unwrap()
            .algebra;
        group.bench_with_input(BenchmarkId::new("diag", n), &alg, |b, alg| {
            b.iter(|| compute_characters(black_box(alg), &tol, 42).unwrap())
        });
    }
    let az = gallery("az", GalleryParams::default(), &tol).unwrap().algebra;
    group.bench_function("az", |b| b.iter(|| compute_characters(black_box(&az), &tol, 42).unwrap()));
    group.finish();
}

fn orbit(c: &mut Criterion) {
    let tol = Tolerance::default();
    let alg = gallery("diag", GalleryParams { n: Some(2), ..Default::default() }, &tol)
        .unwrap()
        .algebra;
    let table = compute_characters(&alg, &tol, 42).unwrap();
    let tuple = build_tuple(&alg, &table, Scheme::SqrtPrimes, 42).unwrap();
    let x = tuple.cyclic_vector.clone().unwrap();
    let region = BoxRegion::cube(Field::Complex, 2, -1.5, 1.5).unwrap();
    let mut group = c.benchmark_group("orbit_coverage");
    for d in [20u32, 40] {
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| {
            b.iter(|| {
                let pts = enumerate_orbit(&tuple, &x, OrbitBudget::degree(d)).unwrap();
                coverage(pts, &region, 8, &[d]).unwrap()
            })
        });
    }
    group.finish();
}

fn kronecker(c: &mut Criterion) {
    let mut group = c.benchmark_group("kronecker");
    for d in 1..=3 {
        let alpha = independent_reals(d, Scheme::SqrtPrimes, None).unwrap();
        let x: Vec<f64> = (0..d).map(|i| 0.37 * (i as f64 + 1.0)).collect();
        group.bench_with_input(BenchmarkId::from_parameter(d), &x, |b, x| {
            b.iter(|| kronecker_approx(&alpha, black_box(x), 1e-2, 10_000).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, eig, characters, orbit, kronecker);
criterion_main!(benches);
