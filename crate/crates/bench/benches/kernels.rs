use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hororadon::{solve_second_kind, sphere_phase_integral, transform_sphere};
use hororadon_bench::{off_center_gaussian, quadrature, sine_problem};

fn sphere_transform(c: &mut Criterion) {
    let q = quadrature();
    let mut group = c.benchmark_group("transform_sphere");
    for n in [2, 3] {
        let f = off_center_gaussian(n);
        let contact = vec![0.1; n - 1];
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| transform_sphere(&f, black_box(&contact), black_box(0.3), &q).unwrap())
        });
    }
    group.finish();
}

fn second_kind(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_second_kind");
    for nodes in [257, 1025] {
        let p = sine_problem(nodes);
        group.bench_with_input(BenchmarkId::from_parameter(nodes), &nodes, |b, _| {
            b.iter(|| solve_second_kind(black_box(&p)).unwrap())
        });
    }
    group.finish();
}

fn phase(c: &mut Criterion) {
    let mut group = c.benchmark_group("sphere_phase_integral");
    for n in [2, 3, 6] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| sphere_phase_integral(black_box(7.5), n).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sphere_transform, second_kind, phase);
criterion_main!(benches);
