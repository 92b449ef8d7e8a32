use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;
use torelli_bench::sample_curves;
use torelli_core::jacgrp::enumerate_jacobian;
use torelli_core::{zeta, Jacobian};

fn cantor_add(c: &mut Criterion) {
    let mut group = c.benchmark_group("cantor_add");
    for (name, curve) in sample_curves() {
        let jac = Jacobian::new(&curve, 2).unwrap();
        let pts = curve.enumerate_points_capped(2, 1 << 16).unwrap();
        let class = |i: usize| jac.point_class(&pts[i]).unwrap();
        let n = pts.len();
        // generic operands: two weight-2 classes
        let a = jac.add(&class(0), &class(n / 2)).unwrap();
        let b = jac.add(&class(n / 3), &class(2 * n / 3)).unwrap();
        assert_eq!((a.weight(), b.weight()), (2, 2));
        group.bench_with_input(BenchmarkId::from_parameter(name), &(a, b), |bench, (a, b)| {
            bench.iter(|| jac.add(black_box(a), black_box(b)).unwrap())
        });
    }
    group.finish();
}

fn scalar_mul(c: &mut Criterion) {
    let (name, curve) = sample_curves().pop().unwrap();
    let jac = Jacobian::new(&curve, 1).unwrap();
    let pts = curve.enumerate_points(1).unwrap();
    let d = jac.point_class(&pts[0]).unwrap();
    let n = zeta::frob_charpoly(&curve).unwrap().group_order(1);
    c.bench_function(&format!("scalar_mul_group_order/{name}"), |bench| {
        bench.iter(|| jac.scalar_mul(black_box(&d), black_box(&n)).unwrap())
    });
    let big = BigInt::from(1u8) << 200;
    c.bench_function(&format!("scalar_mul_2^200/{name}"), |bench| {
        bench.iter(|| jac.scalar_mul(black_box(&d), black_box(&big)).unwrap())
    });
}

fn count_points(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_points");
    for (name, curve) in sample_curves() {
        let m = if curve.p() > 50 { 2 } else { 4 };
        group.bench_function(BenchmarkId::new(name, m), |bench| {
            bench.iter(|| curve.count_points(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn order_sequence(c: &mut Criterion) {
    let mut group = c.benchmark_group("group_order_seq");
    for (name, curve) in sample_curves() {
        let poly = zeta::frob_charpoly(&curve).unwrap();
        group.bench_function(BenchmarkId::new(name, 64), |bench| {
            bench.iter(|| zeta::group_order_seq(black_box(&poly), 64))
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_jacobian");
    group.sample_size(10);
    for (name, curve) in sample_curves().into_iter().take(2) {
        group.bench_function(BenchmarkId::new(name, 2), |bench| {
            bench.iter(|| enumerate_jacobian(black_box(&curve), 2).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, cantor_add, scalar_mul, count_points, order_sequence, enumeration);
criterion_main!(benches);
