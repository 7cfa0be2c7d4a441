use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hitchin_bench::{fiber_point, reference_set, short_flow};
use hitchin_core::flows::{integrate_compiled, CompiledHamiltonian, CONSERVATION_START};
use hitchin_core::hamiltonians::{fiber_conics, poisson_bracket, CurveConfig, HamiltonianSet};
use hitchin_core::kummer::{focus_point, sample_sigma, ComplexForms};
use hitchin_core::weierstrass::weierstrass_recovery;

fn construction(c: &mut Criterion) {
    let cfg = CurveConfig::reference();
    c.bench_function("build hamiltonians", |b| b.iter(|| HamiltonianSet::build(black_box(&cfg)).unwrap()));
    let set = reference_set();
    c.bench_function("bracket h1 h2", |b| {
        b.iter(|| poisson_bracket(black_box(set.affine(1)), black_box(set.affine(2))).unwrap())
    });
}

fn fibers(c: &mut Criterion) {
    let set = reference_set();
    let q = fiber_point();
    c.bench_function("fiber conics", |b| b.iter(|| fiber_conics(&set, black_box(&q)).unwrap()));
    c.bench_function("weierstrass recovery", |b| b.iter(|| weierstrass_recovery(&set, black_box(&q)).unwrap()));
}

fn singular_surface(c: &mut Criterion) {
    let cfg = CurveConfig::reference();
    let forms = ComplexForms::new(&cfg);
    let mut seed = 0u64;
    c.bench_function("sigma sample and focus", |b| {
        b.iter(|| {
            seed += 1;
            let x = sample_sigma(&cfg, seed);
            focus_point(&forms, &x).unwrap()
        })
    });
}

fn flows(c: &mut Criterion) {
    let set = reference_set();
    let h = CompiledHamiltonian::new(set.affine(2)).unwrap();
    let cfg = short_flow();
    c.bench_function("rk4 1000 steps", |b| {
        b.iter(|| integrate_compiled(&h, black_box(&CONSERVATION_START), &cfg).unwrap())
    });
}

criterion_group!(benches, construction, fibers, singular_surface, flows);
criterion_main!(benches);
