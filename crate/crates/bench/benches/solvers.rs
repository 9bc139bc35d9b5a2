use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use lorentz_metrics::hyplab::{four_point_delta, DistanceMatrix, QuadrupleSampler};
use lorentz_metrics::metrics::{
    hilbert_distance, markowitz_lower, markowitz_upper, quasi_hyperbolic_distance, LowerWitnesses, Mesh, QuasiGrid,
};
use lorentz_metrics::{Event, SpecialDomain};

fn diamond() -> SpecialDomain {
    SpecialDomain::Diamond {
        a: Event::new(-1.0, &[0.0]),
        b: Event::new(1.0, &[0.0]),
    }
}

fn pair() -> (Event, Event) {
    (Event::new(-0.3, &[0.1]), Event::new(0.4, &[-0.2]))
}

fn markowitz(c: &mut Criterion) {
    let omega = diamond();
    let (x, y) = pair();
    let mut g = c.benchmark_group("markowitz_upper");
    g.sample_size(10);
    for k in [16, 32, 64] {
        let mesh = Mesh::default().with_k(k);
        g.bench_with_input(BenchmarkId::from_parameter(k), &mesh, |b, mesh| {
            b.iter(|| markowitz_upper(&omega, black_box(&x), black_box(&y), mesh).unwrap())
        });
    }
    g.finish();
    c.bench_function("markowitz_lower", |b| {
        b.iter(|| markowitz_lower(&omega, black_box(&x), black_box(&y), &LowerWitnesses::default()).unwrap())
    });
}

fn others(c: &mut Criterion) {
    let omega = diamond();
    let (x, y) = pair();
    c.bench_function("hilbert", |b| b.iter(|| hilbert_distance(&omega, black_box(&x), black_box(&y)).unwrap()));
    let mut g = c.benchmark_group("quasi_hyperbolic");
    g.sample_size(10);
    g.bench_function("default_grid", |b| {
        b.iter(|| quasi_hyperbolic_distance(&omega, black_box(&x), black_box(&y), &QuasiGrid::default()).unwrap())
    });
    g.finish();
}

fn hyperbolicity(c: &mut Criterion) {
    let pts: Vec<Event> = (0..24).map(|i| Event::new(0.0, &[(i as f64).cos() * i as f64, (i as f64).sin()])).collect();
    let m = DistanceMatrix::from_fn(pts, |a, b| Ok(((a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt())).unwrap();
    let sampler = QuadrupleSampler {
        quadruples: 20_000,
        seed: 1,
    };
    c.bench_function("four_point_delta_24", |b| b.iter(|| four_point_delta(black_box(&m), &sampler).unwrap()));
}

criterion_group!(benches, markowitz, others, hyperbolicity);
criterion_main!(benches);
