//! Distance solvers against oracles computed independently of the solver code.

use std::sync::Arc;

use lorentz_metrics::domains::{DomainOracle, MappedDomain};
use lorentz_metrics::metrics::{
    infinitesimal_markowitz, markowitz_edge_cost, markowitz_lower, markowitz_upper, null_distance,
    quasi_hyperbolic_distance, quasi_hyperbolic_lightlike, LowerWitnesses, Mesh, NullLattice, QuasiGrid, TimeFunction,
};
use lorentz_metrics::minkowski::{apply_conformal, causally_related};
use lorentz_metrics::oracles::{delta_cone_future, delta_diamond_2d, delta_halfspace};
use lorentz_metrics::sampling::{rng, sample_members};
use lorentz_metrics::{ConformalMap, Event, SpecialDomain, Vector};
use rand::Rng;

fn ev(c: &[f64]) -> Event {
    Event::from_slice(c)
}

fn unit_diamond() -> SpecialDomain {
    SpecialDomain::Diamond {
        a: ev(&[-1.0, 0.0]),
        b: ev(&[1.0, 0.0]),
    }
}

fn pairs<D: DomainOracle + ?Sized>(omega: &D, count: usize, seed: u64) -> Vec<(Event, Event)> {
    let pts = sample_members(omega, 2 * count, 0.0, &mut rng(seed));
    pts.chunks_exact(2).map(|w| (w[0].clone(), w[1].clone())).collect()
}

fn logit(s: f64) -> f64 {
    (s / (1.0 - s)).ln()
}

/// In null coordinates `u = (1 + t + p) / 2`, `w = (1 + t - p) / 2` the unit
/// diamond is the open unit square, each lightlike line is a coordinate line
/// whose cross-ratio length is the change of `logit`, and shortest lightlike
/// chains are staircases: the distance is the l1 distance of the logits.
fn logit_l1(x: &Event, y: &Event) -> f64 {
    let uw = |e: &Event| ((1.0 + e.t() + e[1]) / 2.0, (1.0 + e.t() - e[1]) / 2.0);
    let ((u0, w0), (u1, w1)) = (uw(x), uw(y));
    (logit(u1) - logit(u0)).abs() + (logit(w1) - logit(w0)).abs()
}

#[test]
fn diamond_matches_the_logit_l1_model() {
    let d = unit_diamond();
    let (a, b) = (ev(&[-1.0, 0.0]), ev(&[1.0, 0.0]));
    for (x, y) in pairs(&d, 60, 1) {
        let model = logit_l1(&x, &y);
        let oracle = delta_diamond_2d(&a, &b, &x, &y).unwrap();
        assert!((oracle - model).abs() < 1e-9 * (1.0 + model), "{oracle} vs {model}");
        let up = markowitz_upper(&d, &x, &y, &Mesh::default().with_k(16)).unwrap().value;
        assert!((up - model).abs() < 1e-9 * (1.0 + model), "{up} vs {model}");
    }
}

#[test]
fn diamond_distance_is_additive_along_causal_curves() {
    let (a, b) = (ev(&[-1.0, 0.0]), ev(&[1.0, 0.0]));
    let mut r = rng(2);
    for _ in 0..100 {
        let x = ev(&[r.gen_range(-0.5..-0.2), r.gen_range(-0.2..0.2)]);
        let z = ev(&[r.gen_range(0.3..0.6), r.gen_range(-0.1..0.1)]);
        if !causally_related(&x, &z) {
            continue;
        }
        let y = x.lerp(&z, r.gen_range(0.05..0.95));
        let d = |p: &Event, q: &Event| delta_diamond_2d(&a, &b, p, q).unwrap();
        assert!((d(&x, &z) - d(&x, &y) - d(&y, &z)).abs() < 1e-12 * (1.0 + d(&x, &z)));
    }
}

#[test]
fn diamond_oracle_is_conformally_invariant() {
    let (a, b) = (ev(&[2.0, 0.0]), ev(&[4.0, 0.5]));
    let d = SpecialDomain::Diamond { a: a.clone(), b: b.clone() };
    let mut r = rng(3);
    for (x, y) in pairs(&d, 40, 4) {
        let base = delta_diamond_2d(&a, &b, &x, &y).unwrap();
        // similarity
        let lambda = r.gen_range(0.5..2.0);
        let g = ConformalMap::similarity(
            lambda,
            ConformalMap::boost_matrix(1, 1, r.gen_range(-1.0..1.0)),
            Vector::from_slice(&[r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)]),
        )
        .unwrap();
        let m = |e: &Event| apply_conformal(&g, e).unwrap();
        let moved = delta_diamond_2d(&m(&a), &m(&b), &m(&x), &m(&y)).unwrap();
        assert!((moved - base).abs() < 1e-9 * (1.0 + base));
        // inversion: the image of a diamond in the future cone of the origin is the diamond on the image tips
        let inv = |e: &Event| apply_conformal(&ConformalMap::Inversion, e).unwrap();
        let image = delta_diamond_2d(&inv(&a), &inv(&b), &inv(&x), &inv(&y)).unwrap();
        assert!((image - base).abs() < 1e-6 * (1.0 + base), "{image} vs {base}");
    }
}

/// Dijkstra over every pair of lattice nodes on a common lightlike line,
/// costed with the segment formula; independent of the lattice's own edges.
fn brute_force_chain<D: DomainOracle + ?Sized>(omega: &D, lat: &NullLattice<D>) -> f64 {
    let nodes = lat.nodes();
    let m = nodes.len();
    let inside: Vec<bool> = (0..m).map(|k| lat.is_inside(k)).collect();
    let mut dist = vec![f64::INFINITY; m];
    let mut done = vec![false; m];
    dist[lat.source_index()] = 0.0;
    for _ in 0..m {
        let Some(v) = (0..m).filter(|&k| !done[k] && dist[k].is_finite()).min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
        else {
            break;
        };
        done[v] = true;
        for w in 0..m {
            if done[w] || !inside[w] {
                continue;
            }
            let (dt, dp) = (nodes[w].t() - nodes[v].t(), nodes[w][1] - nodes[v][1]);
            if (dt.abs() - dp.abs()).abs() > 1e-12 * (1.0 + dt.abs()) {
                continue;
            }
            if let Ok(c) = markowitz_edge_cost(omega, &nodes[v], &nodes[w]) {
                dist[w] = dist[w].min(dist[v] + c);
            }
        }
    }
    dist[lat.target_index()]
}

#[test]
fn lattice_solver_matches_brute_force_search() {
    let omega = SpecialDomain::StableDiamond {
        a: ev(&[-1.0, 0.0]),
        b: ev(&[1.0, 0.0]),
        eps: 1.0,
    };
    let mesh = Mesh {
        k: 6,
        margin: 1,
        grading: 1,
        ..Mesh::default()
    };
    for (x, y) in pairs(&omega, 6, 5) {
        let lat = NullLattice::build(&omega, &x, &y, &mesh).unwrap();
        let fast = lat.shortest_chain().unwrap().total;
        let slow = brute_force_chain(&omega, &lat);
        assert!((fast - slow).abs() < 1e-9 * (1.0 + slow), "{fast} vs {slow}");
    }
}

#[test]
fn half_plane_quasi_hyperbolic_is_the_hyperbolic_metric() {
    // boundary distance to {t = 0} is t, so the quasi-hyperbolic metric is |dx| / t
    let omega = SpecialDomain::HalfSpaceFuture {
        point: Event::origin(1),
        normal: None,
    };
    let mut r = rng(6);
    for _ in 0..8 {
        let x = ev(&[r.gen_range(0.5..2.0), r.gen_range(-1.0..1.0)]);
        let y = ev(&[r.gen_range(0.5..2.0), r.gen_range(-1.0..1.0)]);
        let d2 = (x.t() - y.t()).powi(2) + (x[1] - y[1]).powi(2);
        let exact = (1.0 + d2 / (2.0 * x.t() * y.t())).acosh();
        let k = quasi_hyperbolic_distance(&omega, &x, &y, &QuasiGrid::default()).unwrap().value;
        assert!((k - exact).abs() <= 0.05 * exact, "{k} vs {exact}");
    }
}

#[test]
fn edge_cost_is_the_integral_of_the_density() {
    let domains = [
        unit_diamond(),
        SpecialDomain::StableDiamond {
            a: ev(&[-1.0, 0.0]),
            b: ev(&[1.0, 0.0]),
            eps: 0.5,
        },
        SpecialDomain::ConeFuture {
            apex: Event::origin(2),
        },
        SpecialDomain::StableConeComplement { eps: 1.0, n: 2 },
    ];
    let mut r = rng(7);
    for omega in &domains {
        let n = omega.dim();
        let mut tested = 0;
        while tested < 10 {
            let p = sample_members(omega, 1, 0.0, &mut r).remove(0);
            let mut dir: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
            let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm < 1e-3 {
                continue;
            }
            let len = r.gen_range(0.05..0.4);
            dir.iter_mut().for_each(|c| *c *= len / norm);
            let v = Vector::from_slice(&[&[len][..], &dir].concat());
            let q = p.offset(&v, 1.0);
            let Ok(cost) = markowitz_edge_cost(omega, &p, &q) else { continue };
            // composite Simpson rule with 1024 intervals
            let m = 1024;
            let f = |s: f64| infinitesimal_markowitz(omega, &p.offset(&v, s), &v).unwrap();
            let mut sum = f(0.0) + f(1.0);
            for i in 1..m {
                sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 / m as f64);
            }
            let integral = sum / (3.0 * m as f64);
            assert!((integral - cost).abs() <= 1e-6 * cost.max(1e-3), "{integral} vs {cost}");
            tested += 1;
        }
    }
}

#[test]
fn oracles_lie_between_lower_and_upper_bounds() {
    let cone = SpecialDomain::ConeFuture {
        apex: Event::origin(1),
    };
    let half = SpecialDomain::HalfSpaceFuture {
        point: Event::origin(1),
        normal: None,
    };
    let diamond = unit_diamond();
    let mesh = Mesh::default().with_k(32);
    let lower = LowerWitnesses::default();
    for (omega, seed) in [(&cone, 8), (&half, 9), (&diamond, 10)] {
        let mut applicable = 0;
        for (x, y) in pairs(omega, 200, seed) {
            let exact = match omega {
                SpecialDomain::ConeFuture { apex } => delta_cone_future(apex, &x, &y),
                SpecialDomain::HalfSpaceFuture { .. } => delta_halfspace(omega, &x, &y),
                _ => delta_diamond_2d(&ev(&[-1.0, 0.0]), &ev(&[1.0, 0.0]), &x, &y),
            };
            let Ok(exact) = exact else { continue };
            let lo = markowitz_lower(omega, &x, &y, &lower).unwrap().value;
            let up = markowitz_upper(omega, &x, &y, &mesh).unwrap().value;
            assert!(lo <= exact + 1e-9 * (1.0 + exact), "{omega:?}: lower {lo} > {exact}");
            assert!(exact <= up + 1e-9 * (1.0 + exact), "{omega:?}: upper {up} < {exact}");
            applicable += 1;
        }
        assert!(applicable >= 50, "{omega:?}: only {applicable} applicable pairs");
    }
}

#[test]
fn lower_never_exceeds_upper() {
    let domains = [
        SpecialDomain::StableDiamond {
            a: ev(&[-1.0, 0.0]),
            b: ev(&[1.0, 0.0]),
            eps: 1.0,
        },
        SpecialDomain::StableConeComplement { eps: 1.0, n: 1 },
        SpecialDomain::Bonsante { ell: 1, n: 1 },
    ];
    for (i, omega) in domains.iter().enumerate() {
        for (x, y) in pairs(omega, 20, 11 + i as u64) {
            let lo = markowitz_lower(omega, &x, &y, &LowerWitnesses::default()).unwrap().value;
            let up = markowitz_upper(omega, &x, &y, &Mesh::default().with_k(32)).unwrap().value;
            assert!(lo <= up + 1e-9, "{omega:?}: {lo} > {up}");
        }
    }
}

#[test]
fn upper_bound_is_symmetric_and_satisfies_the_triangle_inequality() {
    let omega = SpecialDomain::StableDiamond {
        a: ev(&[-1.0, 0.0]),
        b: ev(&[1.0, 0.0]),
        eps: 1.0,
    };
    let mesh = Mesh::default().with_k(32);
    let pts = sample_members(&omega, 24, 0.0, &mut rng(14));
    let d = |x: &Event, y: &Event| markowitz_upper(&omega, x, y, &mesh).unwrap().value;
    let slack = |v: f64| (0.05 * v).max(0.05);
    for t in pts.chunks_exact(3) {
        let (x, y, z) = (&t[0], &t[1], &t[2]);
        let (xy, yx, yz, xz) = (d(x, y), d(y, x), d(y, z), d(x, z));
        assert!((xy - yx).abs() <= 2.0 * slack(xy));
        assert!(xz <= xy + yz + 2.0 * slack(xz));
    }
}

#[test]
fn larger_domains_give_smaller_distances() {
    let (a, b) = (ev(&[-1.0, 0.0]), ev(&[1.0, 0.0]));
    let small = SpecialDomain::Diamond { a: a.clone(), b: b.clone() };
    let big = SpecialDomain::StableDiamond { a, b, eps: 1.0 };
    let mesh = Mesh::default().with_k(32);
    for (x, y) in pairs(&small, 30, 15) {
        let ds = markowitz_upper(&small, &x, &y, &mesh).unwrap().value;
        let db = markowitz_upper(&big, &x, &y, &mesh).unwrap().value;
        assert!(db <= ds + (0.05 * ds).max(0.05), "{db} > {ds}");
    }
}

#[test]
fn similarities_carry_the_lattice_along() {
    let omega = SpecialDomain::StableDiamond {
        a: ev(&[-1.0, 0.0]),
        b: ev(&[1.0, 0.0]),
        eps: 1.0,
    };
    let inner: Arc<dyn DomainOracle> = Arc::new(omega.clone());
    let mesh = Mesh::default().with_k(24);
    let mut r = rng(16);
    for (x, y) in pairs(&omega, 10, 17) {
        let g = ConformalMap::similarity(
            r.gen_range(0.5..2.0),
            ConformalMap::boost_matrix(1, 1, r.gen_range(-0.8..0.8)),
            Vector::from_slice(&[r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)]),
        )
        .unwrap();
        let mapped = MappedDomain::new(inner.clone(), g.clone()).unwrap();
        let d0 = markowitz_upper(&omega, &x, &y, &mesh).unwrap().value;
        let gx = apply_conformal(&g, &x).unwrap();
        let gy = apply_conformal(&g, &y).unwrap();
        let d1 = markowitz_upper(&mapped, &gx, &gy, &mesh).unwrap().value;
        assert!((d0 - d1).abs() < 1e-6 * (1.0 + d0), "{d0} vs {d1}");
    }
}

#[test]
fn lightlike_quasi_hyperbolic_is_within_root_two() {
    let omega = SpecialDomain::ConeFuture {
        apex: Event::origin(1),
    };
    for (x, y) in pairs(&omega, 6, 18) {
        let full = quasi_hyperbolic_distance(&omega, &x, &y, &QuasiGrid::default()).unwrap().value;
        let light = quasi_hyperbolic_lightlike(&omega, &x, &y, &Mesh::default()).unwrap().value;
        let slack = (0.05 * full).max(0.05);
        assert!(light >= full - slack && light <= 2f64.sqrt() * full + slack, "{light} vs {full} at {x:?} {y:?}");
    }
}

#[test]
fn null_distance_sandwiches_the_cone_distance() {
    let omega = SpecialDomain::ConeFuture {
        apex: Event::origin(1),
    };
    let mesh = Mesh::default().with_k(32);
    for (x, y) in pairs(&omega, 20, 19) {
        let null = null_distance(&omega, &TimeFunction::LogPast, &x, &y, &mesh).unwrap().value;
        let delta = markowitz_upper(&omega, &x, &y, &mesh).unwrap().value;
        let slack = (0.05 * delta).max(0.05);
        assert!(null <= delta + slack, "{null} > {delta}");
        assert!(delta <= 2.0 * null + slack, "{delta} > 2 * {null}");
    }
}
