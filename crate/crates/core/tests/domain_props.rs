use lorentz_metrics::domains::{
    boundary_distance, initial_singularity, ray_exit, sample_graph_surface, stable_acausality_epsilon,
    AcausalityVerdict, DomainOracle, Sign, SpecialDomain,
};
use lorentz_metrics::sampling::{lightlike_directions, rng, sample_members};
use lorentz_metrics::{Endpoint, Event, Vector};
use proptest::prelude::*;

fn ev(c: &[f64]) -> Event {
    Event::from_slice(c)
}

fn domains(n: usize) -> Vec<SpecialDomain> {
    let axis = |t: f64| {
        let mut c = vec![0.0; n + 1];
        c[0] = t;
        ev(&c)
    };
    vec![
        SpecialDomain::ConeFuture { apex: axis(0.0) },
        SpecialDomain::HalfSpaceFuture {
            point: axis(0.0),
            normal: None,
        },
        SpecialDomain::Diamond {
            a: axis(-1.0),
            b: axis(1.0),
        },
        SpecialDomain::StableConeComplement { eps: 1.0, n },
        SpecialDomain::StableDiamond {
            a: axis(-1.0),
            b: axis(1.0),
            eps: 0.5,
        },
        SpecialDomain::Bonsante { ell: 1, n },
        SpecialDomain::SpacelikeSlab { height: 0.5, n },
    ]
}

fn direction(n: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-1.0..1.0f64, n + 1)
        .prop_filter("nonzero", |v| v.iter().map(|c| c * c).sum::<f64>() > 1e-4)
        .prop_map(|v| Vector::from_slice(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ray_exits_lie_on_the_boundary(n in 1usize..=2, which in 0usize..7, seed in any::<u64>(), v in direction(2)) {
        let omega = &domains(n)[which];
        let v = Vector::from_slice(&v.0[..=n]);
        let x = sample_members(omega, 1, 0.0, &mut rng(seed)).remove(0);
        for sign in [Sign::Past, Sign::Future] {
            if let Endpoint::Finite(e) = ray_exit(omega, &x, &v, sign).unwrap() {
                // boundary points have arbitrarily close members and non-members
                let h = 1e-8 * omega.scale();
                let d = &e - &x;
                let len = d.dot_euclid(&d).sqrt();
                prop_assert!(omega.contains(&x.offset(&d, 1.0 - h / len)));
                prop_assert!(!omega.contains(&x.offset(&d, 1.0 + h / len)));
                for k in 1..64 {
                    prop_assert!(omega.contains(&x.lerp(&e, k as f64 / 64.0)));
                }
            }
        }
    }

    #[test]
    fn boundary_distance_bounds_lightlike_exits(n in 1usize..=2, which in 0usize..7, seed in any::<u64>()) {
        let omega = &domains(n)[which];
        let x = sample_members(omega, 1, 0.0, &mut rng(seed)).remove(0);
        let d = boundary_distance(omega, &x).unwrap();
        for l in lightlike_directions(n, 16) {
            let v = Vector::from_slice(&l);
            for sign in [Sign::Past, Sign::Future] {
                if let Endpoint::Finite(e) = ray_exit(omega, &x, &v, sign).unwrap() {
                    let w = &e - &x;
                    prop_assert!(d <= w.dot_euclid(&w).sqrt() * (1.0 + 1e-9) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn stably_acausal_domains_have_short_past_lightlike_exits(n in 1usize..=2, eps in 0.25..2.0f64, seed in any::<u64>()) {
        let omega = SpecialDomain::StableConeComplement { eps, n };
        let x = sample_members(&omega, 1, 0.0, &mut rng(seed)).remove(0);
        let d = boundary_distance(&omega, &x).unwrap();
        let shortest = lightlike_directions(n, 64)
            .into_iter()
            .filter_map(|l| match ray_exit(&omega, &x, &Vector::from_slice(&l), Sign::Past).unwrap() {
                Endpoint::Finite(e) => {
                    let w = &e - &x;
                    Some(w.dot_euclid(&w).sqrt())
                }
                Endpoint::Infinite => None,
            })
            .fold(f64::INFINITY, f64::min);
        let c = ((2.0 + eps).powi(2) + eps * eps).sqrt() / eps;
        prop_assert!(shortest <= 1.05 * c * d, "{} > {} * {}", shortest, c, d);
    }

    #[test]
    fn singularities_sit_in_the_narrowed_past_cone(n in 1usize..=2, eps in 0.25..2.0f64, seed in any::<u64>()) {
        let omega = SpecialDomain::StableConeComplement { eps, n };
        let x = sample_members(&omega, 1, 0.0, &mut rng(seed)).remove(0);
        if let Ok((r, _)) = initial_singularity(&omega, &x, Sign::Past) {
            let d = &x - &r;
            prop_assert!((1.0 + eps) * d.spatial_norm() <= d.0[0] + 1e-6);
        }
    }

    #[test]
    fn acausality_is_invariant_under_dilations_and_translations(
        slope in 0.1..0.9f64, lambda in 0.1..10.0f64, shift in prop::collection::vec(-5.0..5.0f64, 3),
    ) {
        let samples = sample_graph_surface(|p| slope * (p[0] * p[0] + p[1] * p[1]).sqrt(), &[-1.0, -1.0], &[1.0, 1.0], 9);
        let moved: Vec<Event> = samples
            .iter()
            .map(|e| Event(e.0.iter().zip(&shift).map(|(c, s)| lambda * c + s).collect()))
            .collect();
        let eps = |v: AcausalityVerdict| match v {
            AcausalityVerdict::StablyAcausal { eps, .. } => eps,
            other => panic!("unexpected verdict {other:?}"),
        };
        let a = eps(stable_acausality_epsilon(&samples).unwrap());
        let b = eps(stable_acausality_epsilon(&moved).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
    }
}

#[test]
fn domain_list_is_valid() {
    for n in 1..=2 {
        for d in domains(n) {
            d.validate().unwrap();
            assert!(d.contains(&d.center()));
        }
    }
}
