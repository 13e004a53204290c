use misr_core::analytic::{ccdf_hip_alpha4, gain_silencing, misr_silencing, moment_nu, PathLossExponent};
use misr_core::fading::FadingModel;
use misr_core::pointfields::*;
use misr_core::rng::Stream;
use misr_core::simkernel::*;
use proptest::prelude::*;

fn alpha(a: f64) -> PathLossExponent {
    PathLossExponent::new(a).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn vertices_have_empty_circumcircles(seed in any::<u64>(), n in 50u32..400) {
        let region = Region::for_expected_points(n as f64, 1.0).unwrap();
        let pts = sample_ppp(1.0, region, Stream::root(seed)).unwrap();
        prop_assume!(pts.len() >= 3);
        let sites = voronoi_vertices(&pts, 0.5 * region.radius()).unwrap();
        for s in &sites {
            prop_assert!(circumcircle_is_empty(s, pts.points()));
            let [a, b, c] = s.triple;
            prop_assert!(a < b && b < c);
            for i in s.triple {
                let d = pts.points()[i].dist_sq(s.vertex).sqrt();
                prop_assert!((d - s.circumradius).abs() <= 1e-9 * s.circumradius.max(1.0));
            }
        }
    }

    #[test]
    fn vertices_scale_with_the_point_set(seed in any::<u64>(), c in 0.1f64..10.0) {
        let region = Region::for_expected_points(200.0, 1.0).unwrap();
        let pts = sample_ppp(1.0, region, Stream::root(seed)).unwrap();
        let a = voronoi_vertices(&pts, 0.5 * region.radius()).unwrap();
        let b = voronoi_vertices(&pts.scaled(c).unwrap(), 0.5 * c * region.radius()).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.triple, y.triple);
            prop_assert!((x.circumradius * c - y.circumradius).abs() < 1e-9 * y.circumradius);
        }
    }

    #[test]
    fn silencing_misr_decreases(n in 0u32..50, a in 2.1f64..8.0) {
        let a = alpha(a);
        prop_assert!(misr_silencing(n + 1, a) < misr_silencing(n, a));
        prop_assert!(gain_silencing(n + 1, a).unwrap().gain_linear > 1.0);
    }

    #[test]
    fn moments_are_positive_and_decreasing(k in 1u64..10_000, a in 2.1f64..8.0) {
        let a = alpha(a);
        let x = moment_nu(k, a).unwrap();
        let y = moment_nu(k + 1, a).unwrap();
        prop_assert!(x > 0.0 && y < x);
    }

    #[test]
    fn hip_ccdf_is_a_ccdf(t in 1e-6f64..1e6, f in 1.0001f64..10.0) {
        let a = ccdf_hip_alpha4(t).unwrap();
        let b = ccdf_hip_alpha4(t * f).unwrap();
        prop_assert!(a > 0.0 && a < 1.0 && b < a);
    }

    #[test]
    fn empirical_ccdf_is_monotone(v in proptest::collection::vec(1e-4f64..1e4, 1..200)) {
        let c = empirical_ccdf(&v, &ThetaGrid::default()).unwrap();
        prop_assert!(c.probs.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(c.probs.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn fading_samples_positive(seed in any::<u64>(), m in 0.5f64..20.0) {
        let s = FadingModel::nakagami(m).unwrap().sampler().unwrap();
        let mut rng = Stream::root(seed).rng();
        for _ in 0..100 {
            prop_assert!(s.sample(&mut rng) > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn samples_do_not_depend_on_workers(seed in any::<u64>(), workers in 2usize..9) {
        let s = Scenario::new(alpha(4.0))
            .with_scheme(Scheme::Silence(2))
            .with_window_points(200)
            .with_realizations(1100)
            .with_seed(seed);
        let a = Engine::sequential().sir_samples(&s).unwrap();
        let b = Engine::parallel(Some(workers)).sir_samples(&s).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn larger_window_extends_the_same_points(seed in any::<u64>()) {
        // the small window is a prefix of the large one, so interference only grows
        let s = Scenario::new(alpha(4.0)).with_window_points(200).with_realizations(64).with_seed(seed);
        let big = s.clone().with_window_points(800);
        for i in 0..64 {
            let a = isr_realization(&s, i).unwrap()[0];
            let b = isr_realization(&big, i).unwrap()[0];
            prop_assert!(b >= a);
            prop_assert!(b - a < 0.05 * b + 0.05);
        }
    }
}

#[test]
fn truncation_is_stable() {
    let s = Scenario::new(alpha(4.0)).with_window_points(1000).with_realizations(8000).with_seed(5);
    let a = estimate_misr(&s).unwrap();
    let b = estimate_misr(&s.clone().with_window_points(4000)).unwrap();
    // same seeds for shared points: the difference is the far-field tail
    assert!(b.mean >= a.mean);
    assert!((b.mean - a.mean) / b.mean < 5e-3, "{a:?} {b:?}");
}

#[test]
fn intensity_does_not_change_the_isr() {
    // one tier at any density has the same ISR law; the sampler only rescales distances
    let s = Scenario::new(alpha(4.0)).with_realizations(4000).with_seed(11);
    let dense = s.clone().with_deployment(DeploymentKind::Hip(vec![TierSpec::new(7.0, 1.0).unwrap()]));
    let a = Engine::sequential().isr_samples(&s).unwrap();
    let b = Engine::sequential().isr_samples(&dense).unwrap();
    let (ma, mb) = (a.mean_of(|x| x).unwrap(), b.mean_of(|x| x).unwrap());
    assert!((ma.mean - mb.mean).abs() < 4.0 * (ma.stderr.powi(2) + mb.stderr.powi(2)).sqrt());
}
