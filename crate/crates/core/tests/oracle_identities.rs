use quasiprob_core::numeric::GaussLegendre;
use quasiprob_core::oracles::{
    cahill_glauber_closed_form, filter_fourier_transform, oracle_estimate_expectation, oracle_quasiprob,
    quadrature_cosine_transform, quadrature_pdf, CharacteristicFunction,
};
use quasiprob_core::special::laguerre;
use quasiprob_core::{Filter, FilterSpec, FockMixture};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn random_mixture(rng: &mut ChaCha8Rng) -> FockMixture {
    if rng.random_bool(0.5) {
        FockMixture::from_loss(rng.random_range(1..=3), rng.random_range(0.05..0.95)).unwrap()
    } else {
        let k = rng.random_range(1..=4);
        let raw: Vec<f64> = (0..=k).map(|_| rng.random_range(0.0..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let mut w: Vec<f64> = raw.iter().map(|v| v / s).collect();
        let rest: f64 = w[1..].iter().sum();
        w[0] = 1.0 - rest;
        FockMixture::new(w).unwrap()
    }
}

fn random_filter(rng: &mut ChaCha8Rng) -> FilterSpec {
    match rng.random_range(0..3) {
        0 => FilterSpec::Gaussian { s: rng.random_range(-1.5..-0.1) },
        1 => FilterSpec::InfinityQ { w: rng.random_range(1.0..2.6) },
        _ => FilterSpec::FiniteQ { q: rng.random_range(3.0..6.0), w: rng.random_range(1.0..2.0) },
    }
}

#[test]
fn pattern_and_characteristic_paths_agree_on_random_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mix = random_mixture(&mut rng);
        let spec = random_filter(&mut rng);
        let r = rng.random_range(0.0..3.0);
        let f = Filter::new(spec).unwrap();
        let a = oracle_estimate_expectation(&mix, &f, r).unwrap();
        let b = oracle_quasiprob(&mix, &f, r).unwrap();
        assert!((a - b).abs() < 1e-6, "{spec} r={r} p={:?}: {a} vs {b}", mix.weights());
        worst = worst.max((a - b).abs());
    }
    println!("worst dual-path difference {worst:.2e}");
}

#[test]
fn closed_form_matches_radial_transform() {
    let mix = FockMixture::from_loss(2, 0.45).unwrap();
    for s in [-0.04, -0.5, -1.0] {
        let f = Filter::new(FilterSpec::Gaussian { s }).unwrap();
        for i in 0..=12 {
            let r = 0.25 * i as f64;
            let a = cahill_glauber_closed_form(&mix, s, r).unwrap();
            let b = oracle_quasiprob(&mix, &f, r).unwrap();
            assert!((a - b).abs() < 1e-6, "s={s} r={r}: {a} vs {b}");
        }
    }
}

#[test]
fn gaussian_oracle_reference_values() {
    let f = Filter::new(FilterSpec::Gaussian { s: -0.04 }).unwrap();
    let m = FockMixture::new(vec![0.4, 0.6]).unwrap();
    let a = oracle_quasiprob(&m, &f, 0.0).unwrap();
    let b = cahill_glauber_closed_form(&m, -0.04, 0.0).unwrap();
    assert!((a - b).abs() < 1e-6 && (a + 0.0942).abs() < 5e-5);
    let m = FockMixture::new(vec![0.6, 0.4]).unwrap();
    let a = oracle_quasiprob(&m, &f, 0.0).unwrap();
    let b = cahill_glauber_closed_form(&m, -0.04, 0.0).unwrap();
    assert!((a - b).abs() < 1e-6 && (a - 0.1413).abs() < 5e-5);

    let husimi = Filter::new(FilterSpec::Gaussian { s: -1.0 }).unwrap();
    let v = oracle_estimate_expectation(&FockMixture::vacuum(), &husimi, 0.0).unwrap();
    assert!((v - 1.0 / PI).abs() < 1e-6);
}

#[test]
fn dual_paths_at_fixed_points() {
    let f = Filter::new(FilterSpec::InfinityQ { w: 1.65 }).unwrap();
    let m = FockMixture::new(vec![0.7, 0.3]).unwrap();
    let a = oracle_estimate_expectation(&m, &f, 0.0).unwrap();
    let b = oracle_quasiprob(&m, &f, 0.0).unwrap();
    assert!((a - b).abs() < 1e-6);

    for spec in [FilterSpec::Gaussian { s: -0.3 }, FilterSpec::InfinityQ { w: 1.2 }, FilterSpec::FiniteQ { q: 4.0, w: 1.4 }] {
        let f = Filter::new(spec).unwrap();
        let m = FockMixture::from_loss(1, 0.3).unwrap();
        let a = oracle_estimate_expectation(&m, &f, 3.5).unwrap();
        let b = oracle_quasiprob(&m, &f, 3.5).unwrap();
        assert!((a - b).abs() < 1e-6, "{spec}");
        assert!(a.abs() < 0.01, "{spec}: tail {a}");
    }
}

#[test]
fn vacuum_expectation_is_the_s_parametrized_vacuum() {
    for s in [-0.2, -0.7, -1.3] {
        let f = Filter::new(FilterSpec::Gaussian { s }).unwrap();
        for r in [0.0, 0.6, 1.7] {
            let got = oracle_estimate_expectation(&FockMixture::vacuum(), &f, r).unwrap();
            let want = 2.0 / (PI * (1.0 - s)) * (-2.0 * r * r / (1.0 - s)).exp();
            assert!((got - want).abs() < 1e-6, "s={s} r={r}");
        }
    }
}

#[test]
fn characteristic_function_of_lossy_fock_states() {
    for n in 0..5 {
        for eta in [0.1, 0.37, 0.9] {
            let mix = FockMixture::from_loss(n, eta).unwrap();
            let phi = CharacteristicFunction::new(&mix);
            for i in 0..20 {
                let b = 0.15 * i as f64;
                assert!((phi.eval(b) - laguerre(n, eta * b * b)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn cosine_transform_fixes_the_characteristic_convention() {
    let mix = FockMixture::new(vec![0.2, 0.3, 0.1, 0.4]).unwrap();
    let phi = CharacteristicFunction::new(&mix);
    for b in [0.3, 1.1, 2.0, 2.9] {
        let lhs = quadrature_cosine_transform(&mix, b).unwrap();
        assert!((lhs - phi.eval(b) * (-0.5 * b * b).exp()).abs() < 1e-9);
    }
}

#[test]
fn quadrature_densities() {
    assert!((quadrature_pdf(&FockMixture::vacuum(), 0.0) - 0.3989422804014327).abs() < 1e-15);
    assert_eq!(quadrature_pdf(&FockMixture::fock(1), 0.0), 0.0);
    let rule = GaussLegendre::new(10);
    for (n, eta) in [(1, 0.4), (2, 0.31), (3, 0.8)] {
        let mix = FockMixture::from_loss(n, eta).unwrap();
        let var = rule.composite(-14.0, 14.0, 400, |x| x * x * quadrature_pdf(&mix, x));
        assert!((var - (2.0 * n as f64 * eta + 1.0)).abs() < 1e-8);
    }
}

#[test]
fn filters_have_nonnegative_fourier_transforms() {
    for spec in [FilterSpec::Gaussian { s: -0.5 }, FilterSpec::InfinityQ { w: 1.5 }, FilterSpec::FiniteQ { q: 4.0, w: 1.2 }] {
        let f = Filter::new(spec).unwrap();
        for i in 0..=60 {
            let r = 0.1 * i as f64;
            let v = filter_fourier_transform(&f, r).unwrap();
            assert!(v >= -1e-6, "{spec} r={r}: {v}");
        }
    }
}
