use num_complex::Complex64;
use quasiprob_core::numeric::GaussLegendre;
use quasiprob_core::pattern::{build_pattern_table, pattern_phase_averaged, pattern_phase_sensitive};
use quasiprob_core::{Error, Filter, FilterSpec, PatternTableOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn filters() -> Vec<Filter> {
    [
        FilterSpec::Gaussian { s: -0.04 },
        FilterSpec::Gaussian { s: -0.8 },
        FilterSpec::InfinityQ { w: 1.65 },
        FilterSpec::InfinityQ { w: 2.5 },
        FilterSpec::FiniteQ { q: 4.0, w: 1.5 },
    ]
    .into_iter()
    .map(|s| Filter::new(s).unwrap())
    .collect()
}

#[test]
fn tables_match_direct_evaluation_at_1000_random_points() {
    let grid: Vec<f64> = (0..=14).map(|i| 0.25 * i as f64).collect();
    for f in filters() {
        let opts = PatternTableOptions { validation_points: 1000, seed: 11, ..Default::default() };
        let t = build_pattern_table(&f, (-6.0, 7.0), &grid, &opts).unwrap();
        assert!(t.validation_error() < 1e-6, "{}: {}", f.spec(), t.validation_error());
        assert!(t.x_step() <= 0.01);
    }
}

#[test]
fn phase_average_matches_for_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let fs = filters();
    for _ in 0..20 {
        let f = &fs[rng.random_range(0..fs.len())];
        let x = rng.random_range(-4.0..4.0);
        let r = rng.random_range(0.0..2.5);
        let m = 512;
        let avg = (0..m)
            .map(|j| pattern_phase_sensitive(f, x, 2.0 * PI * j as f64 / m as f64, Complex64::new(r, 0.0)).unwrap())
            .sum::<f64>()
            / m as f64;
        let direct = pattern_phase_averaged(f, x, r).unwrap();
        // an M-point trapezoid in φ is exact up to Bessel orders ≥ M, far beyond 2r b_max here
        assert!((avg - direct).abs() < 1e-8, "{} x={x} r={r}: {avg} vs {direct}", f.spec());
    }
}

#[test]
fn phase_average_at_a_fixed_point() {
    let f = Filter::new(FilterSpec::Gaussian { s: -0.5 }).unwrap();
    let m = 512;
    let avg = (0..m)
        .map(|j| pattern_phase_sensitive(&f, 1.3, 2.0 * PI * j as f64 / m as f64, Complex64::new(0.7, 0.0)).unwrap())
        .sum::<f64>()
        / m as f64;
    assert!((avg - pattern_phase_averaged(&f, 1.3, 0.7).unwrap()).abs() < 1e-8);
}

#[test]
fn pattern_functions_are_even_and_reduce_at_zero_radius() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for f in filters() {
        for _ in 0..5 {
            let x = rng.random_range(0.0..5.0);
            let r = rng.random_range(0.0..3.0);
            assert_eq!(pattern_phase_averaged(&f, x, r).unwrap(), pattern_phase_averaged(&f, -x, r).unwrap());
            assert_eq!(
                pattern_phase_averaged(&f, x, 0.0).unwrap(),
                pattern_phase_sensitive(&f, x, 0.0, Complex64::new(0.0, 0.0)).unwrap()
            );
        }
    }
}

/// `(2/π) ∫ b e^{b²/2} Ω(b) db` by brute force in `b`.
fn triangle_bound(spec: FilterSpec, b_max: f64) -> f64 {
    let f = Filter::new(spec).unwrap();
    let rule = GaussLegendre::new(20);
    2.0 / PI * rule.composite(0.0, b_max, 4000, |b| b * (0.5 * b * b).exp() * f.eval(b).unwrap())
}

#[test]
fn tables_respect_the_triangle_bound() {
    let grid = [0.0, 0.5, 1.5, 3.0];
    for (spec, b_max) in [(FilterSpec::Gaussian { s: -0.8 }, 30.0), (FilterSpec::InfinityQ { w: 1.65 }, 3.3)] {
        let bound = triangle_bound(spec, b_max);
        let t = build_pattern_table(&Filter::new(spec).unwrap(), (-5.0, 5.0), &grid, &PatternTableOptions::default()).unwrap();
        for i in 0..t.nodes() {
            for k in 0..grid.len() {
                let v = t.node_value(i, k);
                assert!(v.is_finite() && v.abs() <= bound * (1.0 + 1e-9), "{spec}: {v} > {bound}");
            }
        }
    }
}

#[test]
fn gaussian_table_on_a_vacuum_range_peaks_at_the_origin() {
    let f = Filter::new(FilterSpec::Gaussian { s: -0.04 }).unwrap();
    let t = build_pattern_table(&f, (-6.0, 6.0), &[0.0], &PatternTableOptions::default()).unwrap();
    let peak = pattern_phase_averaged(&f, 0.0, 0.0).unwrap();
    assert!((peak - 2.0 / PI / 0.04).abs() < 1e-9);
    for i in 0..t.nodes() {
        assert!(t.node_value(i, 0).abs() <= peak + 1e-9);
    }
    assert_eq!(t.eval(0.0, 0).unwrap(), t.node_value(0, 0));
}

#[test]
fn doubling_the_gaussian_cutoff_changes_nothing() {
    // independent quadrature to twice the truncation point
    let rule = GaussLegendre::new(10);
    for s in [-0.04, -0.5, -1.0] {
        let b_max = (-2.0 * 1e-14f64.ln() / -s).sqrt();
        for (x, r) in [(0.0, 0.0), (1.7, 0.4), (-3.1, 2.2)] {
            let panels = (2.0 * b_max * (f64::abs(x) + 2.0 * r + 1.0)) as usize * 4 + 64;
            let long = 2.0 / PI
                * rule.composite(0.0, 2.0 * b_max, panels, |b| {
                    b * (0.5 * s * b * b).exp() * libm::j0(2.0 * r * b) * (x * b).cos()
                });
            let f = Filter::new(FilterSpec::Gaussian { s }).unwrap();
            let v = pattern_phase_averaged(&f, x, r).unwrap();
            assert!((v - long).abs() < 1e-9, "s={s} x={x} r={r}: {v} vs {long}");
        }
    }
}

#[test]
fn infinity_q_origin_value_at_two_orders() {
    let f = Filter::new(FilterSpec::InfinityQ { w: 1.5 }).unwrap();
    let v = pattern_phase_averaged(&f, 0.0, 0.0).unwrap();
    assert!(v > 0.0 && v.is_finite());
    for (order, panels) in [(10, 400), (16, 800)] {
        let rule = GaussLegendre::new(order);
        let direct = 2.0 / PI * rule.composite(0.0, 3.0, panels, |b| b * (0.5 * b * b).exp() * f.eval(b).unwrap());
        assert!((v - direct).abs() < 1e-7, "{v} vs {direct}");
    }
}

#[test]
fn invalid_requests() {
    let g = Filter::new(FilterSpec::Gaussian { s: 0.2 }).unwrap();
    assert!(matches!(pattern_phase_averaged(&g, 0.0, 0.0), Err(Error::NonIntegrable(_))));
    let f = Filter::new(FilterSpec::InfinityQ { w: 1.5 }).unwrap();
    let t = build_pattern_table(&f, (-2.0, 2.0), &[0.0, 1.0], &PatternTableOptions::default()).unwrap();
    assert!(matches!(t.eval(2.1, 0), Err(Error::OutOfTableRange { .. })));
    let big = Filter::new(FilterSpec::InfinityQ { w: 40.0 }).unwrap();
    assert!(matches!(pattern_phase_averaged(&big, 0.0, 0.0), Err(Error::Overflow { .. })));
}
