use num_complex::Complex64;
use quasiprob_core::data::{sample_coherent, sample_fock_mixture};
use quasiprob_core::estimator::{
    default_alpha_grid, estimate_phase_averaged, estimate_phase_sensitive, normalization_check, normalization_integral, significance,
    RadialAccumulator,
};
use quasiprob_core::oracles::{cahill_glauber_closed_form, oracle_quasiprob, truncated_mass};
use quasiprob_core::pattern::build_pattern_table;
use quasiprob_core::{Error, Filter, FilterSpec, FockMixture, PatternTable, PatternTableOptions, PhaseMode, QuadratureDataset};
use std::f64::consts::PI;

fn table(spec: FilterSpec, grid: &[f64], x: f64) -> PatternTable {
    build_pattern_table(&Filter::new(spec).unwrap(), (-x, x), grid, &PatternTableOptions::default()).unwrap()
}

#[test]
fn vacuum_shows_no_significant_negativity() {
    let d = sample_fock_mixture(&FockMixture::vacuum(), 100_000, 101).unwrap();
    let t = table(FilterSpec::InfinityQ { w: 1.5 }, &default_alpha_grid(), 7.0);
    let est = estimate_phase_averaged(&d, &t).unwrap();
    let s = significance(&est).unwrap();
    assert!(s.sigma > -3.0, "Σ = {}", s.sigma);
}

#[test]
fn single_photon_values_at_the_origin_match_the_closed_form() {
    let grid = [0.0, 0.5, 1.0];
    let t = table(FilterSpec::Gaussian { s: -0.04 }, &grid, 8.0);
    for (eta, seed) in [(0.6, 102), (0.4, 103)] {
        let mix = FockMixture::from_loss(1, eta).unwrap();
        let d = sample_fock_mixture(&mix, 800_000, seed).unwrap();
        let est = estimate_phase_averaged(&d, &t).unwrap();
        for (k, &r) in grid.iter().enumerate() {
            let want = cahill_glauber_closed_form(&mix, -0.04, r).unwrap();
            assert!((est.values[k] - want).abs() < 5.0 * est.stderr[k], "η={eta} r={r}: {} ± {} vs {want}", est.values[k], est.stderr[k]);
        }
    }
}

#[test]
fn estimates_are_unbiased_over_replicas() {
    let mix = FockMixture::from_loss(1, 0.3).unwrap();
    let grid = [0.0, 0.4, 0.8, 1.2, 2.0];
    for spec in [FilterSpec::Gaussian { s: -0.04 }, FilterSpec::InfinityQ { w: 1.65 }] {
        let f = Filter::new(spec).unwrap();
        let t = build_pattern_table(&f, (-8.0, 8.0), &grid, &PatternTableOptions::default()).unwrap();
        let reps = 50;
        let mut sums = vec![0.0; grid.len()];
        let mut se = vec![0.0; grid.len()];
        for rep in 0..reps {
            let d = sample_fock_mixture(&mix, 10_000, 1000 + rep).unwrap();
            let est = estimate_phase_averaged(&d, &t).unwrap();
            for k in 0..grid.len() {
                sums[k] += est.values[k];
                se[k] += est.stderr[k];
            }
        }
        for (k, &r) in grid.iter().enumerate() {
            let mean = sums[k] / reps as f64;
            let sigma = se[k] / reps as f64;
            let want = oracle_quasiprob(&mix, &f, r).unwrap();
            let tol = 5.0 * sigma / (reps as f64).sqrt();
            assert!((mean - want).abs() < tol, "{spec} r={r}: {mean} vs {want} (tol {tol})");
        }
    }
}

#[test]
fn standard_errors_shrink_as_one_over_root_n() {
    let mix = FockMixture::from_loss(1, 0.3).unwrap();
    let t = table(FilterSpec::InfinityQ { w: 1.65 }, &[0.0, 0.5, 1.0], 8.0);
    let d = sample_fock_mixture(&mix, 400_000, 104).unwrap();
    let small = estimate_phase_averaged(&d.prefix(100_000).unwrap(), &t).unwrap();
    let large = estimate_phase_averaged(&d, &t).unwrap();
    for k in 0..3 {
        let ratio = large.stderr[k] / small.stderr[k];
        assert!((0.48..=0.52).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn partitioned_accumulation_is_bit_identical() {
    let mix = FockMixture::from_loss(2, 0.5).unwrap();
    let t = table(FilterSpec::FiniteQ { q: 4.0, w: 1.3 }, &[0.0, 0.3, 0.9, 2.0], 9.0);
    let d = sample_fock_mixture(&mix, 30_001, 105).unwrap();
    let whole = estimate_phase_averaged(&d, &t).unwrap();
    for parts in [2usize, 3, 7, 64] {
        let chunk = d.len().div_ceil(parts);
        let mut accs: Vec<RadialAccumulator> = d
            .samples()
            .chunks(chunk)
            .map(|xs| {
                let mut a = RadialAccumulator::new(&t);
                a.add_samples(xs).unwrap();
                a
            })
            .collect();
        // merge back to front to change the tree shape as well
        let mut total = accs.pop().unwrap();
        while let Some(a) = accs.pop() {
            total.merge(&a);
        }
        let merged = total.finish().unwrap();
        for k in 0..whole.values.len() {
            assert_eq!(whole.values[k].to_bits(), merged.values[k].to_bits());
            assert_eq!(whole.stderr[k].to_bits(), merged.stderr[k].to_bits());
        }
    }
}

#[test]
fn coherent_state_peaks_at_its_amplitude() {
    let s = -0.5;
    let alpha0 = Complex64::new(1.0, 0.0);
    let d = sample_coherent(alpha0, 100_000, PhaseMode::UniformRandom, 106).unwrap();
    let grid: Vec<Complex64> = (-4..=4)
        .flat_map(|i| (-4..=4).map(move |j| Complex64::new(1.0 + 0.25 * j as f64, 0.25 * i as f64)))
        .collect();
    let f = Filter::new(FilterSpec::Gaussian { s }).unwrap();
    let est = estimate_phase_sensitive(&d, &f, &grid).unwrap();
    let peak = (0..grid.len()).max_by(|&a, &b| est.values[a].total_cmp(&est.values[b])).unwrap();
    assert_eq!(grid[peak], alpha0);
    for (k, a) in grid.iter().enumerate() {
        let want = 2.0 / (PI * (1.0 - s)) * (-2.0 * (a - alpha0).norm_sqr() / (1.0 - s)).exp();
        assert!((est.values[k] - want).abs() < 5.0 * est.stderr[k], "α={a}");
    }
}

#[test]
fn attached_phases_reproduce_the_phase_averaged_estimate() {
    let mix = FockMixture::from_loss(1, 0.6).unwrap();
    let d = sample_fock_mixture(&mix, 100_000, 107).unwrap();
    let radii = [0.0, 0.3, 0.6, 1.0, 1.5];
    let spec = FilterSpec::InfinityQ { w: 1.4 };
    let t = table(spec, &radii, 8.0);
    let avg = estimate_phase_averaged(&d, &t).unwrap();
    let phased = d.with_uniform_phases(7);
    let points: Vec<Complex64> = radii.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    let sens = estimate_phase_sensitive(&phased, &Filter::new(spec).unwrap(), &points).unwrap();
    for k in 0..radii.len() {
        let combined = (avg.stderr[k].powi(2) + sens.stderr[k].powi(2)).sqrt();
        assert!((avg.values[k] - sens.values[k]).abs() < 5.0 * combined, "r={}", radii[k]);
    }
}

#[test]
fn estimator_preconditions() {
    let f = Filter::new(FilterSpec::Gaussian { s: -0.5 }).unwrap();
    let one = QuadratureDataset::with_phases(vec![0.1], vec![0.2], "t").unwrap();
    assert!(matches!(
        estimate_phase_sensitive(&one, &f, &[Complex64::new(0.0, 0.0)]),
        Err(Error::TooFewSamples { .. })
    ));
    let plain = QuadratureDataset::new(vec![0.1, 0.3], "t").unwrap();
    assert!(matches!(estimate_phase_sensitive(&plain, &f, &[Complex64::new(0.0, 0.0)]), Err(Error::MissingPhases)));
    let t = table(FilterSpec::Gaussian { s: -0.5 }, &[0.0], 1.0);
    let wide = QuadratureDataset::new(vec![0.1, 3.0], "t").unwrap();
    assert!(matches!(estimate_phase_averaged(&wide, &t), Err(Error::OutOfTableRange { .. })));
    assert!(matches!(estimate_phase_averaged(&one, &t), Err(Error::UnexpectedPhases)));
}

#[test]
fn normalization_with_gaussian_and_finite_q_filters() {
    let mix = FockMixture::from_loss(1, 0.3).unwrap();
    let d = sample_fock_mixture(&mix, 100_000, 108).unwrap();
    for spec in [FilterSpec::Gaussian { s: -0.04 }, FilterSpec::FiniteQ { q: 4.0, w: 1.5 }] {
        let t = table(spec, &default_alpha_grid(), 8.0);
        let est = estimate_phase_averaged(&d, &t).unwrap();
        let n = normalization_check(&est).unwrap();
        assert!((n - 1.0).abs() < 0.05, "{spec}: {n}");
    }
}

#[test]
fn infinity_q_normalization_tracks_the_truncated_mass() {
    // the q → ∞ quasiprobability has an r⁻³ tail, so a finite disk holds
    // visibly less than unit mass; compare against the exact disk mass
    let f = Filter::new(FilterSpec::InfinityQ { w: 1.5 }).unwrap();
    let d = sample_fock_mixture(&FockMixture::vacuum(), 100_000, 109).unwrap();
    let grid: Vec<f64> = (0..=80).map(|i| i as f64 * 0.05).collect();
    let t = build_pattern_table(&f, (-7.0, 7.0), &grid, &PatternTableOptions::default()).unwrap();
    let est = estimate_phase_averaged(&d, &t).unwrap();
    assert!(matches!(normalization_check(&est), Err(Error::TailSignificant { .. })));
    let n = normalization_integral(&est).unwrap();
    let mass = truncated_mass(&FockMixture::vacuum(), &f, 4.0).unwrap();
    assert!((n - mass).abs() < 0.05, "{n} vs disk mass {mass}");
    assert!(mass < 0.96);
}

#[test]
fn short_grids_are_rejected() {
    let mix = FockMixture::from_loss(1, 0.3).unwrap();
    let d = sample_fock_mixture(&mix, 100_000, 110).unwrap();
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.05).collect();
    let t = table(FilterSpec::InfinityQ { w: 1.5 }, &grid, 8.0);
    let est = estimate_phase_averaged(&d, &t).unwrap();
    assert!(matches!(normalization_check(&est), Err(Error::TailSignificant { .. })));
}

#[test]
fn imaginary_amplitude_is_not_conjugated() {
    let alpha0 = Complex64::new(0.0, 1.0);
    let d = sample_coherent(alpha0, 50_000, PhaseMode::UniformRandom, 111).unwrap();
    let f = Filter::new(FilterSpec::Gaussian { s: -0.5 }).unwrap();
    let est = estimate_phase_sensitive(&d, &f, &[alpha0, alpha0.conj()]).unwrap();
    let peak = 2.0 / (PI * 1.5);
    assert!((est.values[0] - peak).abs() < 5.0 * est.stderr[0]);
    assert!(est.values[1] < 0.1 * peak);
}
