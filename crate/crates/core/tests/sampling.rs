use num_complex::Complex64;
use quasiprob_core::data::{sample_coherent, sample_fock_mixture, sample_variance};
use quasiprob_core::diagnostics::quadrature_variance;
use quasiprob_core::numeric::GaussLegendre;
use quasiprob_core::oracles::quadrature_pdf;
use quasiprob_core::{Error, FockMixture, PhaseMode, QuadratureDataset};

fn analytic_cdf(mix: &FockMixture, x: f64) -> f64 {
    let rule = GaussLegendre::new(12);
    let panels = ((x + 14.0) * 4.0).ceil().max(1.0) as usize;
    rule.composite(-14.0, x, panels, |t| quadrature_pdf(mix, t))
}

#[test]
fn empirical_cdf_converges_to_the_analytic_one() {
    for (mix, seed) in [
        (FockMixture::vacuum(), 1),
        (FockMixture::from_loss(1, 0.6).unwrap(), 2),
        (FockMixture::from_loss(3, 0.8).unwrap(), 3),
    ] {
        let n = 20_000;
        let d = sample_fock_mixture(&mix, n, seed).unwrap();
        let mut xs = d.samples().to_vec();
        xs.sort_by(f64::total_cmp);
        let mut ks: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let c = analytic_cdf(&mix, x);
            ks = ks.max((c - i as f64 / n as f64).abs()).max((c - (i + 1) as f64 / n as f64).abs());
        }
        assert!(ks < 5.0 / (n as f64).sqrt(), "KS distance {ks} for {:?}", mix.weights());
    }
}

#[test]
fn lossy_fock_variances_follow_2n_eta_plus_1() {
    for (n, eta, seed) in [(0, 1.0, 4), (1, 1.0, 5), (2, 0.5, 6), (1, 0.4, 7), (3, 0.25, 8)] {
        let d = sample_fock_mixture(&FockMixture::from_loss(n, eta).unwrap(), 200_000, seed).unwrap();
        let v = quadrature_variance(&d).unwrap();
        let want = 2.0 * n as f64 * eta + 1.0;
        assert!((v.var - want).abs() < 5.0 * v.stderr, "n={n} η={eta}: {} ± {}", v.var, v.stderr);
    }
}

#[test]
fn samplers_are_deterministic() {
    let mix = FockMixture::from_loss(2, 0.3).unwrap();
    assert_eq!(sample_fock_mixture(&mix, 1000, 42).unwrap(), sample_fock_mixture(&mix, 1000, 42).unwrap());
    assert_ne!(sample_fock_mixture(&mix, 1000, 42).unwrap(), sample_fock_mixture(&mix, 1000, 43).unwrap());
    let a = Complex64::new(0.3, 0.9);
    assert_eq!(
        sample_coherent(a, 500, PhaseMode::UniformRandom, 1).unwrap(),
        sample_coherent(a, 500, PhaseMode::UniformRandom, 1).unwrap()
    );
    assert!(matches!(sample_fock_mixture(&mix, 0, 1), Err(Error::EmptyDataset)));
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[test]
fn coherent_samples_have_the_displaced_mean() {
    let n = 40_000;
    let d = sample_coherent(Complex64::new(0.0, 0.0), n, PhaseMode::UniformRandom, 3).unwrap();
    let v = quadrature_variance(&d).unwrap();
    assert!((v.var - 1.0).abs() < 5.0 * v.stderr);
    assert!(d.phases().unwrap().iter().all(|p| (0.0..std::f64::consts::TAU).contains(p)));

    // grid phases, keeping samples within 0.01 of φ = 0 or φ = π/2
    let m = 4;
    for (amp, slice) in [(Complex64::new(1.0, 0.0), 0usize), (Complex64::new(0.0, 1.0), 1)] {
        let d = sample_coherent(amp, n * m, PhaseMode::Grid, 9).unwrap();
        let phases = d.phases().unwrap();
        let at: Vec<f64> = d
            .samples()
            .iter()
            .zip(phases)
            .filter(|(_, &p)| (p - slice as f64 * std::f64::consts::FRAC_PI_2).abs() < 1e-2)
            .map(|(x, _)| *x)
            .collect();
        assert!(at.len() > 100);
        let se = (sample_variance(&at) / at.len() as f64).sqrt();
        assert!((mean(&at) - 2.0).abs() < 5.0 * se, "{amp}: mean {}", mean(&at));
    }
}

#[test]
fn vacuum_normalization() {
    let vac = QuadratureDataset::new(vec![2.0, -2.0, 2.0, -2.0, 0.0], "v").unwrap();
    let var = sample_variance(vac.samples());
    let d = QuadratureDataset::new(vec![var.sqrt()], "d").unwrap();
    let n = d.normalize_to_vacuum(&vac).unwrap();
    assert!((n.samples()[0] - 1.0).abs() < 1e-15);
    assert!(n.is_normalized());
    let rescaled = vac.normalize_to_vacuum(&vac).unwrap();
    assert!((sample_variance(rescaled.samples()) - 1.0).abs() < 1e-12);
    let flat = QuadratureDataset::new(vec![0.7; 3], "c").unwrap();
    assert!(matches!(d.normalize_to_vacuum(&flat), Err(Error::DegenerateVacuum(_))));
}
