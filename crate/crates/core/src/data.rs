//! Quadrature datasets, lossy Fock mixtures and synthetic data.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{cos, sqrt, TAU};
use crate::numeric::GaussLegendre;
use crate::rng::{self, Stream};
use crate::special::{normal_pdf, scaled_hermite};

/// Quadrature samples `x_j`, optionally tagged with phases `φ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureDataset {
    samples: Vec<f64>,
    phases: Option<Vec<f64>>,
    normalized: bool,
    source: String,
}

impl QuadratureDataset {
    /// Phase-free dataset. Samples must be finite and non-empty.
    pub fn new(samples: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        check_samples(&samples)?;
        Ok(Self { samples, phases: None, normalized: false, source: source.into() })
    }

    /// Phase-tagged dataset; every phase must lie in `[0, 2π)`.
    pub fn with_phases(samples: Vec<f64>, phases: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        check_samples(&samples)?;
        check_phases(samples.len(), &phases)?;
        Ok(Self { samples, phases: Some(phases), normalized: false, source: source.into() })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn phases(&self) -> Option<&[f64]> {
        self.phases.as_deref()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn set_normalized(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }

    /// Same samples with the phases dropped.
    pub fn without_phases(&self) -> Self {
        Self { phases: None, ..self.clone() }
    }

    /// Attaches independent uniform phases to every sample.
    ///
    /// Only meaningful for phase-invariant states.
    pub fn with_uniform_phases(&self, seed: u64) -> Self {
        let mut r = rng::stream(seed, Stream::AttachedPhases);
        let phases = (0..self.len()).map(|_| uniform_phase(&mut r)).collect();
        Self { phases: Some(phases), ..self.clone() }
    }

    /// First `n` samples (and phases).
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let n = n.min(self.len());
        Ok(Self {
            samples: self.samples[..n].to_vec(),
            phases: self.phases.as_ref().map(|p| p[..n].to_vec()),
            normalized: self.normalized,
            source: self.source.clone(),
        })
    }

    /// `(min, max)` of the samples.
    pub fn range(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    }

    /// Rescales the samples so that the vacuum reference has unit variance.
    pub fn normalize_to_vacuum(&self, vacuum: &QuadratureDataset) -> Result<Self> {
        if vacuum.len() < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: vacuum.len() });
        }
        let var = sample_variance(vacuum.samples());
        // constant samples leave only rounding noise in the variance
        let scale = vacuum.samples().iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        let noise = 64.0 * f64::EPSILON * scale;
        if !(var > noise * noise && var.is_finite()) {
            return Err(Error::DegenerateVacuum(var));
        }
        let scale = 1.0 / sqrt(var);
        Ok(Self {
            samples: self.samples.iter().map(|x| x * scale).collect(),
            phases: self.phases.clone(),
            normalized: true,
            source: self.source.clone(),
        })
    }
}

fn check_samples(samples: &[f64]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteSample { index });
    }
    Ok(())
}

fn check_phases(n: usize, phases: &[f64]) -> Result<()> {
    if phases.len() != n {
        return Err(Error::PhaseLengthMismatch { samples: n, phases: phases.len() });
    }
    if let Some(index) = phases.iter().position(|p| !(0.0..TAU).contains(p)) {
        return Err(Error::PhaseOutOfRange { index, value: phases[index] });
    }
    Ok(())
}

/// Unbiased sample variance (two-pass).
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

fn uniform_phase(r: &mut rand_chacha::ChaCha20Rng) -> f64 {
    let p = rng::uniform(r) * TAU;
    if p >= TAU {
        0.0
    } else {
        p
    }
}

/// Diagonal state `Σ_k p_k |k⟩⟨k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMixture {
    weights: Vec<f64>,
}

impl FockMixture {
    /// Weights must be non-negative and sum to one within `1e-12`.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("no weights".to_string()));
        }
        if weights.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidWeights("weights must be finite and non-negative".to_string()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    pub fn vacuum() -> Self {
        Self { weights: alloc::vec![1.0] }
    }

    /// Pure Fock state `|n⟩`.
    pub fn fock(n: usize) -> Self {
        let mut weights = alloc::vec![0.0; n + 1];
        weights[n] = 1.0;
        Self { weights }
    }

    /// `|n⟩` after loss with efficiency `eta`: binomial weights
    /// `C(n,k) η^k (1-η)^(n-k)`.
    pub fn from_loss(n: usize, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidEfficiency(eta));
        }
        let mut weights = Vec::with_capacity(n + 1);
        let mut binom = 1.0;
        for k in 0..=n {
            if k > 0 {
                binom = binom * (n + 1 - k) as f64 / k as f64;
            }
            weights.push(binom * libm::pow(eta, k as f64) * libm::pow(1.0 - eta, (n - k) as f64));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn max_photon(&self) -> usize {
        self.weights.len() - 1
    }

    /// Analytic quadrature variance `Σ_k p_k (2k + 1)`.
    pub fn quadrature_variance(&self) -> f64 {
        self.weights.iter().enumerate().map(|(k, p)| p * (2 * k + 1) as f64).sum()
    }

    /// Quadrature density `Σ_k p_k |ψ_k(x)|²`.
    pub fn density(&self, x: f64) -> f64 {
        let mut h = alloc::vec![0.0; self.weights.len()];
        scaled_hermite(x, &mut h);
        normal_pdf(x) * self.weights.iter().zip(&h).map(|(p, hk)| p * hk * hk).sum::<f64>()
    }
}

const CDF_LO: f64 = -12.0;
const CDF_HI: f64 = 12.0;
const CDF_STEP: f64 = 1e-3;

/// Inverse-CDF sampler for the quadrature distribution of a Fock mixture,
/// tabulated on `[-12, 12]` with step `1e-3` and linear interpolation.
#[derive(Debug, Clone)]
pub struct FockSampler {
    cdf: Vec<f64>,
}

impl FockSampler {
    pub fn new(mix: &FockMixture) -> Self {
        let nodes = libm::round((CDF_HI - CDF_LO) / CDF_STEP) as usize;
        let rule = GaussLegendre::new(6);
        let mut cdf = Vec::with_capacity(nodes + 1);
        let mut acc = 0.0;
        cdf.push(0.0);
        for i in 0..nodes {
            let a = CDF_LO + i as f64 * CDF_STEP;
            acc += rule.composite(a, a + CDF_STEP, 1, |x| mix.density(x));
            cdf.push(acc);
        }
        let total = acc;
        for c in cdf.iter_mut() {
            *c /= total;
        }
        Self { cdf }
    }

    /// Quantile for `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1) - 1;
        let (c0, c1) = (self.cdf[i], self.cdf[i + 1]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        CDF_LO + (i as f64 + t.clamp(0.0, 1.0)) * CDF_STEP
    }
}

/// `n` i.i.d. quadratures of a Fock mixture, deterministic in `seed`.
pub fn sample_fock_mixture(mix: &FockMixture, n: usize, seed: u64) -> Result<QuadratureDataset> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let sampler = FockSampler::new(mix);
    let mut r = rng::stream(seed, Stream::FockQuadratures);
    let samples = (0..n).map(|_| sampler.quantile(rng::uniform(&mut r))).collect();
    let source = format!("fock-mixture weights={:?} n={n} seed={seed}", mix.weights());
    Ok(QuadratureDataset { samples, phases: None, normalized: true, source })
}

/// How phases are assigned to coherent-state samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMode {
    UniformRandom,
    /// `φ_j = 2π j / N`.
    Grid,
}

/// Phase-tagged quadratures of the coherent state `|α₀⟩`:
/// `x_j ~ N(2|α₀| cos(arg α₀ - φ_j), 1)`.
pub fn sample_coherent(amplitude: Complex64, n: usize, mode: PhaseMode, seed: u64) -> Result<QuadratureDataset> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let vacuum = FockSampler::new(&FockMixture::vacuum());
    let mut noise = rng::stream(seed, Stream::CoherentQuadratures);
    let mut phase_rng = rng::stream(seed, Stream::CoherentPhases);
    let (r, theta) = amplitude.to_polar();
    let mut samples = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    for j in 0..n {
        let phi = match mode {
            PhaseMode::UniformRandom => uniform_phase(&mut phase_rng),
            PhaseMode::Grid => TAU * j as f64 / n as f64,
        };
        samples.push(2.0 * r * cos(theta - phi) + vacuum.quantile(rng::uniform(&mut noise)));
        phases.push(phi);
    }
    let source = format!("coherent alpha={}{:+}i n={n} seed={seed}", amplitude.re, amplitude.im);
    Ok(QuadratureDataset { samples, phases: Some(phases), normalized: true, source })
}
