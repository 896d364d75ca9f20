//! State diagnostics: quadrature variance, efficiency from the variance,
//! and a photon-number distribution from a constrained histogram fit.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::data::QuadratureDataset;
use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::numeric::GaussLegendre;
use crate::rng::{self, Stream};
use crate::special::{normal_pdf, scaled_hermite};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    pub var: f64,
    pub stderr: f64,
}

/// Unbiased sample variance with a standard error from the fourth central
/// moment, `Var(s²) ≈ (m₄ - m₂² (N-3)/(N-1)) / N`.
pub fn quadrature_variance(data: &QuadratureDataset) -> Result<VarianceEstimate> {
    let xs = data.samples();
    let n = xs.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &x in xs {
        let d = (x - mean) * (x - mean);
        m2 += d;
        m4 += d * d;
    }
    let var = m2 / (nf - 1.0);
    let (m2, m4) = (m2 / nf, m4 / nf);
    let v = if n > 1 { (m4 - m2 * m2 * (nf - 3.0) / (nf - 1.0)) / nf } else { 0.0 };
    Ok(VarianceEstimate { var, stderr: sqrt(v.max(0.0)) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyEstimate {
    pub eta: f64,
    pub stderr: f64,
    /// The raw estimate lies outside `[0, 1]`.
    pub out_of_range: bool,
}

/// `η = (var - 1) / (2n)` for a lossy `|n⟩`.
pub fn estimate_efficiency(data: &QuadratureDataset, n: usize) -> Result<EfficiencyEstimate> {
    if n == 0 {
        return Err(Error::InvalidPhotonNumber);
    }
    let v = quadrature_variance(data)?;
    let two_n = 2.0 * n as f64;
    let eta = (v.var - 1.0) / two_n;
    Ok(EfficiencyEstimate { eta, stderr: v.stderr / two_n, out_of_range: !(0.0..=1.0).contains(&eta) })
}

pub const MAX_FIT_PHOTONS: usize = 10;
/// Condition numbers above this flag the fit as ill-conditioned.
pub const ILL_CONDITIONED: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonFitOptions {
    pub bins: usize,
    pub resamples: usize,
    pub seed: u64,
}

impl Default for PhotonFitOptions {
    fn default() -> Self {
        Self { bins: 200, resamples: 100, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    pub probs: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Condition number of the bin-probability design matrix.
    pub condition_number: f64,
    pub ill_conditioned: bool,
}

/// Histogram of `data` fitted by `Σ p_n |ψ_n(x)|²` with `p ≥ 0`, `Σ p = 1`;
/// bootstrap standard errors.
pub fn fit_photon_distribution(
    data: &QuadratureDataset,
    n_max: usize,
    opts: &PhotonFitOptions,
) -> Result<PhotonDistribution> {
    if n_max > MAX_FIT_PHOTONS {
        return Err(Error::InvalidArgument(format!("n_max must be ≤ {MAX_FIT_PHOTONS}, got {n_max}")));
    }
    if data.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: data.len() });
    }
    if opts.bins < n_max + 1 {
        return Err(Error::InvalidArgument(format!("need at least {} bins", n_max + 1)));
    }
    if opts.resamples < 100 {
        return Err(Error::InvalidArgument("bootstrap needs at least 100 resamples".into()));
    }
    let (lo, hi) = data.range();
    let (lo, hi) = (lo - 0.5, hi + 0.5);
    let bins = opts.bins;
    let width = (hi - lo) / bins as f64;
    let design = bin_probabilities(lo, width, bins, n_max);
    let cols = n_max + 1;

    let bin_of: Vec<u32> = data
        .samples()
        .iter()
        .map(|&x| (((x - lo) / width) as usize).min(bins - 1) as u32)
        .collect();
    let n = bin_of.len() as f64;
    let mut counts = vec![0u64; bins];
    bin_of.iter().for_each(|&b| counts[b as usize] += 1);
    let hist: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let probs = simplex_fit(&design, bins, cols, &hist)?;

    let mut rng = rng::stream(opts.seed, Stream::Bootstrap);
    let mut sum = vec![0.0; cols];
    let mut sum_sq = vec![0.0; cols];
    for _ in 0..opts.resamples {
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..bin_of.len() {
            counts[bin_of[rng.random_range(0..bin_of.len())] as usize] += 1;
        }
        let h: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
        let p = simplex_fit(&design, bins, cols, &h)?;
        for k in 0..cols {
            sum[k] += p[k];
            sum_sq[k] += p[k] * p[k];
        }
    }
    let b = opts.resamples as f64;
    let stderr = (0..cols)
        .map(|k| {
            let m = sum[k] / b;
            sqrt(((sum_sq[k] - b * m * m) / (b - 1.0)).max(0.0))
        })
        .collect();

    let condition_number = condition_number(&design, bins, cols);
    Ok(PhotonDistribution { probs, stderr, condition_number, ill_conditioned: !(condition_number <= ILL_CONDITIONED) })
}

/// Column-major `bins × (n_max+1)` matrix of `∫_bin |ψ_n|²`.
fn bin_probabilities(lo: f64, width: f64, bins: usize, n_max: usize) -> Vec<f64> {
    let rule = GaussLegendre::new(8);
    let cols = n_max + 1;
    let mut a = vec![0.0; bins * cols];
    let mut h = vec![0.0; cols];
    for i in 0..bins {
        let x0 = lo + i as f64 * width;
        for (t, wt) in rule.nodes().iter().zip(rule.weights()) {
            let x = x0 + 0.5 * width * (t + 1.0);
            scaled_hermite(x, &mut h);
            let g = 0.5 * width * wt * normal_pdf(x);
            for k in 0..cols {
                a[k * bins + i] += g * h[k] * h[k];
            }
        }
    }
    a
}

/// Nonnegative least squares followed by renormalization onto the simplex.
fn simplex_fit(a: &[f64], m: usize, n: usize, b: &[f64]) -> Result<Vec<f64>> {
    let mut x = nnls(a, m, n, b)?;
    let s: f64 = x.iter().sum();
    if !(s > 0.0) {
        return Err(Error::NonConvergence { what: "photon-number fit", change: s });
    }
    x.iter_mut().for_each(|v| *v /= s);
    Ok(x)
}

/// Lawson–Hanson active-set NNLS for column-major `a` (`m × n`).
pub(crate) fn nnls(a: &[f64], m: usize, n: usize, b: &[f64]) -> Result<Vec<f64>> {
    let col = |j: usize| &a[j * m..(j + 1) * m];
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())) * b.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE) * m as f64;
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let gradient = |x: &[f64]| -> Vec<f64> {
        let mut r = b.to_vec();
        for j in 0..n {
            if x[j] != 0.0 {
                for (ri, aij) in r.iter_mut().zip(col(j)) {
                    *ri -= aij * x[j];
                }
            }
        }
        (0..n).map(|j| col(j).iter().zip(&r).map(|(u, v)| u * v).sum()).collect()
    };
    for _outer in 0..3 * n + 10 {
        let w = gradient(&x);
        let pick = (0..n).filter(|&j| !passive[j] && w[j] > tol).max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = pick else {
            return Ok(x);
        };
        passive[j] = true;
        for _inner in 0..3 * n + 10 {
            let idx: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let z_p = least_squares(a, m, &idx, b);
            let mut z = vec![0.0; n];
            idx.iter().zip(&z_p).for_each(|(&k, &v)| z[k] = v);
            if idx.iter().all(|&k| z[k] > 0.0) {
                x = z;
                break;
            }
            let mut step = f64::INFINITY;
            for &k in &idx {
                if z[k] <= 0.0 {
                    step = step.min(x[k] / (x[k] - z[k]));
                }
            }
            for k in 0..n {
                x[k] += step * (z[k] - x[k]);
                if passive[k] && x[k] <= 0.0 {
                    passive[k] = false;
                    x[k] = 0.0;
                }
            }
        }
    }
    Err(Error::NonConvergence { what: "nonnegative least squares", change: f64::NAN })
}

/// Least squares on the columns `idx` of column-major `a`, by Householder QR.
fn least_squares(a: &[f64], m: usize, idx: &[usize], b: &[f64]) -> Vec<f64> {
    let p = idx.len();
    let mut q: Vec<f64> = idx.iter().flat_map(|&j| a[j * m..(j + 1) * m].iter().copied()).collect();
    let mut rhs = b.to_vec();
    for k in 0..p {
        let ck = &q[k * m..(k + 1) * m];
        let norm = sqrt(ck[k..].iter().map(|v| v * v).sum());
        if norm == 0.0 {
            continue;
        }
        let alpha = if ck[k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = ck[k..].to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|t| t * t).sum();
        if vv == 0.0 {
            continue;
        }
        let reflect = |c: &mut [f64]| {
            let d: f64 = v.iter().zip(&c[k..]).map(|(a, b)| a * b).sum::<f64>() * 2.0 / vv;
            for (ci, vi) in c[k..].iter_mut().zip(&v) {
                *ci -= d * vi;
            }
        };
        for j in k..p {
            reflect(&mut q[j * m..(j + 1) * m]);
        }
        reflect(&mut rhs);
    }
    let mut z = vec![0.0; p];
    for k in (0..p).rev() {
        let mut s = rhs[k];
        for j in k + 1..p {
            s -= q[j * m + k] * z[j];
        }
        let d = q[k * m + k];
        z[k] = if d != 0.0 { s / d } else { 0.0 };
    }
    z
}

/// `sqrt(λ_max / λ_min)` of `AᵀA` via cyclic Jacobi.
fn condition_number(a: &[f64], m: usize, n: usize) -> f64 {
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            g[i * n + j] = a[i * m..(i + 1) * m].iter().zip(&a[j * m..(j + 1) * m]).map(|(u, v)| u * v).sum();
        }
    }
    let eig = symmetric_eigenvalues(&mut g, n);
    let max = eig.iter().fold(0.0f64, |s, v| s.max(*v));
    let min = eig.iter().fold(f64::INFINITY, |s, v| s.min(*v));
    if min <= 0.0 {
        f64::INFINITY
    } else {
        sqrt(max / min)
    }
}

fn symmetric_eigenvalues(g: &mut [f64], n: usize) -> Vec<f64> {
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| g[i * n + j] * g[i * n + j]).sum();
        let diag: f64 = (0..n).map(|i| g[i * n + i] * g[i * n + i]).sum();
        if off <= 1e-30 * diag {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = g[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (g[q * n + q] - g[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let (gkp, gkq) = (g[k * n + p], g[k * n + q]);
                    g[k * n + p] = c * gkp - s * gkq;
                    g[k * n + q] = s * gkp + c * gkq;
                }
                for k in 0..n {
                    let (gpk, gqk) = (g[p * n + k], g[q * n + k]);
                    g[p * n + k] = c * gpk - s * gqk;
                    g[q * n + k] = s * gpk + c * gqk;
                }
            }
        }
    }
    (0..n).map(|i| g[i * n + i]).collect()
}
