//! Reference values computed without the sampling machinery.
//!
//! * [`oracle_quasiprob`] integrates `Ω Φ J₀` over the radial frequency
//!   with the normally ordered characteristic function of a Fock mixture.
//! * [`oracle_estimate_expectation`] integrates the phase-averaged pattern
//!   function against the analytic quadrature density, i.e. the value the
//!   estimator converges to.
//! * [`cahill_glauber_closed_form`] is the closed form for Gaussian filters.
//!
//! Agreement of the first two is the main consistency check of the
//! pattern-function path.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::data::FockMixture;
use crate::error::{Error, Result};
use crate::filters::{Filter, FilterSpec};
use crate::math::{cos, exp, log, PI};
use crate::numeric::GaussLegendre;
use crate::pattern::RadialPattern;
use crate::special::laguerre;

const TOL: f64 = 1e-10;
const MAX_DOUBLINGS: u32 = 14;
/// Quadratures beyond this are outside the analytic densities' support
/// for practical purposes (`|x| ≤ 12` holds all but `~1e-30` of the mass
/// for up to ten photons).
pub const X_LIMIT: f64 = 12.0;

/// Quadrature density `Σ_k p_k |ψ_k(x)|²`.
pub fn quadrature_pdf(mix: &FockMixture, x: f64) -> f64 {
    mix.density(x)
}

/// Radial normally ordered characteristic function `Φ(b) = Σ p_k L_k(b²)`.
#[derive(Debug, Clone, Copy)]
pub struct CharacteristicFunction<'a> {
    mix: &'a FockMixture,
}

impl<'a> CharacteristicFunction<'a> {
    pub fn new(mix: &'a FockMixture) -> Self {
        Self { mix }
    }

    pub fn eval(&self, b: f64) -> f64 {
        let t = b * b;
        self.mix.weights().iter().enumerate().map(|(k, p)| p * laguerre(k, t)).sum()
    }
}

/// Upper `b` limit for `Ω Φ` integrals.
fn radial_cutoff(mix: &FockMixture, filter: &Filter) -> Result<f64> {
    match filter.spec() {
        FilterSpec::Gaussian { s } => {
            if s >= 0.0 {
                return Err(Error::NonIntegrable(s));
            }
            // Φ grows like b^{2k}; stop once e^{-(1-s)b²/2} b^{2k+1} < e^{-50}
            let k = mix.max_photon() as f64;
            let mut b: f64 = 1.0;
            while 0.5 * (1.0 - s) * b * b - (2.0 * k + 1.0) * log(b) < 50.0 {
                b += 0.25;
            }
            Ok(b)
        }
        FilterSpec::InfinityQ { w } => Ok(2.0 * w),
        FilterSpec::FiniteQ { .. } => Ok(filter.table().map_or(0.0, |t| t.b_support())),
    }
}

/// `∫₀^B g(b) db` with `b = B t(2-t)`, doubling composite Gauss–Legendre
/// until successive results agree to `1e-10`.
fn radial_integral(b_max: f64, frequency: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    let rule = GaussLegendre::new(10);
    let mut panels = (libm::ceil(b_max * frequency / (0.5 * PI)) as usize).max(8);
    let h = |t: f64| {
        let b = b_max * t * (2.0 - t);
        g(b) * b_max * 2.0 * (1.0 - t)
    };
    let mut last = rule.composite(0.0, 1.0, panels, h);
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let v = rule.composite(0.0, 1.0, panels, h);
        if (v - last).abs() < TOL {
            return Ok(v);
        }
        last = v;
    }
    Err(Error::NonConvergence { what: "radial oracle integral", change: last })
}

/// `P_Ω(r) = (2/π) ∫₀^∞ b Ω(b) Φ(b) J₀(2rb) db`.
pub fn oracle_quasiprob(mix: &FockMixture, filter: &Filter, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::NegativeRadius(r));
    }
    let phi = CharacteristicFunction::new(mix);
    let b_max = radial_cutoff(mix, filter)?;
    let freq = 2.0 * r + 2.0 * libm::sqrt(mix.max_photon() as f64 + 1.0);
    radial_integral(b_max, freq, |b| 2.0 / PI * b * filter.value(b) * phi.eval(b) * libm::j0(2.0 * r * b))
}

/// Two-dimensional Fourier transform of `Ω` alone (`Φ ≡ 1`),
/// `(2/π) ∫ b Ω(b) J₀(2rb) db`. Nonnegative for admissible filters.
pub fn filter_fourier_transform(filter: &Filter, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::NegativeRadius(r));
    }
    let b_max = radial_cutoff(&FockMixture::vacuum(), filter)?;
    radial_integral(b_max, 2.0 * r + 2.0, |b| 2.0 / PI * b * filter.value(b) * libm::j0(2.0 * r * b))
}

/// Mass of `P_Ω` inside the disk `|α| ≤ radius`:
/// `2π ∫₀^R r P_Ω(r) dr = 2R ∫₀^∞ Ω(b) Φ(b) J₁(2Rb) db`.
pub fn truncated_mass(mix: &FockMixture, filter: &Filter, radius: f64) -> Result<f64> {
    if !(radius >= 0.0) {
        return Err(Error::NegativeRadius(radius));
    }
    let phi = CharacteristicFunction::new(mix);
    let b_max = radial_cutoff(mix, filter)?;
    let freq = 2.0 * radius + 2.0 * libm::sqrt(mix.max_photon() as f64 + 1.0);
    radial_integral(b_max, freq, |b| 2.0 * radius * filter.value(b) * phi.eval(b) * libm::j1(2.0 * radius * b))
}

/// `s`-parametrized quasiprobability of a Fock mixture at `|α| = r`.
pub fn cahill_glauber_closed_form(mix: &FockMixture, s: f64, r: f64) -> Result<f64> {
    if !(s < 0.0) {
        return Err(Error::NonIntegrable(s));
    }
    if !(r >= 0.0) {
        return Err(Error::NegativeRadius(r));
    }
    let pre = 2.0 / (PI * (1.0 - s)) * exp(-2.0 * r * r / (1.0 - s));
    let ratio = (s + 1.0) / (s - 1.0);
    // ratio^k L_k(4r²/(1-s²)) expanded so that s = -1 needs no limit:
    // ratio · 4r²/(1-s²) = -4r²/(1-s)²
    let u = -4.0 * r * r / ((1.0 - s) * (1.0 - s));
    Ok(mix
        .weights()
        .iter()
        .enumerate()
        .map(|(k, p)| p * pre * scaled_laguerre(k, ratio, u))
        .sum())
}

/// `Σ_j C(k,j) (-u)^j / j! · ratio^(k-j)`, i.e. `ratio^k L_k(u / ratio)`.
fn scaled_laguerre(k: usize, ratio: f64, u: f64) -> f64 {
    let mut total = 0.0;
    let mut coeff = 1.0; // C(k,j) / j!
    let mut u_pow = 1.0;
    for j in 0..=k {
        let mut r_pow = 1.0;
        for _ in 0..k - j {
            r_pow *= ratio;
        }
        total += coeff * u_pow * r_pow;
        coeff *= (k - j) as f64 / ((j + 1) as f64 * (j + 1) as f64);
        u_pow *= -u;
    }
    total
}

/// `∫ p(x) f̄(x; r) dx` by nested quadrature over `|x| ≤ 12`.
pub fn oracle_estimate_expectation(mix: &FockMixture, filter: &Filter, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::NegativeRadius(r));
    }
    let kernel = RadialPattern::new(filter, r, X_LIMIT)?;
    let b_max = filter.pattern_cutoff()?;
    let rule = GaussLegendre::new(10);
    let f = |x: f64| 2.0 * mix.density(x) * kernel.eval(x);
    let mut panels = (libm::ceil(X_LIMIT * b_max / (0.5 * PI)) as usize).max(16);
    let mut last = rule.composite(0.0, X_LIMIT, panels, f);
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let v = rule.composite(0.0, X_LIMIT, panels, f);
        if (v - last).abs() < TOL {
            return Ok(v);
        }
        last = v;
    }
    Err(Error::NonConvergence { what: "nested oracle integral", change: last })
}

/// `∫ p(x) cos(bx) dx`, which equals `Φ(b) e^{-b²/2}`.
pub fn quadrature_cosine_transform(mix: &FockMixture, b: f64) -> Result<f64> {
    let rule = GaussLegendre::new(10);
    let f = |x: f64| 2.0 * mix.density(x) * cos(b * x);
    let mut panels = (libm::ceil(X_LIMIT * (b + 2.0) / (0.5 * PI)) as usize).max(32);
    let mut last = rule.composite(0.0, X_LIMIT, panels, f);
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let v = rule.composite(0.0, X_LIMIT, panels, f);
        if (v - last).abs() < TOL {
            return Ok(v);
        }
        last = v;
    }
    Err(Error::NonConvergence { what: "cosine transform", change: last })
}

/// One row of the oracle identity table.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    fn new(name: String, value: f64, expected: f64, tolerance: f64) -> Self {
        Self { name, value, expected, tolerance }
    }

    pub fn passed(&self) -> bool {
        (self.value - self.expected).abs() <= self.tolerance
    }
}

/// Every oracle identity the library relies on, evaluated once.
pub fn identity_checks() -> Result<Vec<IdentityCheck>> {
    let mut out = Vec::new();
    let single = |eta: f64| FockMixture::from_loss(1, eta);

    for (n, eta) in [(1usize, 0.3), (2, 0.5), (3, 0.8)] {
        let mix = FockMixture::from_loss(n, eta)?;
        for b in [0.0, 0.7, 1.9] {
            let phi = CharacteristicFunction::new(&mix).eval(b);
            out.push(IdentityCheck::new(
                format!("Φ of lossy |{n}⟩ (η={eta}) at b={b} equals L_n(ηb²)"),
                phi,
                laguerre(n, eta * b * b),
                1e-12,
            ));
        }
    }

    let mix = FockMixture::from_loss(2, 0.6)?;
    for b in [0.5, 1.3, 2.2] {
        let phi = CharacteristicFunction::new(&mix).eval(b);
        out.push(IdentityCheck::new(
            format!("cosine transform of p(x) equals Φ(b)e^(-b²/2), lossy |2⟩, b={b}"),
            quadrature_cosine_transform(&mix, b)?,
            phi * exp(-0.5 * b * b),
            1e-9,
        ));
    }

    for n in [0usize, 1, 3] {
        let mix = FockMixture::from_loss(n, 0.7)?;
        let rule = GaussLegendre::new(10);
        let var = rule.composite(-X_LIMIT, X_LIMIT, 400, |x| x * x * mix.density(x));
        out.push(IdentityCheck::new(
            format!("quadrature variance of lossy |{n}⟩ (η=0.7) is 2nη+1"),
            var,
            2.0 * n as f64 * 0.7 + 1.0,
            1e-8,
        ));
    }

    let mix = FockMixture::new(vec![0.4, 0.6])?;
    for s in [-0.04, -0.5, -1.0] {
        let f = Filter::new(FilterSpec::Gaussian { s })?;
        for r in [0.0, 1.0, 2.5] {
            out.push(IdentityCheck::new(
                format!("radial transform equals closed form, 0.4|0⟩+0.6|1⟩, s={s}, r={r}"),
                oracle_quasiprob(&mix, &f, r)?,
                cahill_glauber_closed_form(&mix, s, r)?,
                1e-6,
            ));
        }
    }

    let cases: [(FockMixture, FilterSpec, f64); 6] = [
        (FockMixture::vacuum(), FilterSpec::Gaussian { s: -1.0 }, 0.0),
        (FockMixture::new(vec![0.7, 0.3])?, FilterSpec::InfinityQ { w: 1.65 }, 0.0),
        (single(0.6)?, FilterSpec::Gaussian { s: -0.04 }, 0.0),
        (FockMixture::from_loss(2, 0.5)?, FilterSpec::InfinityQ { w: 2.0 }, 1.0),
        (single(0.3)?, FilterSpec::FiniteQ { q: 4.0, w: 1.5 }, 0.4),
        (single(0.3)?, FilterSpec::InfinityQ { w: 1.3 }, 3.5),
    ];
    for (mix, spec, r) in cases {
        let f = Filter::new(spec)?;
        out.push(IdentityCheck::new(
            format!("pattern path equals characteristic path, p={:?}, {spec}, r={r}", mix.weights()),
            oracle_estimate_expectation(&mix, &f, r)?,
            oracle_quasiprob(&mix, &f, r)?,
            1e-6,
        ));
    }

    for spec in [FilterSpec::Gaussian { s: -0.3 }, FilterSpec::Gaussian { s: -1.0 }] {
        let f = Filter::new(spec)?;
        out.push(IdentityCheck::new(
            format!("vacuum {spec} integrates to one over the plane"),
            truncated_mass(&FockMixture::vacuum(), &f, 12.0)?,
            1.0,
            1e-6,
        ));
    }
    Ok(out)
}
