//! Pattern functions.
//!
//! The phase-sensitive pattern function is
//!
//! ```text
//! f(x, φ; α) = (2/π) ∫₀^∞ db b e^{b²/2} Ω(b) cos(ξ b),
//! ξ = x - 2|α| cos(arg α - φ),
//! ```
//!
//! and averaging it over a uniform phase gives the phase-insensitive
//! pattern function
//!
//! ```text
//! f̄(x; r) = (2/π) ∫₀^∞ db b e^{b²/2} Ω(b) J₀(2 r b) cos(x b),   r = |α|.
//! ```
//!
//! The `b` integrals are truncated at the filter's pattern cutoff and done
//! with composite Gauss–Legendre panels no wider than a quarter period of
//! the fastest oscillation. For the `q → ∞` filter the substitution
//! `b = 2w cos θ` removes the `(2w - b)^{3/2}` edge behaviour.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::filters::{disk_autocorrelation_angle, Filter, FilterSpec};
use crate::math::{cos, exp, floor, sincos, PI};
use crate::numeric::{hermite_basis, GaussLegendre};
use crate::rng::{self, Stream};

const GL_ORDER: usize = 8;
const MIN_PANELS: usize = 16;
const MAX_REFINE: u32 = 10;
const ABS_TOL: f64 = 1e-10;
const MAX_TABLE_STEP: f64 = 0.01;
const MIN_TABLE_STEP: f64 = 5e-4;

/// Quadrature nodes `b_m` and weights that already include
/// `(2/π) b e^{b²/2} Ω(b)` and any change-of-variable Jacobian.
#[derive(Debug, Clone)]
pub(crate) struct KernelRule {
    pub(crate) b: Vec<f64>,
    pub(crate) weight: Vec<f64>,
}

impl KernelRule {
    /// Rule accurate for `cos(x b) J₀(2 r b)` with `|x| + 2r ≤ nu`.
    pub(crate) fn new(filter: &Filter, nu: f64, refine: u32) -> Result<Self> {
        let cutoff = filter.pattern_cutoff()?;
        let rule = GaussLegendre::new(GL_ORDER);
        let quarter = 0.5 * PI;
        let mut raw = Vec::new();
        let mut b = Vec::new();
        let mut weight = Vec::new();
        match filter.spec() {
            FilterSpec::InfinityQ { w } => {
                // b = 2w cos θ, θ ∈ [0, π/2]; |db/dθ| ≤ 2w
                let panels = panel_count(quarter, 2.0 * w * nu, refine);
                rule.push_composite(0.0, quarter, panels, &mut raw);
                for (theta, wt) in raw {
                    let (s, c) = sincos(theta);
                    let bm = 2.0 * w * c;
                    let jac = 2.0 * w * s;
                    b.push(bm);
                    weight.push(2.0 / PI * wt * jac * bm * exp(0.5 * bm * bm) * disk_autocorrelation_angle(theta));
                }
            }
            FilterSpec::Gaussian { .. } | FilterSpec::FiniteQ { .. } => {
                let panels = panel_count(cutoff, nu, refine);
                rule.push_composite(0.0, cutoff, panels, &mut raw);
                for (bm, wt) in raw {
                    b.push(bm);
                    weight.push(2.0 / PI * wt * bm * filter.weighted(bm));
                }
            }
        }
        Ok(Self { b, weight })
    }

    fn len(&self) -> usize {
        self.b.len()
    }

    fn abs_sum(&self) -> f64 {
        self.weight.iter().map(|w| w.abs()).sum()
    }

    fn eval(&self, x: f64, r: f64) -> f64 {
        let mut acc = 0.0;
        if r == 0.0 {
            for (b, w) in self.b.iter().zip(&self.weight) {
                acc += w * cos(x * b);
            }
        } else {
            for (b, w) in self.b.iter().zip(&self.weight) {
                acc += w * libm::j0(2.0 * r * b) * cos(x * b);
            }
        }
        acc
    }

    /// Upper bound on `|∂⁴f̄/∂x⁴|`.
    fn fourth_derivative_bound(&self) -> f64 {
        self.b.iter().zip(&self.weight).map(|(b, w)| w.abs() * b * b * b * b).sum()
    }
}

fn panel_count(length: f64, frequency: f64, refine: u32) -> usize {
    let base = libm::ceil(length * frequency / (0.5 * PI)) as usize;
    base.max(MIN_PANELS) << refine
}

fn converged(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= ABS_TOL + 64.0 * f64::EPSILON * scale
}

/// Phase-averaged pattern function `f̄(x; r)`, adaptively refined until
/// successive results agree to `1e-10` (or to rounding level for very
/// large kernels).
pub fn pattern_phase_averaged(filter: &Filter, x: f64, r: f64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("|α| must be finite and non-negative, got {r}")));
    }
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("quadrature must be finite, got {x}")));
    }
    let nu = x.abs() + 2.0 * r;
    let mut last = KernelRule::new(filter, nu, 0)?.eval(x, r);
    for refine in 1..=MAX_REFINE {
        let rule = KernelRule::new(filter, nu, refine)?;
        let v = rule.eval(x, r);
        if converged(v, last, rule.abs_sum()) {
            return Ok(v);
        }
        last = v;
    }
    Err(Error::NonConvergence { what: "pattern function", change: last })
}

/// `ξ(x, φ, α) = x - 2|α| cos(arg α - φ)`, matching samples
/// `x ~ 2|α| cos(arg α - φ) + vacuum noise` of a coherent state `|α⟩`.
pub fn xi(x: f64, phi: f64, alpha: Complex64) -> f64 {
    let (r, theta) = alpha.to_polar();
    x - 2.0 * r * cos(theta - phi)
}

/// Phase-sensitive pattern function `f(x, φ; α)`.
pub fn pattern_phase_sensitive(filter: &Filter, x: f64, phi: f64, alpha: Complex64) -> Result<f64> {
    pattern_phase_averaged(filter, xi(x, phi, alpha), 0.0)
}

/// Build options for [`PatternTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct PatternTableOptions {
    /// Node spacing in `x`. `None` picks the largest step whose cubic
    /// Hermite error bound stays a factor four below `tolerance`, capped at
    /// `0.01`.
    pub x_step: Option<f64>,
    /// Random off-grid points checked against direct evaluation at build
    /// time.
    pub validation_points: usize,
    /// Largest accepted absolute interpolation error.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for PatternTableOptions {
    fn default() -> Self {
        Self { x_step: None, validation_points: 64, tolerance: 1e-6, seed: 0 }
    }
}

/// Tabulated `f̄(x; r_k)` on a uniform `|x|` grid for a fixed set of radii,
/// with cubic Hermite interpolation using exact `x`-derivatives.
///
/// Evaluation uses `|x|`, so `f̄(-x) = f̄(x)` holds exactly.
#[derive(Debug, Clone)]
pub struct PatternTable {
    filter: FilterSpec,
    alpha_grid: Vec<f64>,
    x_min: f64,
    x_max: f64,
    x_step: f64,
    nodes: usize,
    values: Vec<f64>,
    slopes: Vec<f64>,
    validation_error: f64,
}

impl PatternTable {
    pub fn filter(&self) -> FilterSpec {
        self.filter
    }

    pub fn alpha_grid(&self) -> &[f64] {
        &self.alpha_grid
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }

    pub fn x_step(&self) -> f64 {
        self.x_step
    }

    /// `|x|` node count.
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Stored value at `|x| = node · x_step` for radius index `k`.
    pub fn node_value(&self, node: usize, k: usize) -> f64 {
        self.values[node * self.alpha_grid.len() + k]
    }

    /// Worst interpolation error seen during build-time validation.
    pub fn validation_error(&self) -> f64 {
        self.validation_error
    }

    /// Absolute accuracy of a table value: interpolation error seen during
    /// validation plus the quadrature tolerance of the nodes.
    pub fn numerical_error(&self) -> f64 {
        self.validation_error + ABS_TOL
    }

    #[inline]
    fn locate(&self, x: f64) -> Result<(usize, f64)> {
        if !(x >= self.x_min && x <= self.x_max) {
            return Err(Error::OutOfTableRange { x, min: self.x_min, max: self.x_max });
        }
        let pos = x.abs() / self.x_step;
        let i = (floor(pos) as usize).min(self.nodes - 2);
        Ok((i, pos - i as f64))
    }

    /// `f̄(x; r_k)`.
    pub fn eval(&self, x: f64, k: usize) -> Result<f64> {
        let (i, t) = self.locate(x)?;
        let nr = self.alpha_grid.len();
        let (h00, h10, h01, h11) = hermite_basis(t);
        let h = self.x_step;
        let (a, b) = (i * nr + k, (i + 1) * nr + k);
        Ok(h00 * self.values[a] + h10 * h * self.slopes[a] + h01 * self.values[b] + h11 * h * self.slopes[b])
    }

    /// `f̄(x; r_k)` for every radius, written into `out`.
    pub fn eval_all(&self, x: f64, out: &mut [f64]) -> Result<()> {
        let (i, t) = self.locate(x)?;
        let nr = self.alpha_grid.len();
        let (h00, h10, h01, h11) = hermite_basis(t);
        let h = self.x_step;
        let (v0, v1) = (&self.values[i * nr..(i + 1) * nr], &self.values[(i + 1) * nr..(i + 2) * nr]);
        let (s0, s1) = (&self.slopes[i * nr..(i + 1) * nr], &self.slopes[(i + 1) * nr..(i + 2) * nr]);
        for k in 0..nr {
            out[k] = h00 * v0[k] + h10 * h * s0[k] + h01 * v1[k] + h11 * h * s1[k];
        }
        Ok(())
    }
}

/// Tabulates `f̄` over `x_range` for the radii in `alpha_grid` and checks
/// the interpolant against direct evaluation at random off-grid points.
pub fn build_pattern_table(
    filter: &Filter,
    x_range: (f64, f64),
    alpha_grid: &[f64],
    opts: &PatternTableOptions,
) -> Result<PatternTable> {
    let (x_min, x_max) = x_range;
    if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
        return Err(Error::InvalidGrid(format!("bad x range [{x_min}, {x_max}]")));
    }
    check_radial_grid(alpha_grid)?;
    let x_abs = x_min.abs().max(x_max.abs());
    let r_max = alpha_grid[alpha_grid.len() - 1];
    let rule = KernelRule::new(filter, x_abs + 2.0 * r_max + 1.0, 1)?;

    let x_step = match opts.x_step {
        Some(h) if h > 0.0 && h <= MAX_TABLE_STEP => h,
        Some(h) => return Err(Error::InvalidGrid(format!("x step {h} must be in (0, {MAX_TABLE_STEP}]"))),
        None => {
            let bound = rule.fourth_derivative_bound();
            let h = libm::pow(384.0 * 0.25 * opts.tolerance / bound, 0.25);
            h.clamp(MIN_TABLE_STEP, MAX_TABLE_STEP)
        }
    };
    let nodes = (libm::ceil(x_abs / x_step) as usize + 1).max(2);
    let nr = alpha_grid.len();
    let nb = rule.len();

    let mut kernel = vec![0.0; nb * nr];
    for m in 0..nb {
        for (k, &r) in alpha_grid.iter().enumerate() {
            let j0 = if r == 0.0 { 1.0 } else { libm::j0(2.0 * r * rule.b[m]) };
            kernel[m * nr + k] = rule.weight[m] * j0;
        }
    }
    let mut values = vec![0.0; nodes * nr];
    let mut slopes = vec![0.0; nodes * nr];
    for i in 0..nodes {
        let x = i as f64 * x_step;
        let v = &mut values[i * nr..(i + 1) * nr];
        let d = &mut slopes[i * nr..(i + 1) * nr];
        for m in 0..nb {
            let b = rule.b[m];
            let (s, c) = sincos(x * b);
            let bs = b * s;
            let row = &kernel[m * nr..(m + 1) * nr];
            for k in 0..nr {
                v[k] += c * row[k];
                d[k] -= bs * row[k];
            }
        }
    }

    let mut table = PatternTable {
        filter: filter.spec(),
        alpha_grid: alpha_grid.to_vec(),
        x_min,
        x_max,
        x_step,
        nodes,
        values,
        slopes,
        validation_error: 0.0,
    };
    let mut worst: f64 = 0.0;
    let mut r = rng::stream(opts.seed, Stream::TableValidation);
    for _ in 0..opts.validation_points {
        let x = x_min + (x_max - x_min) * rng::uniform(&mut r);
        let k = r.random_range(0..nr);
        let direct = pattern_phase_averaged(filter, x, alpha_grid[k])?;
        worst = worst.max((table.eval(x, k)? - direct).abs());
    }
    if worst > opts.tolerance {
        return Err(Error::TableValidation { worst });
    }
    table.validation_error = worst;
    Ok(table)
}

pub(crate) fn check_radial_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty |α| grid".into()));
    }
    if grid.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::InvalidGrid("|α| values must be finite and non-negative".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("|α| grid must be strictly ascending".into()));
    }
    Ok(())
}

/// Fixed-`r` kernel `f̄(x; r) = Σ_m c_m cos(x b_m)` used by the nested
/// quadrature oracle; refined until two levels agree on a probe set.
#[derive(Debug, Clone)]
pub(crate) struct RadialPattern {
    b: Vec<f64>,
    coeff: Vec<f64>,
}

impl RadialPattern {
    pub(crate) fn new(filter: &Filter, r: f64, x_max: f64) -> Result<Self> {
        let nu = x_max + 2.0 * r;
        let probes = [0.0, 0.37 * x_max, 0.71 * x_max, x_max];
        let mut prev = KernelRule::new(filter, nu, 0)?;
        for refine in 1..=MAX_REFINE {
            let rule = KernelRule::new(filter, nu, refine)?;
            let scale = rule.abs_sum();
            if probes.iter().all(|&x| converged(rule.eval(x, r), prev.eval(x, r), scale)) {
                let coeff = rule.b.iter().zip(&rule.weight).map(|(b, w)| w * libm::j0(2.0 * r * b)).collect();
                return Ok(Self { b: rule.b, coeff });
            }
            prev = rule;
        }
        Err(Error::NonConvergence { what: "pattern kernel", change: f64::NAN })
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        self.b.iter().zip(&self.coeff).map(|(b, c)| c * cos(x * b)).sum()
    }
}
