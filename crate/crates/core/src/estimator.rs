//! Direct-sampling estimates of filtered quasiprobabilities.
//!
//! For phase-insensitive data `P_Ω(α) ≈ (1/N) Σ_j f̄(x_j; |α|)`; for
//! phase-tagged data `P_Ω(α) ≈ (1/N) Σ_j f(x_j, φ_j; α)`. Standard errors
//! are the usual standard error of the mean. Sums are exact, so any
//! partition of the data merged in any order gives bit-identical output.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::accumulate::MomentSums;
use crate::data::QuadratureDataset;
use crate::error::{Error, Result};
use crate::filters::{Filter, FilterSpec};
use crate::math::PI;
use crate::pattern::{build_pattern_table, xi, PatternTable, PatternTableOptions};

/// Points at which the quasiprobability is estimated.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimateGrid {
    /// Radii `|α|` for phase-averaged estimates.
    Radial(Vec<f64>),
    /// Phase-space points for phase-sensitive estimates.
    Complex(Vec<Complex64>),
}

impl EstimateGrid {
    pub fn len(&self) -> usize {
        match self {
            Self::Radial(g) => g.len(),
            Self::Complex(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `|α|` of grid point `i`.
    pub fn abs(&self, i: usize) -> f64 {
        match self {
            Self::Radial(g) => g[i],
            Self::Complex(g) => g[i].norm(),
        }
    }

    /// Grid point `i` as a complex amplitude (radial points on the real axis).
    pub fn point(&self, i: usize) -> Complex64 {
        match self {
            Self::Radial(g) => Complex64::new(g[i], 0.0),
            Self::Complex(g) => g[i],
        }
    }
}

/// `r = 0, 0.05, …, 3.5`.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=70).map(|i| i as f64 * 0.05).collect()
}

/// Signed significance `Σ = min_i P_i / sqrt(σ_i² + δ²)` and where it is
/// attained, with `δ` the numerical error of the pattern functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Significance {
    pub sigma: f64,
    pub index: usize,
    pub alpha: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiprobEstimate {
    pub filter: FilterSpec,
    pub grid: EstimateGrid,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n: usize,
    /// Bound on the numerical (non-statistical) error of each value.
    pub numerical_error: f64,
}

impl QuasiprobEstimate {
    pub fn significance(&self) -> Result<Significance> {
        significance(self)
    }
}

/// Minimum of `P/σ` over the grid; ties go to the smaller `|α|`.
///
/// `σ` is widened by the estimate's numerical error, so values below the
/// accuracy of the pattern functions never count as significant.
pub fn significance(est: &QuasiprobEstimate) -> Result<Significance> {
    if est.values.is_empty() || est.values.len() != est.stderr.len() || est.values.len() != est.grid.len() {
        return Err(Error::InvalidGrid("estimate has mismatched or empty grid".into()));
    }
    let mut best: Option<(f64, usize)> = None;
    for (i, (&p, &s)) in est.values.iter().zip(&est.stderr).enumerate() {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::ZeroStderr(i));
        }
        let z = p / libm::hypot(s, est.numerical_error);
        best = match best {
            None => Some((z, i)),
            Some((bz, bi)) => {
                if z < bz || (z == bz && est.grid.abs(i) < est.grid.abs(bi)) {
                    Some((z, i))
                } else {
                    Some((bz, bi))
                }
            }
        };
    }
    let (sigma, index) = best.expect("non-empty grid");
    Ok(Significance { sigma, index, alpha: est.grid.point(index) })
}

/// Partial sums of `f̄(x_j; r_k)` over a subset of samples.
///
/// Accumulators over disjoint parts of a dataset can be merged in any
/// order; the result does not depend on the partition.
#[derive(Debug, Clone)]
pub struct RadialAccumulator<'a> {
    table: &'a PatternTable,
    sums: Vec<MomentSums>,
    scratch: Vec<f64>,
}

impl<'a> RadialAccumulator<'a> {
    pub fn new(table: &'a PatternTable) -> Self {
        let k = table.alpha_grid().len();
        Self { table, sums: vec![MomentSums::new(); k], scratch: vec![0.0; k] }
    }

    pub fn add_samples(&mut self, xs: &[f64]) -> Result<()> {
        for &x in xs {
            self.table.eval_all(x, &mut self.scratch)?;
            for (s, &f) in self.sums.iter_mut().zip(&self.scratch) {
                s.add(f);
            }
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &RadialAccumulator<'_>) {
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            a.merge(b);
        }
    }

    pub fn count(&self) -> u64 {
        self.sums.first().map_or(0, |s| s.count())
    }

    pub fn finish(&self) -> Result<QuasiprobEstimate> {
        let n = self.count() as usize;
        if n < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: n });
        }
        Ok(QuasiprobEstimate {
            filter: self.table.filter(),
            grid: EstimateGrid::Radial(self.table.alpha_grid().to_vec()),
            values: self.sums.iter().map(|s| s.mean()).collect(),
            stderr: self.sums.iter().map(|s| s.stderr()).collect(),
            n,
            numerical_error: self.table.numerical_error(),
        })
    }
}

/// Phase-averaged estimate on the table's radial grid.
///
/// Phase-tagged data are rejected; drop the phases explicitly with
/// [`QuadratureDataset::without_phases`] to ignore them.
pub fn estimate_phase_averaged(data: &QuadratureDataset, table: &PatternTable) -> Result<QuasiprobEstimate> {
    if data.phases().is_some() {
        return Err(Error::UnexpectedPhases);
    }
    if data.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: data.len() });
    }
    let mut acc = RadialAccumulator::new(table);
    acc.add_samples(data.samples())?;
    acc.finish()
}

/// Partial sums for phase-sensitive estimation, driven by a one-radius
/// table of `f̄(ξ; 0)`.
#[derive(Debug, Clone)]
pub struct PhaseSensitiveAccumulator<'a> {
    table: &'a PatternTable,
    grid: Vec<Complex64>,
    sums: Vec<MomentSums>,
}

impl<'a> PhaseSensitiveAccumulator<'a> {
    pub fn new(table: &'a PatternTable, grid: &[Complex64]) -> Result<Self> {
        if table.alpha_grid() != [0.0] {
            return Err(Error::InvalidGrid("phase-sensitive estimation needs a table built at |α| = 0 only".into()));
        }
        check_complex_grid(grid)?;
        Ok(Self { table, grid: grid.to_vec(), sums: vec![MomentSums::new(); grid.len()] })
    }

    pub fn add_samples(&mut self, xs: &[f64], phases: &[f64]) -> Result<()> {
        if xs.len() != phases.len() {
            return Err(Error::PhaseLengthMismatch { samples: xs.len(), phases: phases.len() });
        }
        for (&x, &phi) in xs.iter().zip(phases) {
            for (s, &a) in self.sums.iter_mut().zip(&self.grid) {
                s.add(self.table.eval(xi(x, phi, a), 0)?);
            }
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &PhaseSensitiveAccumulator<'_>) {
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            a.merge(b);
        }
    }

    pub fn finish(&self) -> Result<QuasiprobEstimate> {
        let n = self.sums.first().map_or(0, |s| s.count()) as usize;
        if n < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: n });
        }
        Ok(QuasiprobEstimate {
            filter: self.table.filter(),
            grid: EstimateGrid::Complex(self.grid.clone()),
            values: self.sums.iter().map(|s| s.mean()).collect(),
            stderr: self.sums.iter().map(|s| s.stderr()).collect(),
            n,
            numerical_error: self.table.numerical_error(),
        })
    }
}

fn check_complex_grid(grid: &[Complex64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty α grid".into()));
    }
    if grid.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
        return Err(Error::InvalidGrid("α grid values must be finite".into()));
    }
    Ok(())
}

/// `ξ` range needed for `data` on `grid`, with a unit margin.
pub fn phase_sensitive_range(data: &QuadratureDataset, grid: &[Complex64]) -> f64 {
    let (lo, hi) = data.range();
    let a = grid.iter().map(|a| a.norm()).fold(0.0, f64::max);
    lo.abs().max(hi.abs()) + 2.0 * a + 1.0
}

/// Pattern table suitable for [`PhaseSensitiveAccumulator`].
pub fn phase_sensitive_table(
    data: &QuadratureDataset,
    filter: &Filter,
    grid: &[Complex64],
    opts: &PatternTableOptions,
) -> Result<PatternTable> {
    check_complex_grid(grid)?;
    let x = phase_sensitive_range(data, grid);
    build_pattern_table(filter, (-x, x), &[0.0], opts)
}

/// Phase-sensitive estimate at arbitrary phase-space points.
pub fn estimate_phase_sensitive(
    data: &QuadratureDataset,
    filter: &Filter,
    alpha_grid: &[Complex64],
) -> Result<QuasiprobEstimate> {
    let phases = data.phases().ok_or(Error::MissingPhases)?;
    if data.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: data.len() });
    }
    let table = phase_sensitive_table(data, filter, alpha_grid, &PatternTableOptions::default())?;
    let mut acc = PhaseSensitiveAccumulator::new(&table, alpha_grid)?;
    acc.add_samples(data.samples(), phases)?;
    acc.finish()
}

/// Tail values above this many standard errors mean the radial grid is
/// too short for [`normalization_check`].
pub const TAIL_SIGNIFICANCE: f64 = 3.0;
/// ...unless the tail is negligible anyway: `π r² |P|` at the last radius
/// below this is ignored.
pub const TAIL_MASS_FLOOR: f64 = 1e-3;

/// `2π ∫ r P(r) dr` over the radial grid by the trapezoidal rule, refusing
/// grids whose last value is still significant.
pub fn normalization_check(est: &QuasiprobEstimate) -> Result<f64> {
    let integral = normalization_integral(est)?;
    let last = est.values.len() - 1;
    let r = est.grid.abs(last);
    let tail = est.values[last].abs();
    if tail > TAIL_SIGNIFICANCE * est.stderr[last] && PI * r * r * tail > TAIL_MASS_FLOOR {
        return Err(Error::TailSignificant { value: est.values[last], stderr: est.stderr[last] });
    }
    Ok(integral)
}

/// The trapezoidal integral of [`normalization_check`] without the tail test.
pub fn normalization_integral(est: &QuasiprobEstimate) -> Result<f64> {
    let EstimateGrid::Radial(r) = &est.grid else {
        return Err(Error::InvalidGrid("normalization needs a radial grid".into()));
    };
    if r.len() < 2 || r[0] != 0.0 {
        return Err(Error::InvalidGrid("normalization needs a radial grid starting at 0 with at least 2 points".into()));
    }
    let integral: f64 = (0..r.len() - 1)
        .map(|i| 0.5 * (r[i + 1] - r[i]) * (r[i] * est.values[i] + r[i + 1] * est.values[i + 1]))
        .sum();
    Ok(2.0 * PI * integral)
}
