//! Filter-width scans: `Σ(w)` over a grid of widths for one filter family.

use alloc::format;
use alloc::vec::Vec;

use crate::data::QuadratureDataset;
use crate::error::{Error, Result};
use crate::estimator::{estimate_phase_averaged, QuasiprobEstimate};
use crate::filters::{Filter, FilterSpec};
use crate::pattern::{build_pattern_table, check_radial_grid, PatternTableOptions};
use crate::SIGNIFICANT_SIGMA;

/// Nonclassicality filter family with a free width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterFamily {
    InfinityQ,
    FiniteQ { q: f64 },
}

impl FilterFamily {
    pub fn spec(&self, w: f64) -> FilterSpec {
        match *self {
            Self::InfinityQ => FilterSpec::InfinityQ { w },
            Self::FiniteQ { q } => FilterSpec::FiniteQ { q, w },
        }
    }
}

impl core::fmt::Display for FilterFamily {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::InfinityQ => write!(f, "inf-q"),
            Self::FiniteQ { q } => write!(f, "finite-q(q={q})"),
        }
    }
}

/// `w = 1.0, 1.05, …, 2.6`.
pub fn default_w_grid() -> Vec<f64> {
    (0..=32).map(|i| 1.0 + i as f64 * 0.05).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub w: f64,
    pub sigma: f64,
    pub argmin_alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub family: FilterFamily,
    pub n: usize,
    pub points: Vec<ScanPoint>,
    /// Index into `points` of the most negative `Σ` (smallest `w` on ties).
    pub opt: usize,
}

impl ScanResult {
    /// Assembles a result from per-width points, which must be in strictly
    /// ascending `w`.
    pub fn from_points(family: FilterFamily, n: usize, points: Vec<ScanPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("empty w grid".into()));
        }
        if points.windows(2).any(|p| p[1].w <= p[0].w) {
            return Err(Error::InvalidGrid("w grid must be strictly ascending".into()));
        }
        let mut opt = 0;
        for (i, p) in points.iter().enumerate() {
            if p.sigma < points[opt].sigma {
                opt = i;
            }
        }
        Ok(Self { family, n, points, opt })
    }

    pub fn w_opt(&self) -> f64 {
        self.points[self.opt].w
    }

    pub fn sigma_opt(&self) -> f64 {
        self.points[self.opt].sigma
    }

    /// `|Σ(w_opt)|` if any width shows a negativity, else `None`.
    pub fn sigma_max_abs(&self) -> Option<f64> {
        let s = self.sigma_opt();
        (s < 0.0).then(|| s.abs())
    }

    /// `Σ(w_opt) ≤ -5`.
    pub fn is_significant(&self) -> bool {
        self.sigma_opt() <= SIGNIFICANT_SIGMA
    }

    /// The optimum is negative and strictly below both grid endpoints, so
    /// the negativity significance peaks inside the scanned range.
    pub fn has_interior_optimum(&self) -> bool {
        let s = self.sigma_opt();
        let (first, last) = (self.points[0].sigma, self.points[self.points.len() - 1].sigma);
        s < 0.0 && s < first && s < last
    }
}

/// Validates a width grid: non-empty, positive, strictly ascending.
pub fn check_w_grid(w_grid: &[f64]) -> Result<()> {
    if w_grid.is_empty() {
        return Err(Error::InvalidGrid("empty w grid".into()));
    }
    if let Some(w) = w_grid.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::InvalidGrid(format!("filter widths must be positive, got {w}")));
    }
    if w_grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidGrid("w grid must be strictly ascending".into()));
    }
    Ok(())
}

/// Estimate for a single width, with the pattern table spanning the data
/// range plus a unit margin.
pub fn estimate_at_width(
    data: &QuadratureDataset,
    family: FilterFamily,
    w: f64,
    alpha_grid: &[f64],
    opts: &PatternTableOptions,
) -> Result<QuasiprobEstimate> {
    let filter = Filter::new(family.spec(w))?;
    let (lo, hi) = data.range();
    let table = build_pattern_table(&filter, (lo - 1.0, hi + 1.0), alpha_grid, opts)?;
    estimate_phase_averaged(data, &table)
}

pub fn scan_point(
    data: &QuadratureDataset,
    family: FilterFamily,
    w: f64,
    alpha_grid: &[f64],
    opts: &PatternTableOptions,
) -> Result<ScanPoint> {
    let est = estimate_at_width(data, family, w, alpha_grid, opts)?;
    let sig = est.significance()?;
    Ok(ScanPoint { w, sigma: sig.sigma, argmin_alpha: sig.alpha.re })
}

/// Sequential scan; the `quasiprob` crate runs widths in parallel.
pub fn scan_filter_width(
    data: &QuadratureDataset,
    family: FilterFamily,
    w_grid: &[f64],
    alpha_grid: &[f64],
    opts: &PatternTableOptions,
) -> Result<ScanResult> {
    check_w_grid(w_grid)?;
    check_radial_grid(alpha_grid)?;
    let points = w_grid
        .iter()
        .map(|&w| scan_point(data, family, w, alpha_grid, opts))
        .collect::<Result<Vec<_>>>()?;
    ScanResult::from_points(family, data.len(), points)
}
