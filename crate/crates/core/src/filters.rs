//! Radial filter functions `Ω(b)`, `b = |β|`.
//!
//! Three families are supported:
//!
//! * `Gaussian { s }`: `Ω(b) = exp(-(1 - s) b² / 2)`, the filter behind the
//!   `s`-parametrized quasiprobabilities;
//! * `InfinityQ { w }`: the closed-form `q → ∞` nonclassicality filter, the
//!   normalized autocorrelation of a disk of radius `w`, supported on
//!   `b ≤ 2w`;
//! * `FiniteQ { q, w }`: the autocorrelation of
//!   `χ(β) ∝ exp(-(|β| / w)^q)` for `2 < q < ∞`, tabulated numerically.
//!
//! All filters satisfy `Ω(0) = 1` and `0 ≤ Ω ≤ 1`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math::{acos, exp, lgamma, log, powf, sin, sq, sqrt, PI};
use crate::numeric::{even_function_slopes, hermite_basis, GaussLegendre};

/// Nodes in a finite-`q` filter table.
pub const FILTER_TABLE_NODES: usize = 2000;
/// Default relative tolerance of the finite-`q` autocorrelation integrals.
pub const DEFAULT_FILTER_REL_TOL: f64 = 1e-9;
/// `Ω(b) e^{b²/2}` at the table end, relative to its maximum.
const SUPPORT_DECAY: f64 = 1e-10;
/// Largest `b²/2` allowed in a pattern integrand, `ln(1e300)`.
const MAX_LN_WEIGHT: f64 = 690.7755278982137;
/// Gaussian pattern integrals stop where `e^{s b²/2}` drops below this.
const GAUSSIAN_TAIL: f64 = 1e-14;

/// Filter family and parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterSpec {
    Gaussian { s: f64 },
    InfinityQ { w: f64 },
    FiniteQ { q: f64, w: f64 },
}

impl FilterSpec {
    /// Checks parameter ranges for bare evaluation.
    pub fn validate(&self) -> Result<()> {
        match *self {
            FilterSpec::Gaussian { s } if !(s.is_finite() && s <= 1.0) => {
                Err(Error::InvalidFilter(format!("Gaussian filter needs s <= 1, got {s}")))
            }
            FilterSpec::InfinityQ { w } | FilterSpec::FiniteQ { w, .. } if !(w.is_finite() && w > 0.0) => {
                Err(Error::InvalidFilter(format!("filter width must be positive, got {w}")))
            }
            FilterSpec::FiniteQ { q, .. } if !(q.is_finite() && q > 2.0) => {
                Err(Error::InvalidFilter(format!("q must be finite and > 2, got {q}")))
            }
            _ => Ok(()),
        }
    }

    /// Width parameter of the nonclassicality filters.
    pub fn width(&self) -> Option<f64> {
        match *self {
            FilterSpec::Gaussian { .. } => None,
            FilterSpec::InfinityQ { w } | FilterSpec::FiniteQ { w, .. } => Some(w),
        }
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterSpec::Gaussian { s } => write!(f, "gaussian(s={s})"),
            FilterSpec::InfinityQ { w } => write!(f, "inf-q(w={w})"),
            FilterSpec::FiniteQ { q, w } => write!(f, "finite-q(q={q},w={w})"),
        }
    }
}

/// A filter ready for evaluation; finite-`q` filters carry their table.
#[derive(Debug, Clone, PartialEq)]
pub struct Filter {
    spec: FilterSpec,
    table: Option<RadialFilterTable>,
}

impl Filter {
    /// Validates `spec` and, for `FiniteQ`, builds the table at the default
    /// tolerance.
    pub fn new(spec: FilterSpec) -> Result<Self> {
        spec.validate()?;
        let table = match spec {
            FilterSpec::FiniteQ { q, w } => Some(build_finite_q_table(q, w, DEFAULT_FILTER_REL_TOL)?),
            _ => None,
        };
        Ok(Self { spec, table })
    }

    pub fn from_table(table: RadialFilterTable) -> Self {
        Self { spec: FilterSpec::FiniteQ { q: table.q, w: table.w }, table: Some(table) }
    }

    pub fn spec(&self) -> FilterSpec {
        self.spec
    }

    pub fn table(&self) -> Option<&RadialFilterTable> {
        self.table.as_ref()
    }

    pub fn eval(&self, b: f64) -> Result<f64> {
        if b < 0.0 || b.is_nan() {
            return Err(Error::NegativeRadius(b));
        }
        Ok(self.value(b))
    }

    pub(crate) fn value(&self, b: f64) -> f64 {
        match (self.spec, &self.table) {
            (FilterSpec::Gaussian { s }, _) => exp(-0.5 * (1.0 - s) * b * b),
            (FilterSpec::InfinityQ { w }, _) => disk_autocorrelation(b / (2.0 * w)),
            (FilterSpec::FiniteQ { .. }, Some(t)) => t.eval(b),
            (FilterSpec::FiniteQ { .. }, None) => unreachable!("finite-q filter without table"),
        }
    }

    /// `e^{b²/2} Ω(b)`, combined so that neither factor overflows alone.
    pub(crate) fn weighted(&self, b: f64) -> f64 {
        match (self.spec, &self.table) {
            (FilterSpec::Gaussian { s }, _) => exp(0.5 * s * b * b),
            (FilterSpec::InfinityQ { w }, _) => exp(0.5 * b * b) * disk_autocorrelation(b / (2.0 * w)),
            (FilterSpec::FiniteQ { .. }, Some(t)) => exp(0.5 * b * b + t.ln_eval(b)),
            (FilterSpec::FiniteQ { .. }, None) => unreachable!("finite-q filter without table"),
        }
    }

    /// Upper integration limit for pattern-function integrals.
    pub fn pattern_cutoff(&self) -> Result<f64> {
        let b_max = match (self.spec, &self.table) {
            (FilterSpec::Gaussian { s }, _) => {
                if s >= 0.0 {
                    return Err(Error::NonIntegrable(s));
                }
                return Ok(sqrt(-2.0 * log(GAUSSIAN_TAIL) / -s));
            }
            (FilterSpec::InfinityQ { w }, _) => 2.0 * w,
            (FilterSpec::FiniteQ { .. }, Some(t)) => t.b_support,
            (FilterSpec::FiniteQ { .. }, None) => unreachable!("finite-q filter without table"),
        };
        if 0.5 * b_max * b_max > MAX_LN_WEIGHT {
            return Err(Error::Overflow { b_max });
        }
        Ok(b_max)
    }
}

/// Evaluates `Ω(b)` for `spec`. Finite-`q` filters build their table on
/// every call; keep a [`Filter`] around for repeated use.
pub fn eval_filter(spec: FilterSpec, b: f64) -> Result<f64> {
    Filter::new(spec)?.eval(b)
}

/// `(2/π)[arccos u - u sqrt(1 - u²)]` for `u = b / 2w`, zero for `u ≥ 1`.
///
/// Written as `(z - sin z)/π` with `z = 2 arccos u`, which stays accurate
/// near the support edge.
pub(crate) fn disk_autocorrelation(u: f64) -> f64 {
    if u >= 1.0 {
        return 0.0;
    }
    disk_autocorrelation_angle(acos(u))
}

/// Same as [`disk_autocorrelation`] parametrized by `φ = arccos u`.
pub(crate) fn disk_autocorrelation_angle(phi: f64) -> f64 {
    let z = 2.0 * phi;
    if z < 0.05 {
        let z2 = z * z;
        z * z2 * (1.0 / 6.0 - z2 * (1.0 / 120.0 - z2 * (1.0 / 5040.0 - z2 / 362880.0))) / PI
    } else {
        (z - sin(z)) / PI
    }
}

/// Tabulated finite-`q` filter. `ln Ω` is stored and interpolated with
/// cubic Hermite splines, which keeps relative accuracy in the far tail
/// where `e^{b²/2}` amplifies errors.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFilterTable {
    q: f64,
    w: f64,
    b_grid: Vec<f64>,
    ln_values: Vec<f64>,
    slopes: Vec<f64>,
    b_support: f64,
}

impl RadialFilterTable {
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn b_grid(&self) -> &[f64] {
        &self.b_grid
    }

    pub fn ln_values(&self) -> &[f64] {
        &self.ln_values
    }

    pub fn values(&self) -> Vec<f64> {
        self.ln_values.iter().map(|&l| exp(l)).collect()
    }

    /// Radius beyond which `Ω` is treated as zero.
    pub fn b_support(&self) -> f64 {
        self.b_support
    }

    pub fn eval(&self, b: f64) -> f64 {
        exp(self.ln_eval(b))
    }

    pub fn ln_eval(&self, b: f64) -> f64 {
        if b > self.b_support {
            return f64::NEG_INFINITY;
        }
        let n = self.b_grid.len();
        let h = self.b_grid[1] - self.b_grid[0];
        let pos = b / h;
        let i = (libm::floor(pos) as usize).min(n - 2);
        let t = pos - i as f64;
        let (h00, h10, h01, h11) = hermite_basis(t);
        h00 * self.ln_values[i] + h10 * h * self.slopes[i] + h01 * self.ln_values[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

/// Builds the finite-`q` filter table by direct 2-D polar quadrature of the
/// autocorrelation at each node, to relative accuracy `rel_tol`.
pub fn build_finite_q_table(q: f64, w: f64, rel_tol: f64) -> Result<RadialFilterTable> {
    FilterSpec::FiniteQ { q, w }.validate()?;
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidArgument(format!("rel_tol must be in (0, 1), got {rel_tol}")));
    }
    let unit = UnitAutocorrelation::new(q);
    // everything below runs in units of w, where Ω_w(b) = Ω_1(b / w)
    let decay = |bu: f64, ln_omega: f64| ln_omega + 0.5 * sq(w * bu);
    let ln_floor = log(SUPPORT_DECAY);

    let step = 0.05;
    let mut best = f64::NEG_INFINITY;
    let mut support = None;
    for i in 0..4000 {
        let bu = step * i as f64;
        let g = decay(bu, unit.ln_omega(bu, rel_tol)?);
        if g > best {
            best = g;
        } else if g < best + ln_floor - 1.0 {
            support = Some(bu);
            break;
        }
    }
    let mut support = support.ok_or_else(|| Error::InvalidFilter("filter table support not found".to_string()))?;

    loop {
        let nodes = FILTER_TABLE_NODES;
        let h = support / (nodes - 1) as f64;
        let grid: Vec<f64> = (0..nodes).map(|i| h * i as f64).collect();
        let ln_values = grid.iter().map(|&bu| unit.ln_omega(bu, rel_tol)).collect::<Result<Vec<_>>>()?;
        let peak = grid.iter().zip(&ln_values).map(|(&bu, &l)| decay(bu, l)).fold(f64::NEG_INFINITY, f64::max);
        if decay(support, ln_values[nodes - 1]) >= peak + ln_floor {
            support *= 1.1;
            continue;
        }
        let b_grid: Vec<f64> = grid.iter().map(|bu| bu * w).collect();
        let slopes = even_function_slopes(h * w, &ln_values);
        return Ok(RadialFilterTable { q, w, b_support: support * w, b_grid, ln_values, slopes });
    }
}

/// Autocorrelation of the unit-width `χ`, evaluated in log space.
struct UnitAutocorrelation {
    q: f64,
    ln_norm_sq: f64,
    rule: GaussLegendre,
}

impl UnitAutocorrelation {
    fn new(q: f64) -> Self {
        let ln_norm_sq = 2.0 / q * core::f64::consts::LN_2 + log(q) - log(2.0 * PI) - lgamma(2.0 / q);
        Self { q, ln_norm_sq, rule: GaussLegendre::new(12) }
    }

    /// `ln Ω_1(b)`. Writing `β = 2c` along the real axis and centering the
    /// integration at `-β/2`, `Ω_1 = C² e^{-2c^q} ∫ d²u e^{-E(u)}` with
    /// `E = |u - c|^q + |u + c|^q - 2c^q ≥ 0`, minimal at `u = 0`.
    fn ln_omega(&self, b: f64, rel_tol: f64) -> Result<f64> {
        let q = self.q;
        let c = 0.5 * b;
        let cq = powf(c, q);
        // E along the slowest (perpendicular) direction reaches 50 at rho_max
        let rho_max = if c > 0.0 {
            c * sqrt(libm::expm1(2.0 / q * libm::log1p(25.0 / cq)))
        } else {
            powf(25.0, 1.0 / q)
        };
        let exponent = |rho: f64, cos_t: f64| -> f64 {
            if c == 0.0 {
                return 2.0 * powf(rho, q);
            }
            let a = rho * rho / (c * c);
            let cross = 2.0 * rho * cos_t / c;
            let term = |d: f64| libm::expm1(0.5 * q * libm::log1p(d));
            cq * (term(a - cross) + term(a + cross))
        };

        let mut last = f64::NAN;
        let mut panels = 2usize;
        for _ in 0..8 {
            let mut radial = Vec::new();
            if c > 0.0 && c < rho_max {
                self.rule.push_composite(0.0, c, panels, &mut radial);
                self.rule.push_composite(c, rho_max, panels, &mut radial);
            } else {
                self.rule.push_composite(0.0, rho_max, 2 * panels, &mut radial);
            }
            let mut angular = Vec::new();
            self.rule.push_composite(0.0, 0.5 * PI, panels, &mut angular);
            let angular: Vec<(f64, f64)> = angular.into_iter().map(|(t, wt)| (libm::cos(t), wt)).collect();

            let mut total = 0.0;
            for &(rho, wr) in &radial {
                let mut inner = 0.0;
                for &(cos_t, wt) in &angular {
                    inner += wt * exp(-exponent(rho, cos_t));
                }
                total += wr * rho * inner;
            }
            let integral = 4.0 * total;
            if (integral - last).abs() <= rel_tol * integral {
                return Ok(self.ln_norm_sq - 2.0 * cq + log(integral));
            }
            last = integral;
            panels *= 2;
        }
        Err(Error::NonConvergence { what: "finite-q autocorrelation", change: last })
    }
}
