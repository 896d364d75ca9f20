//! Text and JSON file formats.
//!
//! Datasets are UTF-8 text with one sample per line (`x`) or one
//! phase-tagged sample per line (`x,phi`). Blank lines and lines starting
//! with `#` are skipped. Curves are written as CSV, summaries as JSON.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use quasiprob_core::diagnostics::{EfficiencyEstimate, PhotonDistribution, VarianceEstimate};
use quasiprob_core::{EstimateGrid, FilterSpec, PatternTable, QuadratureDataset, QuasiprobEstimate, RadialFilterTable, ScanResult};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Plain,
    Phased,
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no samples found")]
    Empty,
    #[error(transparent)]
    Data(#[from] quasiprob_core::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FormatError + '_ {
    move |source| FormatError::Io { path: path.to_path_buf(), source }
}

fn parse_number(field: &str, line: usize) -> Result<f64, FormatError> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| FormatError::Parse { line, msg: format!("not a number: {:?}", field.trim()) })?;
    if !v.is_finite() {
        return Err(FormatError::Parse { line, msg: format!("non-finite value {v}") });
    }
    Ok(v)
}

/// Parses dataset text. Line numbers in errors are 1-based.
pub fn parse_quadratures(text: &str, format: DataFormat, source: &str) -> Result<QuadratureDataset, FormatError> {
    let mut samples = Vec::new();
    let mut phases = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        match format {
            DataFormat::Plain => {
                if s.contains(',') {
                    return Err(FormatError::Parse { line, msg: "expected one value per line".into() });
                }
                samples.push(parse_number(s, line)?);
            }
            DataFormat::Phased => {
                let mut it = s.split(',');
                let (Some(x), Some(phi), None) = (it.next(), it.next(), it.next()) else {
                    return Err(FormatError::Parse { line, msg: "expected \"x,phi\"".into() });
                };
                let x = parse_number(x, line)?;
                let phi = parse_number(phi, line)?;
                if !(0.0..std::f64::consts::TAU).contains(&phi) {
                    return Err(FormatError::Parse { line, msg: format!("phase {phi} outside [0, 2π)") });
                }
                samples.push(x);
                phases.push(phi);
            }
        }
    }
    if samples.is_empty() {
        return Err(FormatError::Empty);
    }
    Ok(match format {
        DataFormat::Plain => QuadratureDataset::new(samples, source)?,
        DataFormat::Phased => QuadratureDataset::with_phases(samples, phases, source)?,
    })
}

pub fn load_quadratures(path: &Path, format: DataFormat) -> Result<QuadratureDataset, FormatError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_quadratures(&text, format, &path.display().to_string())
}

/// Dataset text in the format implied by the presence of phases. Values
/// use the shortest representation that round-trips.
pub fn format_quadratures(data: &QuadratureDataset) -> String {
    let mut out = String::with_capacity(data.len() * 22);
    match data.phases() {
        None => data.samples().iter().for_each(|x| writeln!(out, "{x}").unwrap()),
        Some(ph) => data.samples().iter().zip(ph).for_each(|(x, p)| writeln!(out, "{x},{p}").unwrap()),
    }
    out
}

pub fn write_quadratures(path: &Path, data: &QuadratureDataset) -> Result<(), FormatError> {
    fs::write(path, format_quadratures(data)).map_err(io_err(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, text).map_err(io_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    write_text(path, &s)
}

/// Serializable mirror of [`FilterSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FilterJson {
    Gaussian { s: f64 },
    InfQ { w: f64 },
    FiniteQ { q: f64, w: f64 },
}

impl From<FilterSpec> for FilterJson {
    fn from(f: FilterSpec) -> Self {
        match f {
            FilterSpec::Gaussian { s } => Self::Gaussian { s },
            FilterSpec::InfinityQ { w } => Self::InfQ { w },
            FilterSpec::FiniteQ { q, w } => Self::FiniteQ { q, w },
        }
    }
}

impl From<FilterJson> for FilterSpec {
    fn from(f: FilterJson) -> Self {
        match f {
            FilterJson::Gaussian { s } => Self::Gaussian { s },
            FilterJson::InfQ { w } => Self::InfinityQ { w },
            FilterJson::FiniteQ { q, w } => Self::FiniteQ { q, w },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

/// `r,P,sigma` rows for radial estimates, `re,im,P,sigma` otherwise.
pub fn estimate_csv(est: &QuasiprobEstimate) -> String {
    let mut out = String::new();
    match &est.grid {
        EstimateGrid::Radial(r) => {
            out.push_str("r,P,sigma\n");
            for i in 0..r.len() {
                writeln!(out, "{},{},{}", r[i], est.values[i], est.stderr[i]).unwrap();
            }
        }
        EstimateGrid::Complex(a) => {
            out.push_str("re,im,P,sigma\n");
            for i in 0..a.len() {
                writeln!(out, "{},{},{},{}", a[i].re, a[i].im, est.values[i], est.stderr[i]).unwrap();
            }
        }
    }
    out
}

/// JSON summary of an analysis run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: String,
    pub format: DataFormat,
    pub vacuum: Option<String>,
    pub filter: FilterJson,
    pub n: usize,
    pub mode: String,
    pub grid_points: usize,
    pub grid_max: f64,
    pub grid_step: f64,
    pub table_x_step: Option<f64>,
    pub table_validation_error: Option<f64>,
    pub validation_seed: u64,
    pub sigma_signed: f64,
    pub argmin_alpha: ComplexJson,
    pub value_at_argmin: f64,
    pub stderr_at_argmin: f64,
    /// Numerical error bound folded into the significance.
    pub numerical_error: f64,
    pub significant: bool,
    pub normalization: Option<f64>,
    pub normalization_note: Option<String>,
}

pub fn scan_csv(scan: &ScanResult) -> String {
    let mut out = String::from("w,sigma,argmin_alpha\n");
    for p in &scan.points {
        writeln!(out, "{},{},{}", p.w, p.sigma, p.argmin_alpha).unwrap();
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanPointJson {
    pub w: f64,
    pub sigma: f64,
    pub argmin_alpha: f64,
}

/// Table-I-style scan summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub input: String,
    pub family: String,
    pub eta_tag: Option<f64>,
    pub n: usize,
    pub sigma_max_abs: Option<f64>,
    pub w_opt: f64,
    pub sigma_at_w_opt: f64,
    pub significant: bool,
    pub interior_optimum: bool,
    pub negativity: bool,
    pub alpha_max: f64,
    pub alpha_step: f64,
    pub validation_seed: u64,
    pub points: Vec<ScanPointJson>,
}

impl ScanReport {
    pub fn new(scan: &ScanResult, input: &str, eta_tag: Option<f64>, alpha: (f64, f64), seed: u64) -> Self {
        Self {
            input: input.to_string(),
            family: scan.family.to_string(),
            eta_tag,
            n: scan.n,
            sigma_max_abs: scan.sigma_max_abs(),
            w_opt: scan.w_opt(),
            sigma_at_w_opt: scan.sigma_opt(),
            significant: scan.is_significant(),
            interior_optimum: scan.has_interior_optimum(),
            negativity: scan.sigma_max_abs().is_some(),
            alpha_max: alpha.0,
            alpha_step: alpha.1,
            validation_seed: seed,
            points: scan.points.iter().map(|p| ScanPointJson { w: p.w, sigma: p.sigma, argmin_alpha: p.argmin_alpha }).collect(),
        }
    }
}

pub fn filter_table_csv(table: &RadialFilterTable) -> String {
    let mut out = String::from("b,omega,ln_omega\n");
    for (b, l) in table.b_grid().iter().zip(table.ln_values()) {
        writeln!(out, "{b},{},{l}", l.exp()).unwrap();
    }
    out
}

/// Node values `x,r,f` of a pattern table (non-negative `x` only; the
/// table is even in `x`).
pub fn pattern_table_csv(table: &PatternTable) -> String {
    let mut out = String::from("x,r,f\n");
    for i in 0..table.nodes() {
        let x = i as f64 * table.x_step();
        for (k, r) in table.alpha_grid().iter().enumerate() {
            writeln!(out, "{x},{r},{}", table.node_value(i, k)).unwrap();
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub input: String,
    pub n: usize,
    pub n_photons: usize,
    pub var: f64,
    pub var_stderr: f64,
    pub eta: f64,
    pub eta_stderr: f64,
    pub eta_out_of_range: bool,
    pub photon_probs: Vec<f64>,
    pub photon_stderr: Vec<f64>,
    pub condition_number: f64,
    pub ill_conditioned: bool,
    pub bins: usize,
    pub resamples: usize,
    pub seed: u64,
}

impl DiagnosticsReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        input: &str,
        n: usize,
        n_photons: usize,
        var: VarianceEstimate,
        eta: EfficiencyEstimate,
        photons: &PhotonDistribution,
        bins: usize,
        resamples: usize,
        seed: u64,
    ) -> Self {
        Self {
            input: input.to_string(),
            n,
            n_photons,
            var: var.var,
            var_stderr: var.stderr,
            eta: eta.eta,
            eta_stderr: eta.stderr,
            eta_out_of_range: eta.out_of_range,
            photon_probs: photons.probs.clone(),
            photon_stderr: photons.stderr.clone(),
            condition_number: photons.condition_number,
            ill_conditioned: photons.ill_conditioned,
            bins,
            resamples,
            seed,
        }
    }
}

/// Sidecar describing how a synthetic dataset was generated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationSidecar {
    pub kind: String,
    pub n_photons: Option<usize>,
    pub eta: Option<f64>,
    pub weights: Option<Vec<f64>>,
    pub amplitude: Option<ComplexJson>,
    pub phase_mode: Option<String>,
    pub n: usize,
    pub seed: u64,
    pub format: DataFormat,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_and_phased() {
        let d = parse_quadratures("1.0\n-0.5\n", DataFormat::Plain, "t").unwrap();
        assert_eq!(d.samples(), &[1.0, -0.5]);
        assert!(d.phases().is_none());
        let d = parse_quadratures("1.0,0.0\n0.2,3.0\n", DataFormat::Phased, "t").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.phases().unwrap(), &[0.0, 3.0]);
    }

    #[test]
    fn reports_line_numbers() {
        match parse_quadratures("abc\n", DataFormat::Plain, "t") {
            Err(FormatError::Parse { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_quadratures("1.0\n\n2.0,1.0\n", DataFormat::Plain, "t") {
            Err(FormatError::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_quadratures("1.0,7.0\n", DataFormat::Phased, "t") {
            Err(FormatError::Parse { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_quadratures("\n# nothing\n", DataFormat::Plain, "t"), Err(FormatError::Empty)));
    }

    #[test]
    fn round_trips_exactly() {
        let xs = vec![0.1, -1.0 / 3.0, 1e-300, 12.5];
        let d = QuadratureDataset::new(xs.clone(), "t").unwrap();
        let back = parse_quadratures(&format_quadratures(&d), DataFormat::Plain, "t").unwrap();
        assert_eq!(back.samples(), xs.as_slice());
    }

    #[test]
    fn filter_json_tags() {
        let s = serde_json::to_string(&FilterJson::from(FilterSpec::InfinityQ { w: 1.65 })).unwrap();
        assert_eq!(s, r#"{"family":"inf-q","w":1.65}"#);
    }
}
