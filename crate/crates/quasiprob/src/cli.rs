//! Command-line front end.
//!
//! Every subcommand accepts `--config file.json`, a flat JSON object with
//! the same keys as the long flags (dashes replaced by underscores). Flags
//! given on the command line take precedence over the file.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use quasiprob_core::data::{sample_coherent, sample_fock_mixture};
use quasiprob_core::diagnostics::{estimate_efficiency, fit_photon_distribution, quadrature_variance, PhotonFitOptions};
use quasiprob_core::estimator::normalization_check;
use quasiprob_core::oracles::identity_checks;
use quasiprob_core::pattern::build_pattern_table;
use quasiprob_core::{
    Filter, FilterFamily, FilterSpec, FockMixture, PatternTableOptions, PhaseMode, QuadratureDataset, SIGNIFICANT_SIGMA,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::formats::{self, AnalysisReport, ComplexJson, DataFormat, DiagnosticsReport, ScanReport, SimulationSidecar};
use crate::parallel;

#[derive(Debug, Parser)]
#[command(name = "quasiprob", version, about = "Filtered quasiprobabilities from homodyne quadrature data")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic quadrature data.
    Simulate(SimulateArgs),
    /// Estimate a filtered quasiprobability and its significance.
    Analyze(AnalyzeArgs),
    /// Scan the filter width and report the most significant negativity.
    ScanW(ScanArgs),
    /// Quadrature variance, efficiency and photon-number fit.
    Diagnose(DiagnoseArgs),
    /// Evaluate the reference identities and print a pass/fail table.
    OracleCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FilterKind {
    Gaussian,
    InfQ,
    FiniteQ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseModeArg {
    Uniform,
    Grid,
}

/// Fills unset fields of `$a` from `$b`.
macro_rules! overlay {
    ($a:ident, $b:ident; $($f:ident),* $(,)?) => {
        $( if $a.$f.is_none() { $a.$f = $b.$f; } )*
    };
}

fn read_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Photon number of the lossy Fock state.
    #[arg(long)]
    pub fock: Option<usize>,
    /// Efficiency applied to the Fock state.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Explicit Fock weights p0,p1,... instead of --fock/--eta.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mixture: Option<Vec<f64>>,
    /// Coherent amplitude re,im (writes phased data).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coherent: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub phase_mode: Option<PhaseModeArg>,
    /// Number of samples.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<DataFormat>,
    /// Vacuum reference used to normalize the quadratures.
    #[arg(long)]
    pub vacuum: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub filter: Option<FilterKind>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Largest |α| of the grid (default 3.5).
    #[arg(long)]
    pub alpha_max: Option<f64>,
    /// Grid spacing (default 0.05 radial, 0.25 phase-sensitive).
    #[arg(long)]
    pub alpha_step: Option<f64>,
    /// Use the phases and estimate on a square grid in the complex plane.
    #[arg(long)]
    pub phase_sensitive: bool,
    /// Drop the phases of phased data and run the phase-averaged estimator.
    #[arg(long)]
    pub ignore_phases: bool,
    /// Seed for the pattern-table self-check.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output prefix; writes PREFIX.csv and PREFIX.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also dump the pattern table (and finite-q filter table) as CSV.
    #[arg(long)]
    pub dump_tables: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub vacuum: Option<PathBuf>,
    /// Filter family; `gaussian` is not scannable.
    #[arg(long, value_enum)]
    pub family: Option<FilterKind>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Explicit widths; defaults to 1.0, 1.05, ..., 2.6.
    #[arg(long, value_delimiter = ',')]
    pub w_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub alpha_step: Option<f64>,
    /// Efficiency label copied into the summary.
    #[arg(long)]
    pub eta_tag: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output prefix; writes PREFIX.csv and PREFIX.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnoseArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub vacuum: Option<PathBuf>,
    /// Nominal photon number used for the efficiency estimate.
    #[arg(long)]
    pub n_photons: Option<usize>,
    /// Largest photon number in the distribution fit (default 4).
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub resamples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<i32> {
    if let Some(t) = cli.threads {
        ensure!(t >= 1, "--threads must be at least 1");
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring thread pool")?;
    }
    match cli.command {
        Command::Simulate(a) => simulate(a).map(|_| 0),
        Command::Analyze(a) => analyze(a).map(|_| 0),
        Command::ScanW(a) => scan(a).map(|_| 0),
        Command::Diagnose(a) => diagnose(a).map(|_| 0),
        Command::OracleCheck => oracle_check(),
    }
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.with_context(|| format!("missing required --{flag}"))
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn simulate(mut a: SimulateArgs) -> Result<()> {
    let file: SimulateArgs = read_config(a.config.as_deref())?;
    overlay!(a, file; fock, eta, mixture, coherent, phase_mode, n, seed, out);
    let n = required(a.n, "n")?;
    ensure!(n >= 1, "--n must be at least 1");
    let seed = a.seed.unwrap_or(0);
    let out = required(a.out, "out")?;

    let (data, sidecar) = if let Some(c) = &a.coherent {
        ensure!(a.fock.is_none() && a.mixture.is_none(), "--coherent excludes --fock and --mixture");
        ensure!(c.len() == 2, "--coherent takes re,im");
        let mode = a.phase_mode.unwrap_or(PhaseModeArg::Uniform);
        let pm = match mode {
            PhaseModeArg::Uniform => PhaseMode::UniformRandom,
            PhaseModeArg::Grid => PhaseMode::Grid,
        };
        let data = sample_coherent(Complex64::new(c[0], c[1]), n, pm, seed)?;
        let side = SimulationSidecar {
            kind: "coherent".into(),
            n_photons: None,
            eta: None,
            weights: None,
            amplitude: Some(ComplexJson { re: c[0], im: c[1] }),
            phase_mode: Some(format!("{mode:?}").to_lowercase()),
            n,
            seed,
            format: DataFormat::Phased,
        };
        (data, side)
    } else {
        let (mix, fock, eta) = match (&a.mixture, a.fock) {
            (Some(w), None) => {
                ensure!(a.eta.is_none(), "--eta applies to --fock only");
                (FockMixture::new(w.clone())?, None, None)
            }
            (None, Some(k)) => {
                let eta = a.eta.unwrap_or(1.0);
                (FockMixture::from_loss(k, eta)?, Some(k), Some(eta))
            }
            (Some(_), Some(_)) => bail!("give either --fock or --mixture"),
            (None, None) => bail!("one of --fock, --mixture or --coherent is required"),
        };
        let data = sample_fock_mixture(&mix, n, seed)?;
        let side = SimulationSidecar {
            kind: "fock-mixture".into(),
            n_photons: fock,
            eta,
            weights: Some(mix.weights().to_vec()),
            amplitude: None,
            phase_mode: None,
            n,
            seed,
            format: DataFormat::Plain,
        };
        (data, side)
    };
    formats::write_quadratures(&out, &data)?;
    formats::write_json(&sidecar_path(&out), &sidecar)?;
    Ok(())
}

fn load_input(input: &Path, format: DataFormat, vacuum: Option<&Path>) -> Result<QuadratureDataset> {
    let data = formats::load_quadratures(input, format)?;
    match vacuum {
        None => Ok(data),
        Some(v) => {
            let vac = formats::load_quadratures(v, DataFormat::Plain)?;
            Ok(data.normalize_to_vacuum(&vac)?)
        }
    }
}

fn radial_grid(alpha_max: f64, step: f64) -> Result<Vec<f64>> {
    ensure!(alpha_max.is_finite() && alpha_max >= 0.0, "--alpha-max must be non-negative");
    ensure!(step.is_finite() && step > 0.0, "--alpha-step must be positive");
    let k = (alpha_max / step + 1e-9).floor() as usize;
    Ok((0..=k).map(|i| i as f64 * step).collect())
}

fn filter_spec(kind: FilterKind, s: Option<f64>, w: Option<f64>, q: Option<f64>) -> Result<FilterSpec> {
    let spec = match kind {
        FilterKind::Gaussian => {
            let s = required(s, "s")?;
            ensure!(s < 0.0, "--s must be < 0 for sampling (got {s})");
            FilterSpec::Gaussian { s }
        }
        FilterKind::InfQ => FilterSpec::InfinityQ { w: required(w, "w")? },
        FilterKind::FiniteQ => FilterSpec::FiniteQ { q: required(q, "q")?, w: required(w, "w")? },
    };
    spec.validate()?;
    Ok(spec)
}

pub fn analyze(mut a: AnalyzeArgs) -> Result<()> {
    let file: AnalyzeArgs = read_config(a.config.as_deref())?;
    overlay!(a, file; input, format, vacuum, filter, s, w, q, alpha_max, alpha_step, seed, out);
    a.phase_sensitive |= file.phase_sensitive;
    a.ignore_phases |= file.ignore_phases;
    a.dump_tables |= file.dump_tables;
    let input = required(a.input, "input")?;
    let format = a.format.unwrap_or(DataFormat::Plain);
    let spec = filter_spec(required(a.filter, "filter")?, a.s, a.w, a.q)?;
    let out = required(a.out, "out")?;
    let phase_sensitive = a.phase_sensitive;
    let ignore_phases = a.ignore_phases;
    ensure!(!(phase_sensitive && ignore_phases), "--phase-sensitive and --ignore-phases are exclusive");
    let alpha_max = a.alpha_max.unwrap_or(3.5);
    let alpha_step = a.alpha_step.unwrap_or(if phase_sensitive { 0.25 } else { 0.05 });
    let seed = a.seed.unwrap_or(0);
    let grid = radial_grid(alpha_max, alpha_step)?;

    let mut data = load_input(&input, format, a.vacuum.as_deref())?;
    if data.phases().is_some() && !phase_sensitive {
        ensure!(ignore_phases, "input has phases; pass --phase-sensitive or --ignore-phases");
        data = data.without_phases();
    }
    ensure!(data.len() >= 2, "need at least two samples");
    let filter = Filter::new(spec)?;
    let opts = PatternTableOptions { seed, ..Default::default() };

    let (est, table, mode, note, normalization) = if phase_sensitive {
        ensure!(data.phases().is_some(), "--phase-sensitive needs phased input (--format phased)");
        let axis: Vec<f64> = grid.iter().rev().map(|v| -v).chain(grid.iter().skip(1).copied()).collect();
        let points: Vec<Complex64> =
            axis.iter().flat_map(|&im| axis.iter().map(move |&re| Complex64::new(re, im))).collect();
        let (est, table) = parallel::estimate_phase_sensitive(&data, &filter, &points, &opts)?;
        (est, table, "phase-sensitive", Some("normalization needs a radial grid".to_string()), None)
    } else {
        let (lo, hi) = data.range();
        let table = build_pattern_table(&filter, (lo - 1.0, hi + 1.0), &grid, &opts)?;
        let est = parallel::estimate_phase_averaged(&data, &table)?;
        let (norm, note) = match normalization_check(&est) {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        (est, table, "phase-averaged", note, norm)
    };
    let sig = est.significance()?;

    formats::write_text(&with_ext(&out, "csv"), &formats::estimate_csv(&est))?;
    let report = AnalysisReport {
        input: input.display().to_string(),
        format,
        vacuum: a.vacuum.as_ref().map(|p| p.display().to_string()),
        filter: spec.into(),
        n: est.n,
        mode: mode.into(),
        grid_points: est.values.len(),
        grid_max: alpha_max,
        grid_step: alpha_step,
        table_x_step: Some(table.x_step()),
        table_validation_error: Some(table.validation_error()),
        validation_seed: seed,
        sigma_signed: sig.sigma,
        argmin_alpha: ComplexJson { re: sig.alpha.re, im: sig.alpha.im },
        value_at_argmin: est.values[sig.index],
        stderr_at_argmin: est.stderr[sig.index],
        numerical_error: est.numerical_error,
        significant: sig.sigma <= SIGNIFICANT_SIGMA,
        normalization,
        normalization_note: note,
    };
    formats::write_json(&with_ext(&out, "json"), &report)?;
    if a.dump_tables {
        formats::write_text(&with_ext(&out, "pattern.csv"), &formats::pattern_table_csv(&table))?;
        if let Some(t) = filter.table() {
            formats::write_text(&with_ext(&out, "filter.csv"), &formats::filter_table_csv(t))?;
        }
    }
    println!("{}: N={} Σ={:.3} at |α|={:.3}", spec, est.n, sig.sigma, sig.alpha.norm());
    Ok(())
}

pub fn scan(mut a: ScanArgs) -> Result<()> {
    let file: ScanArgs = read_config(a.config.as_deref())?;
    overlay!(a, file; input, vacuum, family, q, w_grid, alpha_max, alpha_step, eta_tag, seed, out);
    let input = required(a.input, "input")?;
    let family = match a.family.unwrap_or(FilterKind::InfQ) {
        FilterKind::InfQ => FilterFamily::InfinityQ,
        FilterKind::FiniteQ => {
            let q = required(a.q, "q")?;
            FilterSpec::FiniteQ { q, w: 1.0 }.validate()?;
            FilterFamily::FiniteQ { q }
        }
        FilterKind::Gaussian => bail!("the Gaussian family has no width to scan"),
    };
    let w_grid = a.w_grid.unwrap_or_else(quasiprob_core::scan::default_w_grid);
    ensure!(!w_grid.is_empty(), "--w-grid is empty");
    quasiprob_core::scan::check_w_grid(&w_grid)?;
    let alpha_max = a.alpha_max.unwrap_or(3.5);
    let alpha_step = a.alpha_step.unwrap_or(0.05);
    let grid = radial_grid(alpha_max, alpha_step)?;
    let seed = a.seed.unwrap_or(0);
    let out = required(a.out, "out")?;

    let data = load_input(&input, DataFormat::Plain, a.vacuum.as_deref())?;
    let opts = PatternTableOptions { seed, ..Default::default() };
    let result = parallel::scan_filter_width(&data, family, &w_grid, &grid, &opts)?;
    formats::write_text(&with_ext(&out, "csv"), &formats::scan_csv(&result))?;
    let report = ScanReport::new(&result, &input.display().to_string(), a.eta_tag, (alpha_max, alpha_step), seed);
    formats::write_json(&with_ext(&out, "json"), &report)?;
    match result.sigma_max_abs() {
        Some(s) => println!("{family}: |Σ_max|={s:.2} at w_opt={}", result.w_opt()),
        None => println!("{family}: no negativity"),
    }
    Ok(())
}

pub fn diagnose(mut a: DiagnoseArgs) -> Result<()> {
    let file: DiagnoseArgs = read_config(a.config.as_deref())?;
    overlay!(a, file; input, vacuum, n_photons, n_max, bins, resamples, seed, out);
    let input = required(a.input, "input")?;
    let n_photons = required(a.n_photons, "n-photons")?;
    ensure!(n_photons >= 1, "--n-photons must be at least 1");
    let opts = PhotonFitOptions {
        bins: a.bins.unwrap_or(200),
        resamples: a.resamples.unwrap_or(100),
        seed: a.seed.unwrap_or(0),
    };
    let n_max = a.n_max.unwrap_or(4);
    let out = required(a.out, "out")?;
    let data = load_input(&input, DataFormat::Plain, a.vacuum.as_deref())?;
    let var = quadrature_variance(&data)?;
    let eta = estimate_efficiency(&data, n_photons)?;
    let photons = fit_photon_distribution(&data, n_max, &opts)?;
    if eta.out_of_range {
        eprintln!("warning: efficiency estimate {:.4} lies outside [0, 1]", eta.eta);
    }
    if photons.ill_conditioned {
        eprintln!("warning: photon-number fit is ill-conditioned (condition number {:.3e})", photons.condition_number);
    }
    let report = DiagnosticsReport::new(
        &input.display().to_string(),
        data.len(),
        n_photons,
        var,
        eta,
        &photons,
        opts.bins,
        opts.resamples,
        opts.seed,
    );
    formats::write_json(&out, &report)?;
    println!("var={:.5}±{:.5} η={:.4}±{:.4}", var.var, var.stderr, eta.eta, eta.stderr);
    Ok(())
}

pub fn oracle_check() -> Result<i32> {
    let checks = identity_checks()?;
    let mut failed = 0;
    for c in &checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        if !c.passed() {
            failed += 1;
        }
        println!(
            "{status}  {:<90} got {:+.12e}  want {:+.12e}  |Δ|={:.1e} tol {:.0e}",
            c.name,
            c.value,
            c.expected,
            (c.value - c.expected).abs(),
            c.tolerance
        );
    }
    println!("{} of {} identities hold", checks.len() - failed, checks.len());
    Ok(if failed == 0 { 0 } else { 1 })
}
