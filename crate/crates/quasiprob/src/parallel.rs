//! Multi-threaded drivers for the estimator and the width scan.
//!
//! Partial sums are exact, so results are bit-identical to the sequential
//! versions for any thread count and chunk size.

use num_complex::Complex64;
use quasiprob_core::estimator::{
    phase_sensitive_table, PhaseSensitiveAccumulator, RadialAccumulator,
};
use quasiprob_core::scan::{check_w_grid, scan_point};
use quasiprob_core::{
    Error, FilterFamily, PatternTable, PatternTableOptions, QuadratureDataset, QuasiprobEstimate, Result, ScanResult,
};
use quasiprob_core::filters::Filter;
use rayon::prelude::*;

/// Samples per work item.
pub const CHUNK: usize = 1 << 14;

pub fn estimate_phase_averaged(data: &QuadratureDataset, table: &PatternTable) -> Result<QuasiprobEstimate> {
    if data.phases().is_some() {
        return Err(Error::UnexpectedPhases);
    }
    if data.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: data.len() });
    }
    let acc = data
        .samples()
        .par_chunks(CHUNK)
        .map(|xs| {
            let mut acc = RadialAccumulator::new(table);
            acc.add_samples(xs).map(|_| acc)
        })
        .try_reduce_with(|mut a, b| {
            a.merge(&b);
            Ok(a)
        })
        .expect("non-empty dataset")?;
    acc.finish()
}

pub fn estimate_phase_sensitive(
    data: &QuadratureDataset,
    filter: &Filter,
    grid: &[Complex64],
    opts: &PatternTableOptions,
) -> Result<(QuasiprobEstimate, PatternTable)> {
    let phases = data.phases().ok_or(Error::MissingPhases)?;
    if data.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: data.len() });
    }
    let table = phase_sensitive_table(data, filter, grid, opts)?;
    let acc = data
        .samples()
        .par_chunks(CHUNK)
        .zip(phases.par_chunks(CHUNK))
        .map(|(xs, ph)| {
            let mut acc = PhaseSensitiveAccumulator::new(&table, grid)?;
            acc.add_samples(xs, ph).map(|_| acc)
        })
        .try_reduce_with(|mut a, b| {
            a.merge(&b);
            Ok(a)
        })
        .expect("non-empty dataset")?;
    let est = acc.finish()?;
    Ok((est, table))
}

/// Width scan with one task per width; results are kept in grid order.
pub fn scan_filter_width(
    data: &QuadratureDataset,
    family: FilterFamily,
    w_grid: &[f64],
    alpha_grid: &[f64],
    opts: &PatternTableOptions,
) -> Result<ScanResult> {
    check_w_grid(w_grid)?;
    let points = w_grid
        .par_iter()
        .map(|&w| scan_point(data, family, w, alpha_grid, opts))
        .collect::<Result<Vec<_>>>()?;
    ScanResult::from_points(family, data.len(), points)
}
