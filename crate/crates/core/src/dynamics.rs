//! Nearest-neighbour nonlocality after a sudden field quench `h0 → hf`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contraction::ContractionTable;
use crate::error::{Error, Result};
use crate::params::{ModelParams, MAX_SUPPORTED_TIME};
use crate::quadrature::QuadratureConfig;
use crate::twosite::{assemble_two_site, chsh_max, concurrence, two_site_tensor_from_table, TwoSiteTensor};

/// Minimum number of samples in the tail of an ergodicity average.
pub const MIN_TAIL_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchRecord {
    pub t: f64,
    pub chsh_max: f64,
    pub concurrence: f64,
    pub mz: f64,
    pub txy: f64,
}

impl QuenchRecord {
    fn from_tensor(t: f64, tensor: &TwoSiteTensor) -> Result<Self> {
        let rho = assemble_two_site(tensor)?;
        Ok(QuenchRecord {
            t,
            chsh_max: chsh_max(tensor),
            concurrence: concurrence(&rho)?,
            mz: 0.5 * tensor.sz,
            txy: tensor.txy,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchSeries {
    pub params: ModelParams,
    pub records: Vec<QuenchRecord>,
}

impl QuenchSeries {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.t)
    }
}

/// `n` equally spaced times from `0` to `t_max` inclusive.
pub fn uniform_times(t_max: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {n}")));
    }
    if !(t_max > 0.0 && t_max <= MAX_SUPPORTED_TIME) {
        return Err(Error::InvalidParameter(format!(
            "t_max = {t_max} outside (0, {MAX_SUPPORTED_TIME}]"
        )));
    }
    Ok((0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect())
}

/// One record per time; `params.t` is ignored.
pub fn quench_series(params: &ModelParams, times: &[f64]) -> Result<QuenchSeries> {
    quench_series_with(params, times, QuadratureConfig::default())
}

pub fn quench_series_with(params: &ModelParams, times: &[f64], config: QuadratureConfig) -> Result<QuenchSeries> {
    params.validate()?;
    if times.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("times must be strictly ascending".into()));
    }
    let records = times
        .par_iter()
        .map(|&t| {
            let p = params.with_time(t);
            p.validate()?;
            let table = ContractionTable::with_config(&p, 1, config)?;
            QuenchRecord::from_tensor(t, &two_site_tensor_from_table(1, &table)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuenchSeries {
        params: *params,
        records,
    })
}

/// The `t → ∞` record, obtained by dropping every oscillating term of the
/// contraction integrals (the record's `t` is `+∞`).
pub fn stationary_record(params: &ModelParams) -> Result<QuenchRecord> {
    let table = ContractionTable::stationary(params, 1, QuadratureConfig::default())?;
    QuenchRecord::from_tensor(f64::INFINITY, &two_site_tensor_from_table(1, &table)?)
}

/// Equilibrium record at the post-quench field.
pub fn final_equilibrium_record(params: &ModelParams) -> Result<QuenchRecord> {
    let p = params.final_equilibrium();
    let table = ContractionTable::new(&p, 1)?;
    QuenchRecord::from_tensor(0.0, &two_site_tensor_from_table(1, &table)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityReport {
    /// Mean of `chsh_max` over the tail of the series.
    pub time_average: f64,
    /// `chsh_max` in equilibrium at the post-quench field.
    pub equilibrium_value: f64,
    pub gap: f64,
    pub tail_start: f64,
    pub tail_samples: usize,
}

/// Compares the average of `chsh_max` over the trailing `tail_fraction` of
/// the samples with its equilibrium value at `hf`.
pub fn ergodicity_report(series: &QuenchSeries, tail_fraction: f64) -> Result<ErgodicityReport> {
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tail fraction {tail_fraction} not in (0, 1)"
        )));
    }
    let n = series.records.len();
    let samples = (n as f64 * tail_fraction).round() as usize;
    if samples < MIN_TAIL_SAMPLES {
        return Err(Error::InsufficientWindow {
            samples,
            required: MIN_TAIL_SAMPLES,
        });
    }
    let tail = &series.records[n - samples..];
    let time_average = tail.iter().map(|r| r.chsh_max).sum::<f64>() / samples as f64;
    let equilibrium_value = final_equilibrium_record(&series.params)?.chsh_max;
    Ok(ErgodicityReport {
        time_average,
        equilibrium_value,
        gap: (time_average - equilibrium_value).abs(),
        tail_start: tail[0].t,
        tail_samples: samples,
    })
}
