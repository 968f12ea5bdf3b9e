//! Full local-global decomposition.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::global_trend::{detrend, fit_global};
use crate::llt::llt_run;
use crate::model::{Decomposition, DecompositionParams, GlobalTrendConfig, LltParams, TimeSeries};

/// Component removed or altered for comparison runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ablation {
    /// Global trend forced to zero; the extractor runs on `y` itself.
    NoGlobal,
    /// Percentile held at its baseline for every iteration.
    NoAdaptiveThreshold,
    /// Local trend forced to zero; everything the global trend misses is
    /// residual.
    NoLocalTrend,
}

/// Decompose `y` into global trend, local trend and residual.
pub fn lgtd_decompose(
    y: &TimeSeries,
    global: &GlobalTrendConfig,
    llt: &LltParams,
) -> Result<Decomposition> {
    check_length(y, llt)?;
    let g = fit_global(y.values(), global)?;
    assemble(y.values(), g, global, llt, true)
}

/// [`lgtd_decompose`] with one component removed.
pub fn lgtd_decompose_ablated(
    y: &TimeSeries,
    global: &GlobalTrendConfig,
    llt: &LltParams,
    ablation: Ablation,
) -> Result<Decomposition> {
    check_length(y, llt)?;
    match ablation {
        Ablation::NoGlobal => {
            let g = vec![0.0; y.len()];
            assemble(y.values(), g, global, llt, true)
        }
        Ablation::NoAdaptiveThreshold => {
            let fixed = LltParams {
                update_threshold: false,
                ..*llt
            };
            let g = fit_global(y.values(), global)?;
            assemble(y.values(), g, global, &fixed, true)
        }
        Ablation::NoLocalTrend => {
            let g = fit_global(y.values(), global)?;
            assemble(y.values(), g, global, llt, false)
        }
    }
}

/// Decompose many series on the rayon pool. Output order matches input.
pub fn lgtd_decompose_batch(
    series: &[TimeSeries],
    global: &GlobalTrendConfig,
    llt: &LltParams,
) -> Vec<Result<Decomposition>> {
    series
        .par_iter()
        .map(|y| lgtd_decompose(y, global, llt))
        .collect()
}

fn check_length(y: &TimeSeries, llt: &LltParams) -> Result<()> {
    llt.validate()?;
    if y.len() <= llt.window {
        return Err(Error::SeriesTooShort {
            len: y.len(),
            window: llt.window,
        });
    }
    Ok(())
}

fn assemble(
    y: &[f64],
    global_trend: Vec<f64>,
    global: &GlobalTrendConfig,
    llt: &LltParams,
    with_local: bool,
) -> Result<Decomposition> {
    let detrended = detrend(y, &global_trend)?;
    let (local_trend, labels, models) = if with_local {
        let res = llt_run(&detrended, llt)?;
        (res.local_trend, res.labels, res.models)
    } else {
        (vec![0.0; y.len()], vec![crate::model::UNASSIGNED; y.len()], Vec::new())
    };
    let residual = detrended
        .iter()
        .zip(&local_trend)
        .map(|(r, l)| r - l)
        .collect();
    Ok(Decomposition {
        global_trend,
        local_trend,
        residual,
        labels,
        models,
        params: DecompositionParams {
            llt: *llt,
            global: *global,
        },
    })
}

/// Largest `|((y - g) - l) - e|`, evaluated in the order the residual was
/// formed. Zero for every decomposition built by this module.
pub fn reconstruction_error(y: &[f64], d: &Decomposition) -> f64 {
    y.iter()
        .zip(&d.global_trend)
        .zip(d.local_trend.iter().zip(&d.residual))
        .map(|((v, g), (l, e))| (((v - g) - l) - e).abs())
        .fold(0.0, f64::max)
}

/// Largest `|(g + l + e) - y|` with left-to-right summation. Bounded by a
/// few units of roundoff at the components' scale rather than zero.
pub fn summation_gap(y: &[f64], d: &Decomposition) -> f64 {
    y.iter()
        .zip(&d.global_trend)
        .zip(d.local_trend.iter().zip(&d.residual))
        .map(|((v, g), (l, e))| ((g + l + e) - v).abs())
        .fold(0.0, f64::max)
}
