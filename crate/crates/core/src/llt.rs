//! Adaptive local linear trend extraction.
//!
//! Every index from `window` onward starts in the focus set. Each iteration
//! splits the focus set into maximal contiguous ranges, fits one least
//! squares line per range on the `window` points just before it, and
//! extrapolates that line across the range. Indices whose absolute
//! prediction error is at most the current error percentile are assigned to
//! the iteration and leave the focus set; the rest are retried. With
//! threshold updates the percentile grows by a fixed step, so once it reaches
//! 100 the remaining indices are all assigned at once.

use crate::error::{Error, Result};
use crate::model::{LltParams, LltResult, LocalLinearModel, UNASSIGNED};

/// Indices not yet explained by any local model.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FocusSet {
    indices: Vec<usize>,
}

impl FocusSet {
    /// Build from arbitrary indices; they are sorted and deduplicated.
    pub fn from_indices(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }

    /// The initial set `{window, ..., len - 1}`.
    pub fn initial(len: usize, window: usize) -> Self {
        Self {
            indices: (window.min(len)..len).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Inclusive index interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FocusRange {
    pub start: usize,
    pub end: usize,
}

impl FocusRange {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }
}

/// Split a focus set into maximal runs of consecutive indices.
pub fn partition_ranges(focus: &FocusSet) -> Result<Vec<FocusRange>> {
    let idx = focus.indices();
    let (&first, rest) = idx.split_first().ok_or(Error::EmptyFocus)?;
    let mut ranges = Vec::new();
    let mut current = FocusRange::new(first, first);
    for &t in rest {
        if t == current.end + 1 {
            current.end = t;
        } else {
            ranges.push(current);
            current = FocusRange::new(t, t);
        }
    }
    ranges.push(current);
    Ok(ranges)
}

/// Least squares line through `(t, y[t])` for `t` in `[lo, hi]`.
///
/// Closed form on centered sums: `slope = Sxy / Sxx`,
/// `intercept = mean_y - slope * mean_t`.
pub(crate) fn ols_line(y: &[f64], lo: usize, hi: usize) -> (f64, f64) {
    let n = (hi - lo + 1) as f64;
    let mut sum_t = 0.0;
    let mut sum_y = 0.0;
    for (t, &v) in y.iter().enumerate().take(hi + 1).skip(lo) {
        sum_t += t as f64;
        sum_y += v;
    }
    let mean_t = sum_t / n;
    let mean_y = sum_y / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (t, &v) in y.iter().enumerate().take(hi + 1).skip(lo) {
        let dt = t as f64 - mean_t;
        sxx += dt * dt;
        sxy += dt * (v - mean_y);
    }
    let slope = sxy / sxx;
    (slope, mean_y - slope * mean_t)
}

/// Fit the line for `range` on the window `[max(0, s - w), min(e - 1, start + w - 1)]`.
///
/// Coefficients are in the original time coordinate. A range starting at 0
/// has no preceding window and is rejected, as is any window with fewer
/// than two points.
pub fn fit_window_ols(
    y: &[f64],
    range: FocusRange,
    window: usize,
    iteration: usize,
) -> Result<LocalLinearModel> {
    let start = range.start.saturating_sub(window);
    let end = (range.end as isize - 1).min((start + window) as isize - 1);
    if range.start == 0 || end < start as isize + 1 || end as usize >= y.len() {
        return Err(Error::DegenerateWindow { start, end });
    }
    let (slope, intercept) = ols_line(y, start, end as usize);
    Ok(LocalLinearModel {
        slope,
        intercept,
        range_start: range.start,
        range_end: range.end,
        iteration,
    })
}

/// Evaluate `model` at absolute index `t`.
pub fn predict(model: &LocalLinearModel, t: usize) -> f64 {
    model.predict(t)
}

/// Linear-interpolation percentile, clamped to the maximum for `p >= 100`.
///
/// With the errors sorted as `e_0 <= ... <= e_{n-1}` and
/// `h = p / 100 * (n - 1)`, returns `e_floor(h) + frac(h) * (e_ceil(h) - e_floor(h))`.
pub fn percentile(errors: &[f64], p: f64) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::EmptyErrors);
    }
    if !(p > 0.0) {
        return Err(Error::InvalidParams(format!("percentile must be positive, got {p}")));
    }
    let mut scratch = errors.to_vec();
    Ok(percentile_in_place(&mut scratch, p))
}

/// Same as [`percentile`] but reorders `errors`. Selection is linear time.
fn percentile_in_place(errors: &mut [f64], p: f64) -> f64 {
    let cmp = |a: &f64, b: &f64| a.total_cmp(b);
    if p >= 100.0 {
        return errors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    }
    let n = errors.len();
    let h = (p / 100.0) * (n - 1) as f64;
    let lo = h.floor();
    let frac = h - lo;
    let lo = lo as usize;
    let (_, &mut below, upper) = errors.select_nth_unstable_by(lo, cmp);
    if frac == 0.0 || upper.is_empty() {
        return below;
    }
    let above = upper.iter().copied().min_by(cmp).unwrap_or(below);
    below + frac * (above - below)
}

/// Run the adaptive local linear trend extractor on `y`.
///
/// Indices `0..window` are never focused; they keep label −1 and their
/// local trend is the first fitted model extrapolated backward. Indices
/// still focused when `max_iterations` runs out keep label −1 and take the
/// last prediction made for them. A series no longer than `window` yields
/// no iterations, all labels −1, and a zero local trend.
pub fn llt_run(y: &[f64], params: &LltParams) -> Result<LltResult> {
    params.validate()?;
    let n = y.len();
    let w = params.window;
    let mut labels = vec![UNASSIGNED; n];
    let mut local_trend = vec![f64::NAN; n];
    let mut last_prediction = vec![f64::NAN; n];
    let mut models = Vec::new();
    let mut thresholds = Vec::new();

    let mut focus = FocusSet::initial(n, w);
    let mut next_focus = Vec::with_capacity(focus.len());
    let mut predictions = Vec::with_capacity(focus.len());
    let mut errors = Vec::with_capacity(focus.len());
    let mut scratch = Vec::with_capacity(focus.len());
    let bound = params.termination_bound();
    let mut iterations_used = 0;

    for k in 1..=params.max_iterations {
        if focus.is_empty() {
            break;
        }
        iterations_used = k;
        predictions.clear();
        errors.clear();
        for range in partition_ranges(&focus)? {
            let model = fit_window_ols(y, range, w, k)?;
            for t in range.start..=range.end {
                let pred = model.predict(t);
                predictions.push(pred);
                errors.push((y[t] - pred).abs());
                last_prediction[t] = pred;
            }
            models.push(model);
        }

        let p = scheduled_percentile(params, k, bound);
        scratch.clear();
        scratch.extend_from_slice(&errors);
        let tau = percentile_in_place(&mut scratch, p);
        thresholds.push(tau);

        next_focus.clear();
        for (i, &t) in focus.indices.iter().enumerate() {
            if errors[i] <= tau {
                labels[t] = k as i32;
                local_trend[t] = predictions[i];
            } else {
                next_focus.push(t);
            }
        }
        std::mem::swap(&mut focus.indices, &mut next_focus);
    }

    if let Some(bound) = bound.filter(|&b| params.max_iterations >= b) {
        debug_assert!(focus.is_empty() && iterations_used <= bound);
    }

    for &t in focus.indices() {
        local_trend[t] = last_prediction[t];
    }
    match models.first() {
        Some(first) => {
            for (t, v) in local_trend.iter_mut().enumerate().take(w.min(n)) {
                *v = first.predict(t);
            }
        }
        None => local_trend.iter_mut().for_each(|v| *v = 0.0),
    }

    Ok(LltResult {
        labels,
        local_trend,
        models,
        iterations_used,
        thresholds,
    })
}

/// Percentile used at iteration `k` (1-based): `p0 + (k - 1) * dp` with
/// updates on, `p0` otherwise. From iteration `bound` on it is pinned to 100
/// so the termination bound holds regardless of rounding in the schedule.
fn scheduled_percentile(params: &LltParams, k: usize, bound: Option<usize>) -> f64 {
    if !params.update_threshold {
        return params.baseline_percentile;
    }
    if bound.is_some_and(|b| k >= b) {
        return 100.0;
    }
    params.baseline_percentile + (k - 1) as f64 * params.percentile_step
}
