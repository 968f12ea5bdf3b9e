//! Domain types shared by every stage of the toolkit.
//!
//! All arithmetic is `f64`. Values are immutable once constructed; the
//! constructors are the only place where invariants are checked.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Label given to an index that no local model has claimed.
pub const UNASSIGNED: i32 = -1;

/// One entry of an optional series index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexLabel {
    Tick(i64),
    /// ISO-8601 timestamp. `micros` is the instant in microseconds since the
    /// Unix epoch and is what ordering is checked against.
    Timestamp { raw: String, micros: i64 },
}

impl IndexLabel {
    fn ordinal(&self) -> i64 {
        match self {
            IndexLabel::Tick(t) => *t,
            IndexLabel::Timestamp { micros, .. } => *micros,
        }
    }
}

impl fmt::Display for IndexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexLabel::Tick(t) => write!(f, "{t}"),
            IndexLabel::Timestamp { raw, .. } => f.write_str(raw),
        }
    }
}

/// Ordered, finite, real-valued observations.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    index: Option<Vec<IndexLabel>>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        Ok(Self {
            values,
            index: None,
        })
    }

    pub fn with_index(values: Vec<f64>, index: Vec<IndexLabel>) -> Result<Self> {
        let mut series = Self::new(values)?;
        if index.len() != series.values.len() {
            return Err(Error::IndexLength {
                index: index.len(),
                values: series.values.len(),
            });
        }
        if let Some(i) = index
            .windows(2)
            .position(|pair| pair[1].ordinal() <= pair[0].ordinal())
        {
            return Err(Error::NonMonotoneIndex(i + 1));
        }
        series.index = Some(index);
        Ok(series)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index(&self) -> Option<&[IndexLabel]> {
        self.index.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Label of position `t`: the stored index entry or the position itself.
    pub fn label(&self, t: usize) -> String {
        match &self.index {
            Some(index) => index[t].to_string(),
            None => t.to_string(),
        }
    }
}

/// Validate a raw array into a [`TimeSeries`].
pub fn validate_series(raw: &[f64]) -> Result<TimeSeries> {
    TimeSeries::new(raw.to_vec())
}

/// Parameters of the adaptive local linear trend extractor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LltParams {
    /// Number of points preceding a focus range used to fit its line.
    pub window: usize,
    pub max_iterations: usize,
    /// Starting error percentile, in (0, 100].
    pub baseline_percentile: f64,
    /// Increment applied to the percentile after each iteration.
    pub percentile_step: f64,
    pub update_threshold: bool,
}

impl Default for LltParams {
    /// Window 3 and percentile 30; step 10, 20 iterations and threshold
    /// updates on.
    fn default() -> Self {
        Self {
            window: 3,
            max_iterations: 20,
            baseline_percentile: 30.0,
            percentile_step: 10.0,
            update_threshold: true,
        }
    }
}

impl LltParams {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidParams(format!(
                "window must be at least 2, got {}",
                self.window
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParams("max_iterations must be positive".into()));
        }
        let p0 = self.baseline_percentile;
        if !(p0 > 0.0 && p0 <= 100.0) {
            return Err(Error::InvalidParams(format!(
                "baseline percentile must lie in (0, 100], got {p0}"
            )));
        }
        let dp = self.percentile_step;
        if !(dp >= 0.0 && dp.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "percentile step must be finite and nonnegative, got {dp}"
            )));
        }
        if self.update_threshold && dp <= 0.0 {
            return Err(Error::InvalidParams(
                "percentile step must be positive when threshold updates are on".into(),
            ));
        }
        Ok(())
    }

    /// `1 + ceil((100 - p0) / dp)`: the iteration by which every focused
    /// index is assigned. `None` when the threshold never moves.
    pub fn termination_bound(&self) -> Option<usize> {
        if !self.update_threshold || self.percentile_step <= 0.0 {
            return None;
        }
        let steps = ((100.0 - self.baseline_percentile) / self.percentile_step).ceil();
        Some(1 + steps.max(0.0) as usize)
    }
}

/// A fitted regime `h(t) = slope * t + intercept`, valid on
/// `[range_start, range_end]`, created at `iteration`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalLinearModel {
    pub slope: f64,
    pub intercept: f64,
    pub range_start: usize,
    pub range_end: usize,
    pub iteration: usize,
}

impl LocalLinearModel {
    /// Evaluate at absolute index `t`. Extrapolation is allowed.
    #[inline]
    pub fn predict(&self, t: usize) -> f64 {
        self.slope * t as f64 + self.intercept
    }

    pub fn covers(&self, t: usize) -> bool {
        self.range_start <= t && t <= self.range_end
    }
}

/// Output of the local linear trend extractor.
#[derive(Debug, Clone, PartialEq)]
pub struct LltResult {
    /// Iteration at which each index was assigned, or [`UNASSIGNED`].
    pub labels: Vec<i32>,
    pub local_trend: Vec<f64>,
    /// Every fitted model, in fit order.
    pub models: Vec<LocalLinearModel>,
    pub iterations_used: usize,
    /// Error threshold applied at each iteration.
    pub thresholds: Vec<f64>,
}

impl LltResult {
    /// Indices at or after `window` that are still unassigned, i.e. the
    /// focus set left when the loop stopped.
    pub fn remaining_focus(&self, window: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .skip(window)
            .filter(|(_, &m)| m == UNASSIGNED)
            .map(|(t, _)| t)
            .collect()
    }
}

/// Estimator for the smooth global trend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GlobalTrendConfig {
    /// Centered mean over an odd window, truncated at the boundaries.
    MovingAverage { window: usize },
    /// Least squares polynomial over the whole series.
    PolynomialLeastSquares { degree: usize },
    /// Least squares line over a centered odd window, evaluated at its center.
    LocalRegression { window: usize },
}

pub const MAX_POLYNOMIAL_DEGREE: usize = 5;

impl GlobalTrendConfig {
    /// Smallest odd integer `>= len / 10`, clamped to `[5, len]` (or `len - 1`
    /// when `len` is even).
    pub fn default_window(len: usize) -> usize {
        let mut w = len.div_ceil(10).max(1);
        if w % 2 == 0 {
            w += 1;
        }
        let upper = if len % 2 == 1 { len } else { len.saturating_sub(1) };
        w.max(5).min(upper.max(1))
    }

    pub fn default_for_len(len: usize) -> Self {
        GlobalTrendConfig::MovingAverage {
            window: Self::default_window(len),
        }
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        match *self {
            GlobalTrendConfig::MovingAverage { window }
            | GlobalTrendConfig::LocalRegression { window } => {
                if window == 0 || window % 2 == 0 {
                    return Err(Error::InvalidParams(format!(
                        "global trend window must be a positive odd integer, got {window}"
                    )));
                }
                if window > len {
                    return Err(Error::WindowTooLarge { window, len });
                }
            }
            GlobalTrendConfig::PolynomialLeastSquares { degree } => {
                if degree > MAX_POLYNOMIAL_DEGREE {
                    return Err(Error::DegreeTooHigh(degree));
                }
                if degree >= len {
                    return Err(Error::InvalidParams(format!(
                        "polynomial degree {degree} needs at least {} points, got {len}",
                        degree + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The parameters that produced a [`Decomposition`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionParams {
    pub llt: LltParams,
    pub global: GlobalTrendConfig,
}

/// `y = global_trend + local_trend + residual`, with the segmentation that
/// produced the local trend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub global_trend: Vec<f64>,
    pub local_trend: Vec<f64>,
    pub residual: Vec<f64>,
    pub labels: Vec<i32>,
    pub models: Vec<LocalLinearModel>,
    pub params: DecompositionParams,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.global_trend.len()
    }

    pub fn is_empty(&self) -> bool {
        self.global_trend.is_empty()
    }

    /// Number of distinct iterations that claimed at least one index.
    pub fn segment_label_count(&self) -> usize {
        let mut seen: Vec<i32> = self
            .labels
            .iter()
            .copied()
            .filter(|&m| m != UNASSIGNED)
            .collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendKind {
    Linear,
    InvertedV,
    Piecewise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeasonRegime {
    Fixed,
    Transitive,
    Variable,
}

impl TrendKind {
    pub const ALL: [TrendKind; 3] = [TrendKind::Linear, TrendKind::InvertedV, TrendKind::Piecewise];

    pub fn name(self) -> &'static str {
        match self {
            TrendKind::Linear => "linear",
            TrendKind::InvertedV => "invv",
            TrendKind::Piecewise => "piecewise",
        }
    }
}

impl SeasonRegime {
    pub const ALL: [SeasonRegime; 3] = [
        SeasonRegime::Fixed,
        SeasonRegime::Transitive,
        SeasonRegime::Variable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeasonRegime::Fixed => "fixed",
            SeasonRegime::Transitive => "transitive",
            SeasonRegime::Variable => "variable",
        }
    }

    /// Largest period the regime can produce; series must hold four of them.
    pub fn max_period(self) -> usize {
        match self {
            SeasonRegime::Fixed | SeasonRegime::Transitive => 120,
            SeasonRegime::Variable => 490,
        }
    }
}

impl fmt::Display for TrendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for SeasonRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Recipe for one synthetic benchmark series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub trend: TrendKind,
    pub season: SeasonRegime,
    pub length: usize,
    pub noise_sigma: f64,
    pub seed: u64,
    pub amplitude: f64,
    pub trend_scale: f64,
}

impl SyntheticSpec {
    pub fn new(trend: TrendKind, season: SeasonRegime, seed: u64) -> Self {
        Self {
            trend,
            season,
            length: 2000,
            noise_sigma: 1.0,
            seed,
            amplitude: 10.0,
            trend_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let min_len = 4 * self.season.max_period();
        if self.length < min_len {
            return Err(Error::InvalidParams(format!(
                "{} seasonality needs length >= {min_len}, got {}",
                self.season, self.length
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "noise sigma must be finite and nonnegative, got {}",
                self.noise_sigma
            )));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidParams("amplitude must be positive".into()));
        }
        if !(self.trend_scale > 0.0 && self.trend_scale.is_finite()) {
            return Err(Error::InvalidParams("trend scale must be positive".into()));
        }
        Ok(())
    }
}

/// Exact components of a generated series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub noise: Vec<f64>,
    pub total: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentError {
    pub mae: f64,
    pub mse: f64,
}

/// Component-wise error of a decomposition against ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub trend: ComponentError,
    pub seasonal: ComponentError,
    pub residual: ComponentError,
    pub overall_mae: f64,
    pub overall_mse: f64,
}

impl EvalReport {
    pub fn from_components(
        trend: ComponentError,
        seasonal: ComponentError,
        residual: ComponentError,
    ) -> Self {
        Self {
            trend,
            seasonal,
            residual,
            overall_mae: (trend.mae + seasonal.mae + residual.mae) / 3.0,
            overall_mse: (trend.mse + seasonal.mse + residual.mse) / 3.0,
        }
    }
}
