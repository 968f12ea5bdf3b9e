//! Smooth global trend estimators and detrending.

use crate::error::{Error, Result};
use crate::model::GlobalTrendConfig;

/// Fit the global trend of `y` with the configured estimator.
pub fn fit_global(y: &[f64], config: &GlobalTrendConfig) -> Result<Vec<f64>> {
    if y.is_empty() {
        return Err(Error::EmptyInput);
    }
    config.validate(y.len())?;
    Ok(match *config {
        GlobalTrendConfig::MovingAverage { window } => moving_average(y, window),
        GlobalTrendConfig::PolynomialLeastSquares { degree } => polynomial_fit(y, degree),
        GlobalTrendConfig::LocalRegression { window } => local_regression(y, window),
    })
}

/// `y[t] - g[t]` for every `t`.
pub fn detrend(y: &[f64], g: &[f64]) -> Result<Vec<f64>> {
    if y.len() != g.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: g.len(),
        });
    }
    Ok(y.iter().zip(g).map(|(a, b)| a - b).collect())
}

/// Window `[t - half, t + half]` intersected with `[0, len - 1]`.
fn bounds(t: usize, half: usize, len: usize) -> (usize, usize) {
    (t.saturating_sub(half), (t + half).min(len - 1))
}

/// Centered truncated moving average.
///
/// Sums run over prefix sums of the mean-removed series, which keeps the
/// cancellation error at the scale of the fluctuations rather than of the
/// running total.
fn moving_average(y: &[f64], window: usize) -> Vec<f64> {
    let n = y.len();
    let half = window / 2;
    let mean = y.iter().sum::<f64>() / n as f64;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in y {
        acc += v - mean;
        prefix.push(acc);
    }
    (0..n)
        .map(|t| {
            let (lo, hi) = bounds(t, half, n);
            mean + (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1) as f64
        })
        .collect()
}

/// Least squares line over each truncated centered window, evaluated at the
/// window's anchor index.
fn local_regression(y: &[f64], window: usize) -> Vec<f64> {
    let n = y.len();
    let half = window / 2;
    (0..n)
        .map(|t| {
            let (lo, hi) = bounds(t, half, n);
            if lo == hi {
                return y[t];
            }
            let (slope, intercept) = crate::llt::ols_line(y, lo, hi);
            slope * t as f64 + intercept
        })
        .collect()
}

/// Global polynomial least squares, solved by Householder QR on a
/// Vandermonde matrix in the scaled coordinate `(t - c) / c`,
/// `c = (len - 1) / 2`.
fn polynomial_fit(y: &[f64], degree: usize) -> Vec<f64> {
    let n = y.len();
    let cols = degree + 1;
    let center = (n as f64 - 1.0) / 2.0;
    let scale = if center > 0.0 { center } else { 1.0 };
    let x: Vec<f64> = (0..n).map(|t| (t as f64 - center) / scale).collect();

    // Column-major Vandermonde.
    let mut a = vec![0.0; n * cols];
    for (i, &xi) in x.iter().enumerate() {
        let mut pow = 1.0;
        for j in 0..cols {
            a[j * n + i] = pow;
            pow *= xi;
        }
    }
    let coef = householder_least_squares(&mut a, n, cols, y.to_vec());

    x.iter()
        .map(|&xi| coef.iter().rev().fold(0.0, |acc, &c| acc * xi + c))
        .collect()
}

/// Solve `min ||A c - b||` for column-major `a` (`rows x cols`, full column
/// rank, `rows >= cols`). Overwrites `a` and `b`.
fn householder_least_squares(a: &mut [f64], rows: usize, cols: usize, mut b: Vec<f64>) -> Vec<f64> {
    let mut diag = vec![0.0; cols];
    for k in 0..cols {
        let col = k * rows;
        let norm = a[col + k..col + rows].iter().map(|v| v * v).sum::<f64>().sqrt();
        let alpha = if a[col + k] > 0.0 { -norm } else { norm };
        diag[k] = alpha;
        if norm == 0.0 {
            continue;
        }
        // v = x - alpha e1, stored in place of the column.
        a[col + k] -= alpha;
        let vnorm2: f64 = a[col + k..col + rows].iter().map(|v| v * v).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k + 1..cols {
            let other = j * rows;
            let dot: f64 = (k..rows).map(|i| a[col + i] * a[other + i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..rows {
                a[other + i] -= f * a[col + i];
            }
        }
        let dot: f64 = (k..rows).map(|i| a[col + i] * b[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..rows {
            b[i] -= f * a[col + i];
        }
    }
    let mut coef = vec![0.0; cols];
    for k in (0..cols).rev() {
        let mut acc = b[k];
        for j in k + 1..cols {
            acc -= a[j * rows + k] * coef[j];
        }
        coef[k] = acc / diag[k];
    }
    coef
}
