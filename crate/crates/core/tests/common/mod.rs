//! Shared helpers for the integration tests, including a deliberately naive
//! reference implementation of the local linear trend extractor.

#![allow(dead_code)]

use lgtd::LltParams;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub struct NaiveResult {
    pub labels: Vec<i32>,
    pub local_trend: Vec<f64>,
    /// (slope, intercept, start, end, iteration)
    pub models: Vec<(f64, f64, usize, usize, usize)>,
    pub iterations: usize,
    pub focus_left: usize,
}

/// Straight transcription of the extractor: a boolean focus mask, a fresh
/// NaN prediction array per iteration, a full sort for the percentile and
/// the percentile incremented by `dp` after every iteration.
pub fn naive_llt(y: &[f64], p: &LltParams) -> NaiveResult {
    let n = y.len();
    let w = p.window;
    let mut labels = vec![-1i32; n];
    let mut yhat = vec![f64::NAN; n];
    let mut last = vec![f64::NAN; n];
    let mut models = Vec::new();
    let mut focus = vec![false; n];
    for t in w..n {
        focus[t] = true;
    }
    let mut pct = p.baseline_percentile;
    let mut iterations = 0;
    for k in 1..=p.max_iterations {
        if !focus.iter().any(|&f| f) {
            break;
        }
        iterations = k;
        // Contiguous ranges of the mask.
        let mut ranges = Vec::new();
        let mut t = 0;
        while t < n {
            if focus[t] {
                let s = t;
                while t + 1 < n && focus[t + 1] {
                    t += 1;
                }
                ranges.push((s, t));
            }
            t += 1;
        }
        let mut errs = Vec::new();
        let mut ytilde = vec![f64::NAN; n];
        for &(s, e) in &ranges {
            let ts = if s >= w { s - w } else { 0 };
            let te = std::cmp::min(e as i64 - 1, (ts + w) as i64 - 1) as usize;
            let cnt = (te - ts + 1) as f64;
            let mut st = 0.0;
            let mut sy = 0.0;
            for i in ts..=te {
                st += i as f64;
                sy += y[i];
            }
            let mt = st / cnt;
            let my = sy / cnt;
            let mut sxx = 0.0;
            let mut sxy = 0.0;
            for i in ts..=te {
                sxx += (i as f64 - mt) * (i as f64 - mt);
                sxy += (i as f64 - mt) * (y[i] - my);
            }
            let a = sxy / sxx;
            let b = my - a * mt;
            models.push((a, b, s, e, k));
            for i in s..=e {
                ytilde[i] = a * i as f64 + b;
                errs.push((y[i] - ytilde[i]).abs());
                last[i] = ytilde[i];
            }
        }
        let mut sorted = errs.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let tau = if pct >= 100.0 {
            *sorted.last().unwrap()
        } else {
            let h = (pct / 100.0) * (sorted.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            let frac = h - h.floor();
            if frac == 0.0 {
                sorted[lo]
            } else {
                sorted[lo] + frac * (sorted[hi] - sorted[lo])
            }
        };
        for i in 0..n {
            if focus[i] && (y[i] - ytilde[i]).abs() <= tau {
                labels[i] = k as i32;
                yhat[i] = ytilde[i];
                focus[i] = false;
            }
        }
        if p.update_threshold {
            pct += p.percentile_step;
        }
    }
    let focus_left = focus.iter().filter(|&&f| f).count();
    for i in 0..n {
        if focus[i] {
            yhat[i] = last[i];
        }
    }
    if let Some(&(a, b, ..)) = models.first() {
        for i in 0..w.min(n) {
            yhat[i] = a * i as f64 + b;
        }
    }
    NaiveResult {
        labels,
        local_trend: yhat,
        models,
        iterations,
        focus_left,
    }
}

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Random extractor parameters whose percentile schedule is exact in
/// binary floating point.
pub fn random_params<R: Rng>(rng: &mut R) -> LltParams {
    const STEPS: [f64; 8] = [0.5, 1.0, 2.5, 5.0, 7.5, 10.0, 12.5, 25.0];
    let update_threshold = rng.gen_bool(0.75);
    LltParams {
        window: rng.gen_range(2..=6),
        max_iterations: rng.gen_range(1..=25),
        baseline_percentile: rng.gen_range(2..=200) as f64 / 2.0,
        percentile_step: if update_threshold {
            STEPS[rng.gen_range(0..STEPS.len())]
        } else {
            0.0
        },
        update_threshold,
    }
}

/// Gaussian noise, optionally integrated into a random walk.
pub fn random_series<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let normal = rand_distr::StandardNormal;
    let walk = rng.gen_bool(0.5);
    let mut acc = 0.0;
    (0..len)
        .map(|_| {
            let z: f64 = rng.sample(normal);
            if walk {
                acc += z;
                acc
            } else {
                z
            }
        })
        .collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
