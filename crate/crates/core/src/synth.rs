//! Seeded synthetic benchmark series with exact ground truth.
//!
//! Three trend shapes cross three seasonality regimes, giving nine datasets
//! (`synth1` = linear/fixed through `synth9` = piecewise/variable).
//!
//! Randomness comes from xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`). The period schedule draws from the
//! seeded stream; the noise draws from the same seed after one
//! `jump()` (2^128 steps), so the two never overlap. Uniforms in `[0, 1)` are
//! `(next_u64 >> 11) * 2^-53`; a choice among `n` items is
//! `(next_u64 * n) >> 64`. Gaussian variates use the Marsaglia polar method
//! and both values of each accepted pair are emitted, first `u * f` then
//! `v * f`.

use std::f64::consts::TAU;

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::Result;
use crate::model::{GroundTruth, SeasonRegime, SyntheticSpec, TimeSeries, TrendKind};

/// Slope of the linear trend and of both inverted-V legs.
pub const LINEAR_SLOPE: f64 = 0.02;
/// Slopes of the three piecewise segments.
pub const PIECEWISE_SLOPES: [f64; 3] = [0.03, -0.01, 0.05];
pub const FIXED_PERIOD: usize = 120;
pub const TRANSITIVE_PERIODS: (usize, usize) = (120, 60);
/// Variable-regime periods: 72, 87, ..., 477.
pub const VARIABLE_PERIOD_START: usize = 72;
pub const VARIABLE_PERIOD_STEP: usize = 15;
pub const VARIABLE_PERIOD_BOUND: usize = 490;

pub fn variable_periods() -> Vec<usize> {
    (VARIABLE_PERIOD_START..VARIABLE_PERIOD_BOUND)
        .step_by(VARIABLE_PERIOD_STEP)
        .collect()
}

/// Period in force at each index; piecewise constant, every entry `>= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodSchedule {
    periods: Vec<usize>,
}

impl PeriodSchedule {
    pub fn constant(period: usize, len: usize) -> Self {
        Self {
            periods: vec![period; len],
        }
    }

    pub fn period_at(&self, t: usize) -> usize {
        self.periods[t]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.periods
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }
}

struct Stream(Xoshiro256PlusPlus);

impl Stream {
    fn schedule(seed: u64) -> Self {
        Stream(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    fn noise(seed: u64) -> Self {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        rng.jump();
        Stream(rng)
    }

    fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn choose(&mut self, n: usize) -> usize {
        ((self.0.next_u64() as u128 * n as u128) >> 64) as usize
    }

    fn gaussian_pair(&mut self) -> (f64, f64) {
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                return (u * f, v * f);
            }
        }
    }
}

/// Trend component of length `len`.
pub fn gen_trend(kind: TrendKind, len: usize, trend_scale: f64) -> Vec<f64> {
    match kind {
        TrendKind::Linear => (0..len)
            .map(|t| trend_scale * LINEAR_SLOPE * t as f64)
            .collect(),
        TrendKind::InvertedV => {
            let apex = len as f64 / 2.0;
            (0..len)
                .map(|t| trend_scale * LINEAR_SLOPE * (apex - (t as f64 - apex).abs()))
                .collect()
        }
        TrendKind::Piecewise => {
            let b1 = len / 3;
            let b2 = 2 * len / 3;
            let [s1, s2, s3] = PIECEWISE_SLOPES.map(|s| s * trend_scale);
            let at_b1 = s1 * b1 as f64;
            let at_b2 = at_b1 + s2 * (b2 - b1) as f64;
            (0..len)
                .map(|t| {
                    if t < b1 {
                        s1 * t as f64
                    } else if t < b2 {
                        at_b1 + s2 * (t - b1) as f64
                    } else {
                        at_b2 + s3 * (t - b2) as f64
                    }
                })
                .collect()
        }
    }
}

/// Period schedule for a seasonality regime.
///
/// Variable: whole cycles one after another, each with a period drawn
/// uniformly from [`variable_periods`]; the last cycle may be cut short.
pub fn gen_period_schedule(regime: SeasonRegime, len: usize, seed: u64) -> PeriodSchedule {
    match regime {
        SeasonRegime::Fixed => PeriodSchedule::constant(FIXED_PERIOD, len),
        SeasonRegime::Transitive => {
            let (first, second) = TRANSITIVE_PERIODS;
            let switch = len / 2;
            PeriodSchedule {
                periods: (0..len)
                    .map(|t| if t < switch { first } else { second })
                    .collect(),
            }
        }
        SeasonRegime::Variable => {
            let choices = variable_periods();
            let mut rng = Stream::schedule(seed);
            let mut periods = Vec::with_capacity(len);
            while periods.len() < len {
                let p = choices[rng.choose(choices.len())];
                let take = p.min(len - periods.len());
                periods.extend(std::iter::repeat_n(p, take));
            }
            PeriodSchedule { periods }
        }
    }
}

/// Phase-continuous sine: `s[t] = amplitude * sin(2 pi c_t)` where the cycle
/// count advances by `1 / period_at(t)` per step from `c_0 = 0`.
pub fn gen_seasonal(schedule: &PeriodSchedule, amplitude: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    // Fractional cycle position, numerator over the current period. Exact
    // integer bookkeeping while the period is unchanged keeps whole cycles
    // at phase zero.
    let mut whole_steps = 0usize;
    let mut base = 0.0f64;
    let mut current = schedule.periods.first().copied().unwrap_or(1);
    for t in 0..len {
        let period = schedule.period_at(t);
        if period != current {
            base = (base + whole_steps as f64 / current as f64).fract();
            whole_steps = 0;
            current = period;
        }
        let cycles = (base + (whole_steps % period) as f64 / period as f64).fract();
        out.push(amplitude * (TAU * cycles).sin());
        whole_steps += 1;
    }
    out
}

/// Generate the series described by `spec` together with its components.
pub fn gen_series(spec: &SyntheticSpec) -> Result<(TimeSeries, GroundTruth)> {
    spec.validate()?;
    let len = spec.length;
    let trend = gen_trend(spec.trend, len, spec.trend_scale);
    let schedule = gen_period_schedule(spec.season, len, spec.seed);
    let seasonal = gen_seasonal(&schedule, spec.amplitude, len);
    let noise = gen_noise(len, spec.noise_sigma, spec.seed);
    let total: Vec<f64> = (0..len).map(|t| trend[t] + seasonal[t] + noise[t]).collect();
    let series = TimeSeries::new(total.clone())?;
    Ok((
        series,
        GroundTruth {
            trend,
            seasonal,
            noise,
            total,
        },
    ))
}

/// `len` i.i.d. `N(0, sigma^2)` draws from the noise stream of `seed`.
pub fn gen_noise(len: usize, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = Stream::noise(seed);
    let mut out = Vec::with_capacity(len + 1);
    while out.len() < len {
        let (a, b) = rng.gaussian_pair();
        out.push(sigma * a);
        out.push(sigma * b);
    }
    out.truncate(len);
    out
}

/// Standard normal draws from an independent stream of `seed`; used for
/// test and timing inputs.
pub fn gaussian_series(len: usize, seed: u64) -> Vec<f64> {
    gen_noise(len, 1.0, seed)
}

/// One dataset of the nine-member suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteEntry {
    /// `synth1` .. `synth9`.
    pub id: usize,
    pub spec: SyntheticSpec,
}

impl SuiteEntry {
    pub fn name(&self) -> String {
        format!("synth{}", self.id)
    }

    /// Directory name, e.g. `synth4_invv_fixed`.
    pub fn dir_name(&self) -> String {
        format!("synth{}_{}_{}", self.id, self.spec.trend, self.spec.season)
    }
}

/// The 3 x 3 benchmark grid, trends outer and regimes inner.
pub fn suite(seed: u64) -> Vec<SuiteEntry> {
    let mut entries = Vec::with_capacity(9);
    for trend in TrendKind::ALL {
        for season in SeasonRegime::ALL {
            let id = entries.len() + 1;
            entries.push(SuiteEntry {
                id,
                spec: SyntheticSpec::new(trend, season, seed.wrapping_add(id as u64 - 1)),
            });
        }
    }
    entries
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_trend_endpoints() {
        let t = gen_trend(TrendKind::Linear, 2000, 1.0);
        assert_eq!(t[0], 0.0);
        assert!((t[1999] - 39.98).abs() < 1e-12);
    }

    #[test]
    fn inverted_v_is_symmetric() {
        let t = gen_trend(TrendKind::InvertedV, 2000, 1.0);
        let (argmax, _) = t
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert_eq!(argmax, 1000);
        assert!((t[1000] - 20.0).abs() < 1e-12);
        assert!((t[0] - t[1999]).abs() <= LINEAR_SLOPE + 1e-12);
    }

    #[test]
    fn piecewise_is_continuous() {
        let t = gen_trend(TrendKind::Piecewise, 2000, 1.0);
        let max_jump = t.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
        assert!(max_jump <= 0.05 + 1e-12);
        // Slope signs per segment.
        assert!(t[600] > t[500]);
        assert!(t[1200] < t[1100]);
        assert!(t[1900] > t[1800]);
    }

    #[test]
    fn fixed_and_transitive_schedules() {
        let s = gen_period_schedule(SeasonRegime::Fixed, 2000, 1);
        assert!(s.as_slice().iter().all(|&p| p == 120));
        let s = gen_period_schedule(SeasonRegime::Transitive, 2000, 1);
        assert!(s.as_slice()[..1000].iter().all(|&p| p == 120));
        assert!(s.as_slice()[1000..].iter().all(|&p| p == 60));
    }

    #[test]
    fn variable_schedule_membership_and_cycles() {
        let allowed = variable_periods();
        assert_eq!(allowed.len(), 28);
        assert_eq!(*allowed.last().unwrap(), 477);
        let s = gen_period_schedule(SeasonRegime::Variable, 2000, 7);
        let p = s.as_slice();
        assert!(p.iter().all(|v| allowed.contains(v)));
        // Walk cycle by cycle: each cycle is `period` long, except perhaps the last.
        let mut t = 0;
        let mut full_cycles = 0;
        while t < p.len() {
            let period = p[t];
            let end = (t + period).min(p.len());
            assert!(p[t..end].iter().all(|&v| v == period));
            if end - t == period {
                full_cycles += 1;
            }
            t = end;
        }
        assert!(full_cycles >= 4);
    }

    #[test]
    fn seasonal_whole_cycles_are_zero() {
        let s = gen_seasonal(&PeriodSchedule::constant(120, 1200), 10.0, 1200);
        for k in 0..10 {
            assert!(s[k * 120].abs() <= 1e-6 * 10.0);
        }
        let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!((9.99..=10.0).contains(&max));
        let zero = gen_seasonal(&PeriodSchedule::constant(120, 300), 0.0, 300);
        assert!(zero.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn seasonal_phase_is_continuous_across_switch() {
        let sched = gen_period_schedule(SeasonRegime::Transitive, 2000, 0);
        let s = gen_seasonal(&sched, 10.0, 2000);
        let max_step = s.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
        // Largest possible step for a 60-point period at amplitude 10.
        assert!(max_step <= 10.0 * TAU / 60.0 + 1e-9);
    }

    #[test]
    fn zero_noise_total_is_sum() {
        let mut spec = SyntheticSpec::new(TrendKind::Piecewise, SeasonRegime::Variable, 3);
        spec.noise_sigma = 0.0;
        let (series, truth) = gen_series(&spec).unwrap();
        for t in 0..spec.length {
            assert_eq!(truth.total[t], truth.trend[t] + truth.seasonal[t]);
        }
        assert_eq!(series.values(), truth.total.as_slice());
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = SyntheticSpec::new(TrendKind::Linear, SeasonRegime::Variable, 99);
        let (a, ta) = gen_series(&spec).unwrap();
        let (b, tb) = gen_series(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
        let other = SyntheticSpec { seed: 100, ..spec };
        assert_ne!(gen_series(&other).unwrap().1.noise, ta.noise);
    }

    #[test]
    fn noise_standard_deviation() {
        let spec = SyntheticSpec::new(TrendKind::Linear, SeasonRegime::Fixed, 42);
        let (_, truth) = gen_series(&spec).unwrap();
        let n = truth.noise.len() as f64;
        let mean = truth.noise.iter().sum::<f64>() / n;
        let var = truth.noise.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let sd = var.sqrt();
        assert!((0.93..=1.07).contains(&sd), "sd = {sd}");
    }

    #[test]
    fn short_variable_spec_rejected() {
        let spec = SyntheticSpec {
            length: 1000,
            ..SyntheticSpec::new(TrendKind::Linear, SeasonRegime::Variable, 1)
        };
        assert!(gen_series(&spec).is_err());
    }

    #[test]
    fn suite_grid_order() {
        let s = suite(42);
        assert_eq!(s.len(), 9);
        assert_eq!(s[0].dir_name(), "synth1_linear_fixed");
        assert_eq!(s[4].dir_name(), "synth5_invv_transitive");
        assert_eq!(s[8].dir_name(), "synth9_piecewise_variable");
    }
}
