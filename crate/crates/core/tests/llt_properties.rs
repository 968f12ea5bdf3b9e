mod common;

use common::{naive_llt, rel_close};
use lgtd::llt::{llt_run, partition_ranges, percentile, FocusSet};
use lgtd::{LltParams, UNASSIGNED};
use proptest::prelude::*;

fn series(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0..100.0f64, 8..max_len)
}

fn params() -> impl Strategy<Value = LltParams> {
    (2usize..7, 1usize..30, 2u32..=200, prop::sample::select(vec![0.5, 1.0, 2.5, 5.0, 10.0, 25.0]), any::<bool>())
        .prop_map(|(window, max_iterations, p0, step, update)| LltParams {
            window,
            max_iterations,
            baseline_percentile: p0 as f64 / 2.0,
            percentile_step: if update { step } else { 0.0 },
            update_threshold: update,
        })
}

proptest! {
    #[test]
    fn matches_naive_transcription(y in series(200), p in params()) {
        let fast = llt_run(&y, &p).unwrap();
        let slow = naive_llt(&y, &p);
        prop_assert_eq!(&fast.labels, &slow.labels);
        prop_assert_eq!(fast.iterations_used, slow.iterations);
        for (a, b) in fast.local_trend.iter().zip(&slow.local_trend) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        prop_assert_eq!(fast.models.len(), slow.models.len());
        for (m, o) in fast.models.iter().zip(&slow.models) {
            prop_assert!(rel_close(m.slope, o.0, 1e-12) && rel_close(m.intercept, o.1, 1e-12));
            prop_assert_eq!((m.range_start, m.range_end, m.iteration), (o.2, o.3, o.4));
        }
    }

    #[test]
    fn terminates_within_bound(y in series(400), p0 in 1u32..=100, step in prop::sample::select(vec![5.0, 10.0, 20.0])) {
        let p = LltParams {
            baseline_percentile: p0 as f64,
            percentile_step: step,
            max_iterations: 40,
            ..LltParams::default()
        };
        let bound = p.termination_bound().unwrap();
        prop_assert_eq!(bound, 1 + ((100.0 - p0 as f64) / step).ceil() as usize);
        let r = llt_run(&y, &p).unwrap();
        prop_assert!(r.iterations_used <= bound);
        prop_assert!(r.remaining_focus(p.window).is_empty());
    }

    #[test]
    fn every_iteration_claims_points(y in series(300), p in params()) {
        let r = llt_run(&y, &p).unwrap();
        for k in 1..=r.iterations_used as i32 {
            prop_assert!(r.labels.contains(&k));
        }
        prop_assert_eq!(r.thresholds.len(), r.iterations_used);
    }

    #[test]
    fn assigned_points_within_threshold(y in series(300), p in params()) {
        let r = llt_run(&y, &p).unwrap();
        for (t, &m) in r.labels.iter().enumerate() {
            if m != UNASSIGNED {
                prop_assert!((y[t] - r.local_trend[t]).abs() <= r.thresholds[m as usize - 1]);
            }
        }
    }

    #[test]
    fn label_domain_and_finite_trend(y in series(300), p in params()) {
        let r = llt_run(&y, &p).unwrap();
        prop_assert!(r.labels[..p.window.min(y.len())].iter().all(|&m| m == UNASSIGNED));
        prop_assert!(r.labels.iter().all(|&m| m == UNASSIGNED || (1..=r.iterations_used as i32).contains(&m)));
        prop_assert!(r.local_trend.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn labels_shift_and_scale_equivariant(y in series(300), p in params(), c in -50.0..50.0f64, e in -4i32..4, s in 0.1..10.0f64) {
        let base = llt_run(&y, &p).unwrap();
        let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
        prop_assert_eq!(&llt_run(&shifted, &p).unwrap().labels, &base.labels);
        let dyadic = 2f64.powi(e);
        let exact: Vec<f64> = y.iter().map(|v| v * dyadic).collect();
        let r = llt_run(&exact, &p).unwrap();
        prop_assert_eq!(&r.labels, &base.labels);
        for (a, b) in r.local_trend.iter().zip(&base.local_trend) {
            prop_assert_eq!(*a, b * dyadic);
        }
        let scaled: Vec<f64> = y.iter().map(|v| v * s).collect();
        prop_assert_eq!(&llt_run(&scaled, &p).unwrap().labels, &base.labels);
    }

    #[test]
    fn partition_covers_focus(mut idx in prop::collection::vec(0usize..500, 1..200)) {
        idx.sort_unstable();
        idx.dedup();
        let focus = FocusSet::from_indices(idx.clone());
        let ranges = partition_ranges(&focus).unwrap();
        let flat: Vec<usize> = ranges.iter().flat_map(|r| r.start..=r.end).collect();
        prop_assert_eq!(flat, idx);
        for pair in ranges.windows(2) {
            prop_assert!(pair[1].start > pair[0].end + 1);
        }
    }

    #[test]
    fn percentile_between_extremes(e in prop::collection::vec(0.0..1e3f64, 1..100), p in 0.5..150.0f64) {
        let tau = percentile(&e, p).unwrap();
        let lo = e.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= tau && tau <= hi);
        if p >= 100.0 {
            prop_assert_eq!(tau, hi);
        }
    }
}

#[test]
fn percentile_is_monotone_in_p() {
    let e: Vec<f64> = (0..37).map(|i| ((i * 7919) % 101) as f64).collect();
    let mut prev = f64::NEG_INFINITY;
    for p in 1..=100 {
        let tau = percentile(&e, p as f64).unwrap();
        assert!(tau >= prev);
        prev = tau;
    }
}
