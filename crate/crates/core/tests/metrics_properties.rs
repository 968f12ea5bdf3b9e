use lgtd::metrics::{mae, mse};
use proptest::prelude::*;

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..200).prop_flat_map(|n| {
        (
            prop::collection::vec(-1e3..1e3f64, n),
            prop::collection::vec(-1e3..1e3f64, n),
        )
    })
}

proptest! {
    #[test]
    fn mae_bounded_by_rmse((a, b) in pair()) {
        let m = mae(&a, &b).unwrap();
        prop_assert!(m >= 0.0);
        prop_assert!(m <= mse(&a, &b).unwrap().sqrt() * (1.0 + 1e-12));
    }

    #[test]
    fn symmetric((a, b) in pair()) {
        prop_assert_eq!(mae(&a, &b).unwrap(), mae(&b, &a).unwrap());
        prop_assert_eq!(mse(&a, &b).unwrap(), mse(&b, &a).unwrap());
    }

    #[test]
    fn translation_invariant((a, b) in pair(), c in -1e3..1e3f64) {
        let ac: Vec<f64> = a.iter().map(|v| v + c).collect();
        let bc: Vec<f64> = b.iter().map(|v| v + c).collect();
        let (m0, m1) = (mae(&a, &b).unwrap(), mae(&ac, &bc).unwrap());
        prop_assert!((m0 - m1).abs() <= 1e-9 * (1.0 + m0));
    }

    #[test]
    fn zero_on_identical(a in prop::collection::vec(-1e3..1e3f64, 1..100)) {
        prop_assert_eq!(mae(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(mse(&a, &a).unwrap(), 0.0);
    }
}
