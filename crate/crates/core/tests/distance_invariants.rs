use bec_coupling::{ss_exponent, ss_generating_functions, RegularEnsemble};
use proptest::prelude::*;
use rayon::prelude::*;

const GRID: usize = 1_000_000;

fn pairs() -> Vec<(u32, u32)> {
    (3..20)
        .flat_map(|l| (l + 1..=20).map(move |r| (l, r)))
        .collect()
}

#[test]
fn exponent_changes_sign_once_and_weight_is_monotone() {
    let (lo, hi) = (1e-12f64.ln(), 1e3f64.ln());
    pairs().par_iter().for_each(|&(l, r)| {
        let e = RegularEnsemble::new(l, r).unwrap();
        let mut changes = 0;
        let mut prev = ss_generating_functions(&e, lo.exp()).unwrap();
        assert!(prev.b < 0.0, "({l},{r}) b starts at {}", prev.b);
        for k in 1..GRID {
            let x = (lo + (hi - lo) * k as f64 / (GRID - 1) as f64).exp();
            let f = ss_generating_functions(&e, x).unwrap();
            assert!(
                f.omega >= prev.omega,
                "({l},{r}) omega decreases at x = {x}"
            );
            if (prev.b < 0.0) != (f.b < 0.0) {
                changes += 1;
            }
            prev = f;
        }
        assert_eq!(changes, 1, "({l},{r})");
    });
}

#[test]
fn root_lies_where_the_scan_changes_sign() {
    for (l, r) in pairs() {
        let e = RegularEnsemble::new(l, r).unwrap();
        let rep = ss_exponent(&e, 1e-13).unwrap();
        let below = ss_generating_functions(&e, rep.x_hat * (1.0 - 1e-9))
            .unwrap()
            .b;
        let above = ss_generating_functions(&e, rep.x_hat * (1.0 + 1e-9))
            .unwrap()
            .b;
        assert!(below < 0.0 && above > 0.0, "({l},{r}) {rep:?}");
        assert!((rep.l_omega_hat - l as f64 * rep.omega_hat).abs() < 1e-15);
    }
}

proptest! {
    #[test]
    fn weight_stays_in_unit_interval(l in 3u32..30, extra in 1u32..40, lx in -20.0f64..6.0) {
        let e = RegularEnsemble::new(l, l + extra).unwrap();
        let f = ss_generating_functions(&e, lx.exp()).unwrap();
        prop_assert!(f.omega > 0.0 && f.omega < 1.0);
        prop_assert!(f.b.is_finite());
        prop_assert!(f.ln_p >= 0.0);
    }
}
