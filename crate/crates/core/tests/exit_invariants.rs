use bec_coupling::de::{forward_de, Coupled, DeConfig, DeSystem, Schedule, Variant};
use bec_coupling::exit::{default_wiggle_band, ebp_curve, wiggle_report, ExitCurve};
use bec_coupling::landscape::h_landscape;
use bec_coupling::numeric::powi;
use bec_coupling::thresholds::thresholds_regular;
use bec_coupling::RegularEnsemble;

fn cfg() -> DeConfig {
    DeConfig::default()
}

fn grid(n: usize) -> Vec<f64> {
    (1..n).map(|k| k as f64 / n as f64).collect()
}

#[test]
fn coupled_ebp_eps_between_bp_threshold_and_one() {
    for (variant, l, r, half, w) in [
        (Variant::Smoothed, 3, 6, 16, 3),
        (Variant::Smoothed, 3, 6, 16, 2),
        (Variant::Chain, 3, 6, 16, 0),
        (Variant::Smoothed, 4, 8, 10, 3),
    ] {
        let sys = Coupled::build(variant, l, r, half, w).unwrap();
        let eps_bp = thresholds_regular(&sys.base(), 1e-14).unwrap().eps_bp;
        let curve = ebp_curve(&sys, &grid(1000), &cfg()).unwrap();
        // upper end: entropy of the largest fixed point at eps = 1
        let top = forward_de(&sys, 1.0, Schedule::Parallel, &cfg()).unwrap();
        let chi_top = sys.entropy(&top.state);
        // lower end: left boundary tail where eps(chi) > 1
        let tail = curve.points.iter().find(|p| p.eps <= 1.0).unwrap().chi;
        assert!(tail < 0.05, "{} tail ends at {tail}", sys.describe());
        let inside: Vec<_> = curve
            .points
            .iter()
            .filter(|p| p.chi >= tail && p.chi <= chi_top)
            .collect();
        assert!(inside.len() > 900);
        for p in inside {
            assert!(p.converged);
            assert!(
                p.eps <= 1.0 && p.eps > eps_bp - 1e-6,
                "{} {p:?}",
                sys.describe()
            );
        }
    }
}

#[test]
fn bp_exit_curve_is_non_decreasing() {
    for (l, r) in [(3, 6), (4, 8), (3, 4), (5, 12)] {
        let e = RegularEnsemble::new(l, r).unwrap();
        let bp = thresholds_regular(&e, 1e-14).unwrap().eps_bp;
        let h_bp = |eps: f64| {
            if eps <= bp {
                0.0
            } else {
                powi(e.check_out(h_landscape(eps, &e, 1e-14).unwrap().x_s), l)
            }
        };
        let values: Vec<f64> = (0..=2000).map(|k| h_bp(k as f64 / 2000.0)).collect();
        assert!(values.windows(2).all(|w| w[1] >= w[0]), "({l},{r})");
        assert!((values[2000] - 1.0).abs() < 1e-15);
    }
}

#[test]
fn chain_endpoint_tends_to_unit_corner() {
    let sys = Coupled::build(Variant::Chain, 3, 6, 16, 0).unwrap();
    let c = ebp_curve(&sys, &[0.5, 0.9, 0.99, 0.999, 0.9999], &cfg()).unwrap();
    let last = c.points[4];
    assert!(
        (last.eps - 1.0).abs() < 1e-3 && (last.h_ebp - 1.0).abs() < 1e-3,
        "{last:?}"
    );
}

#[test]
fn smoothed_endpoint_offset_shrinks_like_inverse_length() {
    // zero-padded boundary sections keep g < 1, so the corner is missed by O(w/L)
    let end = |half: usize| {
        let sys = Coupled::build(Variant::Smoothed, 3, 6, half, 3).unwrap();
        let c = ebp_curve(&sys, &[0.5, 0.9, 0.99, 0.999, 0.9999], &cfg()).unwrap();
        let p = c.points[4];
        (p.eps - 1.0, 1.0 - p.h_ebp)
    };
    let (a, b, c) = (end(16), end(32), end(64));
    for (fine, coarse) in [(b, a), (c, b)] {
        for (f, k) in [(fine.0, coarse.0), (fine.1, coarse.1)] {
            assert!(
                f > 0.0 && f / k > 0.45 && f / k < 0.55,
                "{fine:?} {coarse:?}"
            );
        }
    }
}

fn max_jump(c: &ExitCurve) -> f64 {
    c.points
        .windows(2)
        .map(|w| {
            (w[1].eps - w[0].eps)
                .abs()
                .max((w[1].h_ebp - w[0].h_ebp).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn ebp_points_vary_continuously_under_refinement() {
    for (variant, half, w) in [(Variant::Smoothed, 16, 3), (Variant::Chain, 16, 0)] {
        let sys = Coupled::build(variant, 3, 6, half, w).unwrap();
        let mut prev = f64::INFINITY;
        for n in [100usize, 200, 400, 800] {
            let g: Vec<f64> = (0..=n).map(|k| 0.05 + 0.9 * k as f64 / n as f64).collect();
            let j = max_jump(&ebp_curve(&sys, &g, &cfg()).unwrap());
            let spacing = 0.9 / n as f64;
            assert!(j <= 10.0 * spacing, "{} n={n}: {j}", sys.describe());
            assert!(j <= 0.6 * prev, "{} n={n}: {j} vs {prev}", sys.describe());
            prev = j;
        }
    }
}

#[test]
fn smoothed_point_regression() {
    let sys = Coupled::build(Variant::Smoothed, 3, 6, 16, 3).unwrap();
    let e = sys.base();
    let t = thresholds_regular(&e, 1e-14).unwrap();
    let p = ebp_curve(&sys, &[0.25], &cfg()).unwrap().points[0];
    assert!(p.converged && p.eps >= t.eps_bp && p.eps <= 1.0);
    assert!((p.eps - 0.4881509038).abs() < 1e-9, "{p:?}");
}

#[test]
fn chain_steep_branch_near_map_threshold() {
    let sys = Coupled::build(Variant::Chain, 3, 6, 32, 0).unwrap();
    let curve = ebp_curve(&sys, &grid(401), &cfg()).unwrap();
    let band = default_wiggle_band(&sys.base()).unwrap();
    let rep = wiggle_report(&curve, band).unwrap();
    assert!(
        (rep.eps_min - 0.488151).abs() < 1e-3 && (rep.eps_max - 0.488151).abs() < 1e-3,
        "{rep:?}"
    );
    assert!(rep.amplitude < 1e-5);
}

#[test]
fn wiggles_shrink_with_window() {
    let band = default_wiggle_band(&RegularEnsemble::new(3, 6).unwrap()).unwrap();
    let amp = |w: usize| {
        let sys = Coupled::build(Variant::Smoothed, 3, 6, 16, w).unwrap();
        wiggle_report(&ebp_curve(&sys, &grid(401), &cfg()).unwrap(), band)
            .unwrap()
            .amplitude
    };
    let (a2, a3) = (amp(2), amp(3));
    assert!(a2 / a3 > 1e3, "{a2:e} / {a3:e}");
}

#[test]
fn single_point_band_has_zero_amplitude() {
    let sys = Coupled::build(Variant::Smoothed, 3, 6, 16, 3).unwrap();
    let curve = ebp_curve(&sys, &[0.2, 0.25, 0.3], &cfg()).unwrap();
    let rep = wiggle_report(&curve, (0.25, 0.25)).unwrap();
    assert_eq!(rep.points, 1);
    assert_eq!(rep.amplitude, 0.0);
}
