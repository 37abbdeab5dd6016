use bec_coupling::fp::{
    construct_one_sided_fp, eps_star_bound_check, family_area, fp_diagnostics, one_sided_residual,
    FpConfig, InterpolatedFamily, OneSidedFP,
};

fn build(l: u32, r: u32, w: usize, lp: usize, chi: f64) -> OneSidedFP {
    let cfg = FpConfig {
        enforce_length_bound: false,
        ..FpConfig::default()
    };
    construct_one_sided_fp(l, r, w, lp, chi, &cfg).unwrap()
}

const BUILDS: [(u32, u32, usize, usize, f64); 7] = [
    (3, 6, 2, 12, 0.2),
    (3, 6, 2, 64, 0.3),
    (3, 6, 3, 64, 0.2),
    (3, 6, 4, 64, 0.25),
    (4, 8, 3, 32, 0.3),
    (3, 5, 2, 24, 0.3),
    (3, 6, 40, 400, 0.3),
];

#[test]
fn every_constructed_fixed_point_is_accurate_and_within_bounds() {
    for (l, r, w, lp, chi) in BUILDS {
        let fp = build(l, r, w, lp, chi);
        assert!(fp.is_proper(), "({l},{r},w={w},L'={lp})");
        assert!(
            fp.residual < 1e-8,
            "({l},{r},w={w},L'={lp}) residual {:e}",
            fp.residual
        );
        let recomputed = one_sided_residual(&fp.params, fp.x.values(), fp.eps_star);
        assert!(recomputed < 1e-8);
        assert!((fp.x.entropy() - chi).abs() < 1e-12);
        let d = fp_diagnostics(&fp, 0.05).unwrap();
        assert!(d.max_bracket_ok, "({l},{r},w={w},L'={lp}) {d:?}");
        assert!(
            d.spacing_violations.is_empty(),
            "({l},{r},w={w},L'={lp}) spacing {:?}",
            d.spacing_violations
        );
        assert!(
            d.avg_bound_violations.iter().all(Vec::is_empty),
            "({l},{r},w={w},L'={lp}) {:?}",
            d.avg_bound_violations
        );
        let b = eps_star_bound_check(&fp, lp / 2).unwrap();
        assert!(!b.formal_regime && b.lhs.is_finite());
    }
}

#[test]
fn family_area_within_rate_bound_on_every_build() {
    for (l, r, w, lp, chi) in BUILDS {
        let fp = build(l, r, w, lp, chi);
        for half in [lp / 2, 3 * lp / 4] {
            let fam = InterpolatedFamily::new(fp.clone(), half).unwrap();
            let a = family_area(&fam, 2000).unwrap();
            assert!(
                a.residual <= a.bound,
                "({l},{r},w={w},L'={lp},L={half}) {a:?}"
            );
            assert!(a.refinement_delta < 1e-4);
        }
    }
}

#[test]
fn larger_family_area_regression() {
    let fam = InterpolatedFamily::new(build(3, 6, 3, 64, 0.2), 48).unwrap();
    let a = family_area(&fam, 2000).unwrap();
    assert!((a.a - 0.492532).abs() < 2e-4, "{a:?}");
    assert!(a.residual < 0.01);
}

fn max_step(fam: &InterpolatedFamily, n: usize) -> f64 {
    let mut prev = fam.constellation(0.0);
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        let next = fam.constellation(k as f64 / n as f64);
        worst = worst.max(
            prev.iter()
                .zip(&next)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
        prev = next;
    }
    worst
}

#[test]
fn family_is_continuous_in_alpha() {
    let fam = InterpolatedFamily::new(build(3, 6, 2, 12, 0.2), 6).unwrap();
    let coarse = max_step(&fam, 5_000);
    let fine = max_step(&fam, 10_000);
    assert!(fine < 1e-2, "{fine}");
    assert!(fine <= 0.55 * coarse, "{fine} vs {coarse}");
    for seam in [0.25, 0.5, 0.75] {
        let below = fam.constellation(seam - 1e-13);
        let above = fam.constellation(seam + 1e-13);
        let gap = below
            .iter()
            .zip(&above)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-9, "seam {seam}: {gap:e}");
    }
}

#[test]
fn phase_three_moves_one_section_per_period() {
    let (lp, half) = (12usize, 6usize);
    let fam = InterpolatedFamily::new(build(3, 6, 2, lp, 0.2), half).unwrap();
    let period = 1.0 / (4.0 * (lp - half) as f64);
    let l = half as isize;
    for k in 0..200 {
        let alpha = 0.25 + period + (0.25 - period) * (k as f64 + 0.5) / 200.0;
        let shifted = alpha - period;
        for i in -l + 1..=0 {
            let a = fam.left_value(i, shifted);
            let b = fam.left_value(i - 1, alpha);
            assert!(
                (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) + 1e-300,
                "alpha {alpha} i {i}: {a} vs {b}"
            );
        }
    }
    for m in 2..(lp - half) {
        let alpha = 0.25 + m as f64 * period;
        for i in -l + 1..=0 {
            let (a, b) = (
                fam.left_value(i, alpha - period),
                fam.left_value(i - 1, alpha),
            );
            assert!(
                (a - b).abs() <= 1e-12 * a.abs().max(b.abs()),
                "m {m} i {i}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn phase_three_channel_bounds_for_wide_window() {
    let fam = InterpolatedFamily::new(build(3, 6, 40, 400, 0.3), 300).unwrap();
    for k in 0..=20 {
        let alpha = 0.25 + 0.25 * k as f64 / 20.0;
        let rep = fam.phase_three_bounds(alpha).unwrap();
        assert!(rep.checked > 0);
        assert!(
            rep.violations.is_empty(),
            "alpha {alpha}: {:?}",
            rep.violations
        );
    }
}

#[test]
fn transition_length_grows_at_most_proportionally_with_window() {
    let count = |w: usize| {
        fp_diagnostics(&build(3, 6, w, 64, 0.2), 0.05)
            .unwrap()
            .transition_count
    };
    for (w, wide) in [(2usize, 3usize), (4, 6)] {
        let (a, b) = (count(w), count(wide));
        assert!(a >= 1 && b >= a, "w {w}: {a}, w {wide}: {b}");
        assert!(b <= 2 * a, "w {w}: {a}, w {wide}: {b}");
    }
}
