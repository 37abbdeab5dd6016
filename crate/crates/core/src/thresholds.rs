//! BP and MAP thresholds of regular ensembles from their threshold polynomials.

use serde::{Deserialize, Serialize};

use crate::ensemble::RegularEnsemble;
use crate::error::{invalid, Error, Result};
use crate::numeric::{bisect, powi};

/// Thresholds of a regular ensemble together with the polynomial roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub eps_bp: f64,
    pub eps_map: f64,
    pub x_bp: f64,
    pub x_map: f64,
    /// Largest final bracket width of the two root searches.
    pub tolerance: f64,
}

/// `((l-1)(r-1) - 1)(1-x)^(r-2) - sum_{i=0}^{r-3} (1-x)^i`.
pub fn p_bp(e: &RegularEnsemble, x: f64) -> f64 {
    let (l, r) = (e.l(), e.r());
    let z = 1.0 - x;
    let lead = ((l - 1) * (r - 1) - 1) as f64 * powi(z, r - 2);
    let mut s = 0.0;
    let mut zi = 1.0;
    for _ in 0..r.saturating_sub(2) {
        s += zi;
        zi *= z;
    }
    lead - s
}

/// `x + (1/r)(1-x)^(r-1)(l + l(r-1)x - r x) - l/r`.
pub fn p_map(e: &RegularEnsemble, x: f64) -> f64 {
    let (l, r) = (e.l() as f64, e.r() as f64);
    x + powi(1.0 - x, e.r() - 1) * (l + l * (r - 1.0) * x - r * x) / r - l / r
}

/// Both thresholds by bisection on the threshold polynomials.
pub fn thresholds_regular(e: &RegularEnsemble, tol: f64) -> Result<ThresholdReport> {
    if !(tol > 0.0 && tol < 1e-2) {
        return invalid(format!("tolerance {tol} outside (0, 1e-2)"));
    }
    if e.r() == e.l() {
        return invalid("rate-zero ensemble (r = l) has no MAP root in (0, 1)");
    }
    let bp = bisect(|x| p_bp(e, x), tol, 1.0 - tol, tol, "p_BP")?;
    let lower = e.x_bp_lower_bound();
    if bp.x < lower - tol {
        return Err(Error::Precondition(format!(
            "BP root {} below its lower bound {lower}",
            bp.x
        )));
    }
    // p_MAP vanishes to second order at 0 and stays negative up to its root, which exceeds x_BP.
    let map = bisect(|x| p_map(e, x), bp.x, 1.0 - tol, tol, "p_MAP")?;
    Ok(ThresholdReport {
        eps_bp: e.eps_of_x(bp.x),
        eps_map: e.eps_of_x(map.x),
        x_bp: bp.x,
        x_map: map.x,
        tolerance: (bp.hi - bp.lo).max(map.hi - map.lo),
    })
}

/// Large-degree approximation of the MAP threshold at fixed design rate.
pub fn map_threshold_asymptotic(rate: f64, l: u32) -> Result<(f64, f64)> {
    if !(rate > 0.0 && rate < 1.0) {
        return invalid(format!("rate {rate} outside (0, 1)"));
    }
    if l < 3 {
        return invalid(format!("l = {l} unsupported, need l >= 3"));
    }
    let lf = l as f64;
    let e1 = lf / (1.0 - rate);
    let num = rate.powf(e1 - 1.0) * (lf + rate - 1.0);
    let den = 1.0 - rate.powf(e1 - 2.0) * (1.0 + lf * (lf + rate - 2.0));
    let x = (1.0 - rate) * (1.0 - num / den);
    let eps = x * (1.0 + (1.0 - rate - x) / ((lf + rate - 1.0) * x)).powi(l as i32 - 1);
    Ok((x, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(l: u32, r: u32) -> RegularEnsemble {
        RegularEnsemble::new(l, r).unwrap()
    }

    #[test]
    fn reference_3_6() {
        let t = thresholds_regular(&e(3, 6), 1e-13).unwrap();
        assert!((t.eps_bp - 0.42944).abs() < 1e-5, "{}", t.eps_bp);
        assert!((t.eps_map - 0.488151).abs() < 1e-6, "{}", t.eps_map);
        assert!(t.x_bp >= 1.0 - 2f64.powf(-0.25));
    }

    #[test]
    fn reference_map_series() {
        for (l, v) in [(4, 0.49774), (5, 0.499486), (6, 0.499876), (7, 0.499969)] {
            let t = thresholds_regular(&e(l, 2 * l), 1e-13).unwrap();
            assert!((t.eps_map - v).abs() < 1e-5, "l = {l}: {}", t.eps_map);
        }
    }

    #[test]
    fn p_bp_closed_form_oracle() {
        // sum_{i=0}^{r-3} z^i = (1 - z^(r-2))/x with z = 1 - x
        for (l, r) in [(3, 6), (4, 9), (5, 11)] {
            let en = e(l, r);
            for k in 1..50 {
                let x = k as f64 / 50.0;
                let z = 1.0 - x;
                let oracle = (((l - 1) * (r - 1) - 1) as f64) * z.powi(r as i32 - 2)
                    - (1.0 - z.powi(r as i32 - 2)) / x;
                assert!((p_bp(&en, x) - oracle).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn bp_root_against_grid_scan() {
        let en = e(3, 6);
        let t = thresholds_regular(&en, 1e-13).unwrap();
        let n = 100_000;
        let mut cross = None;
        for k in 1..n {
            let (a, b) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
            if p_bp(&en, a) > 0.0 && p_bp(&en, b) <= 0.0 {
                cross = Some(a);
            }
        }
        let a = cross.unwrap();
        assert!(t.x_bp >= a && t.x_bp <= a + 1.0 / n as f64);
        assert!(t.x_bp >= 0.159104);
    }

    #[test]
    fn bp_is_min_of_eps_curve() {
        let en = e(3, 6);
        let t = thresholds_regular(&en, 1e-13).unwrap();
        let n = 100_000;
        let m = (1..=n)
            .map(|k| en.eps_of_x(k as f64 / n as f64))
            .fold(f64::INFINITY, f64::min);
        assert!((m - t.eps_bp).abs() < 1e-6);
    }

    #[test]
    fn asymptotic_map() {
        let (_, e7) = map_threshold_asymptotic(0.5, 7).unwrap();
        assert!((e7 - 0.499969).abs() < 1e-3);
        let (_, e5) = map_threshold_asymptotic(0.5, 5).unwrap();
        assert!((e5 - 0.499486).abs() < 2e-3);
        let (_, e30) = map_threshold_asymptotic(0.5, 30).unwrap();
        assert!((e30 - 0.5).abs() < 1e-9);
        for l in 4..=7 {
            let poly = thresholds_regular(&e(l, 2 * l), 1e-13).unwrap().eps_map;
            let (_, a) = map_threshold_asymptotic(0.5, l).unwrap();
            assert!((a - poly).abs() < 2e-3, "l = {l}: {a} vs {poly}");
        }
    }

    #[test]
    fn rejects_bad_rate() {
        assert!(map_threshold_asymptotic(0.0, 5).is_err());
        assert!(map_threshold_asymptotic(1.0, 5).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn thresholds_are_ordered(l in 3u32..9, extra in 1u32..12) {
            let en = e(l, l + extra);
            let t = thresholds_regular(&en, 1e-12).unwrap();
            prop_assert!(t.eps_bp < t.eps_map);
            prop_assert!(t.eps_map <= 1.0 - en.design_rate() + 1e-12);
            prop_assert!(t.x_bp < t.x_map);
            prop_assert!(p_map(&en, t.x_map).abs() < 1e-9);
        }
    }
}
