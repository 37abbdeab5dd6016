//! Stopping-set weight-distribution growth exponent.
//!
//! The generating polynomial is `p(x) = sum_{i != 1} C(r,i) x^i`. The exponent
//! `b(x)` is negative for small `x` and turns positive at a unique root; the
//! relative weight `a(x)/r` there is the distance coefficient.

use serde::{Deserialize, Serialize};

use crate::ensemble::RegularEnsemble;
use crate::error::{invalid, Error, Result};
use crate::numeric::{bisect, h2};

const EXACT_BINOMIAL_MAX_R: u32 = 40;
const SCAN_LO: f64 = 1e-12;
const SCAN_HI: f64 = 10.0;
const SCAN_POINTS: usize = 2000;
const SOLVE_LN_LO: f64 = -27.631021115928547; // ln 1e-12
const SOLVE_LN_HI: f64 = 13.815510557964274; // ln 1e6

/// Values of the generating functions at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsFunctions {
    pub x: f64,
    /// `p(x)`; may be `inf` for large degrees where only `ln_p` is finite.
    pub p: f64,
    pub ln_p: f64,
    /// `x p'(x) / p(x)`.
    pub a: f64,
    pub b: f64,
    /// `a(x) / r`.
    pub omega: f64,
}

/// Root of the exponent and the resulting distance coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsExponentReport {
    pub x_hat: f64,
    pub omega_hat: f64,
    pub l_omega_hat: f64,
    pub b_at_root: f64,
    pub tolerance: f64,
}

/// One point of the growth curve. `x` and `exponent` are `None` when the
/// target weight lies outside the range reachable on the solve bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub omega: f64,
    pub x: Option<f64>,
    pub exponent: Option<f64>,
}

fn binomials_exact(r: u32) -> Vec<f64> {
    let mut row = vec![1u64; r as usize + 1];
    for i in 1..r as usize {
        // C(r,i) = C(r,i-1) (r-i+1) / i, exact in u64 for r <= 40
        row[i] = row[i - 1] * (r as u64 - i as u64 + 1) / i as u64;
    }
    row.into_iter().map(|c| c as f64).collect()
}

fn ln_binomials(r: u32) -> Vec<f64> {
    let mut row = vec![0.0; r as usize + 1];
    for i in 1..=r as usize {
        row[i] = row[i - 1] + ((r as usize - i + 1) as f64).ln() - (i as f64).ln();
    }
    row
}

/// `p(x)`, `a(x)`, `b(x)` and `omega(x)` for `x > 0`.
pub fn ss_generating_functions(e: &RegularEnsemble, x: f64) -> Result<SsFunctions> {
    if !(x > 0.0) || !x.is_finite() {
        return invalid(format!("x must be positive and finite, got {x}"));
    }
    let (l, r) = (e.l() as f64, e.r());
    let (p, ln_p, a) = if r <= EXACT_BINOMIAL_MAX_R {
        let c = binomials_exact(r);
        let mut p = 1.0;
        let mut dp = 0.0;
        let mut xi = x;
        for (i, ci) in c.iter().enumerate().skip(1) {
            if i >= 2 {
                p += ci * xi;
                dp += ci * i as f64 * xi;
            }
            xi *= x;
        }
        (p, p.ln(), dp / p)
    } else {
        let lc = ln_binomials(r);
        let lx = x.ln();
        let terms: Vec<(f64, f64)> = std::iter::once((0.0, 0.0))
            .chain((2..=r as usize).map(|i| (lc[i] + i as f64 * lx, i as f64)))
            .collect();
        let m = terms.iter().fold(f64::NEG_INFINITY, |m, t| m.max(t.0));
        let (mut s, mut si) = (0.0, 0.0);
        for (lt, i) in &terms {
            let w = (lt - m).exp();
            s += w;
            si += w * i;
        }
        let ln_p = m + s.ln();
        (ln_p.exp(), ln_p, si / s)
    };
    let rf = r as f64;
    let omega = a / rf;
    let b =
        -(l - 1.0) * h2(omega) + (l / rf) * ln_p / std::f64::consts::LN_2 - a * (l / rf) * x.log2();
    Ok(SsFunctions {
        x,
        p,
        ln_p,
        a,
        b,
        omega,
    })
}

fn b_of(e: &RegularEnsemble, x: f64) -> f64 {
    ss_generating_functions(e, x)
        .map(|f| f.b)
        .unwrap_or(f64::NAN)
}

/// Positive root of `b` by a log-spaced sign scan on `(1e-12, 10)` and bisection in `ln x`.
pub fn ss_exponent(e: &RegularEnsemble, tol: f64) -> Result<SsExponentReport> {
    if !(tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    let (ln_lo, ln_hi) = (SCAN_LO.ln(), SCAN_HI.ln());
    let step = (ln_hi - ln_lo) / (SCAN_POINTS - 1) as f64;
    let mut prev = (ln_lo, b_of(e, SCAN_LO));
    let mut bracket = None;
    for k in 1..SCAN_POINTS {
        let t = if k == SCAN_POINTS - 1 {
            ln_hi
        } else {
            ln_lo + step * k as f64
        };
        let bt = b_of(e, t.exp());
        if prev.1 < 0.0 && bt >= 0.0 {
            bracket = Some((prev.0, t));
            break;
        }
        prev = (t, bt);
    }
    let (a, b) = bracket.ok_or_else(|| Error::NoBracket {
        what: "stopping-set exponent".into(),
        lo: SCAN_LO,
        hi: SCAN_HI,
    })?;
    // relative tolerance in x maps to absolute tolerance in ln x
    let root = bisect(
        |t| b_of(e, t.exp()),
        a,
        b,
        tol / b.exp(),
        "stopping-set exponent",
    )?;
    let x_hat = root.x.exp();
    let f = ss_generating_functions(e, x_hat)?;
    Ok(SsExponentReport {
        x_hat,
        omega_hat: f.omega,
        l_omega_hat: e.l() as f64 * f.omega,
        b_at_root: f.b,
        tolerance: root.hi.exp() - root.lo.exp(),
    })
}

/// Exponent as a function of relative weight via `omega(x) = target`.
pub fn ss_growth_curve(e: &RegularEnsemble, omega_grid: &[f64]) -> Result<Vec<GrowthPoint>> {
    if let Some(w) = omega_grid.iter().find(|w| !(**w > 0.0 && **w < 1.0)) {
        return invalid(format!("relative weights must lie in (0, 1), got {w}"));
    }
    let om = |t: f64| {
        ss_generating_functions(e, t.exp())
            .map(|f| f.omega)
            .unwrap_or(f64::NAN)
    };
    let (w_lo, w_hi) = (om(SOLVE_LN_LO), om(SOLVE_LN_HI));
    omega_grid
        .iter()
        .map(|&w| {
            if w < w_lo || w > w_hi {
                return Ok(GrowthPoint {
                    omega: w,
                    x: None,
                    exponent: None,
                });
            }
            let root = bisect(
                |t| om(t) - w,
                SOLVE_LN_LO,
                SOLVE_LN_HI,
                1e-14,
                "omega(x) - target",
            )?;
            let x = root.x.exp();
            let f = ss_generating_functions(e, x)?;
            Ok(GrowthPoint {
                omega: w,
                x: Some(x),
                exponent: Some(f.b),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(l: u32, r: u32) -> RegularEnsemble {
        RegularEnsemble::new(l, r).unwrap()
    }

    #[test]
    fn values_at_one_match_binomial_sums() {
        let f = ss_generating_functions(&e(3, 6), 1.0).unwrap();
        assert_eq!(f.p, 58.0);
        assert!((f.a - 186.0 / 58.0).abs() < 1e-15);
        assert!((f.omega - 186.0 / 58.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn direct_formula_oracle() {
        // independent evaluation with f64 binomials from factorials
        let fact = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
        for &(l, r, x) in &[(3u32, 6u32, 0.3f64), (4, 8, 0.07), (5, 12, 2.5)] {
            let c = |i: u32| fact(r) / (fact(i) * fact(r - i));
            let p: f64 = (0..=r)
                .filter(|&i| i != 1)
                .map(|i| c(i) * x.powi(i as i32))
                .sum();
            let dp: f64 = (0..=r)
                .filter(|&i| i != 1)
                .map(|i| c(i) * i as f64 * x.powi(i as i32))
                .sum();
            let a = dp / p;
            let w = a / r as f64;
            let h = -w * w.log2() - (1.0 - w) * (1.0 - w).log2();
            let b = -(l as f64 - 1.0) * h + l as f64 / r as f64 * p.log2()
                - a * l as f64 / r as f64 * x.log2();
            let f = ss_generating_functions(&e(l, r), x).unwrap();
            assert!((f.p - p).abs() < 1e-12 * p);
            assert!((f.a - a).abs() < 1e-12);
            assert!((f.b - b).abs() < 1e-12);
        }
    }

    #[test]
    fn log_domain_agrees_with_exact_branch() {
        // the two code paths evaluated on r = 40 via ln_binomials directly
        let r = 40;
        let lc = ln_binomials(r);
        let c = binomials_exact(r);
        for i in 0..=r as usize {
            assert!((lc[i].exp() - c[i]).abs() <= 1e-12 * c[i]);
        }
        let f = ss_generating_functions(&e(20, 41), 0.5).unwrap();
        assert!(f.b.is_finite() && f.omega > 0.0 && f.omega < 1.0);
    }

    #[test]
    fn rejects_nonpositive_x() {
        assert!(ss_generating_functions(&e(3, 6), 0.0).is_err());
        assert!(ss_generating_functions(&e(3, 6), -1.0).is_err());
    }

    #[test]
    fn b_small_near_reference_root() {
        let f = ss_generating_functions(&e(3, 6), 0.058).unwrap();
        assert!(f.b.abs() < 1e-3, "{}", f.b);
    }

    #[test]
    fn exponent_for_three_six() {
        let rep = ss_exponent(&e(3, 6), 1e-13).unwrap();
        // 30-digit reference evaluation of the same formulas
        assert!((rep.x_hat - 0.058128315862490657).abs() < 1e-12, "{rep:?}");
        assert!(
            (rep.l_omega_hat - 0.053971457537752480).abs() < 1e-12,
            "{rep:?}"
        );
        assert!((rep.x_hat - 0.058).abs() < 2e-3, "{rep:?}");
        assert!(rep.b_at_root.abs() < 1e-10);
        assert!(rep.omega_hat > 0.0 && rep.omega_hat < 1.0);
    }

    #[test]
    fn distance_coefficient_grows_with_left_degree() {
        let a = ss_exponent(&e(3, 6), 1e-13).unwrap();
        let b = ss_exponent(&e(5, 10), 1e-13).unwrap();
        assert!(b.l_omega_hat > a.l_omega_hat, "{a:?} {b:?}");
    }

    #[test]
    fn growth_curve_around_root() {
        let en = e(3, 6);
        let rep = ss_exponent(&en, 1e-14).unwrap();
        let pts = ss_growth_curve(&en, &[rep.omega_hat * 0.9, rep.omega_hat, 0.5]).unwrap();
        assert!(pts[0].exponent.unwrap() < 0.0);
        assert!(pts[1].exponent.unwrap().abs() < 1e-9);
        let p = pts[2];
        assert!(p.exponent.unwrap() > 0.0);
        let direct = ss_generating_functions(&en, p.x.unwrap()).unwrap();
        assert!((direct.omega - 0.5).abs() < 1e-10);
        assert_eq!(direct.b, p.exponent.unwrap());
    }

    #[test]
    fn growth_curve_flags_and_rejects() {
        let en = e(3, 6);
        assert!(ss_growth_curve(&en, &[0.0]).is_err());
        assert!(ss_growth_curve(&en, &[1.0]).is_err());
        let pts = ss_growth_curve(&en, &[1e-30, 0.999999999]).unwrap();
        assert!(pts[0].x.is_none());
        assert!(pts[1].x.is_none());
    }
}
