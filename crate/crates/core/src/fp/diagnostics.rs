//! Numeric checks of the bounds satisfied by one-sided fixed points and their families.

use serde::{Deserialize, Serialize};

use super::{InterpolatedFamily, OneSidedFP};
use crate::de::{forward_de, DeConfig, OneSidedSystem, Schedule};
use crate::error::{invalid, Error, Result};
use crate::landscape::h_landscape;
use crate::numeric::{one_minus_pow, powi};
use crate::thresholds::thresholds_regular;

/// Bound on `|eps_MAP - eps*|` evaluated at a concrete build.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// `w > max{2^4 l^2 r^2, 2^16}`; otherwise the check is report-only.
    pub formal_regime: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub c: f64,
    pub satisfied: bool,
    pub slack: f64,
}

/// Evaluates both sides of the `eps*` bound for a family of half-length `half_length`.
pub fn eps_star_bound_check(fp: &OneSidedFP, half_length: usize) -> Result<BoundReport> {
    let e = fp.base();
    if half_length < 1 || half_length >= fp.length() {
        return invalid(format!("need 1 <= L < L' = {}", fp.length()));
    }
    let (l, r, w) = (e.l() as f64, e.r() as f64, fp.w() as f64);
    let big_l = half_length as isize;
    let lp = fp.length() as isize;
    let x = |i: isize| fp.x.get(i);
    let eps_map = thresholds_regular(&e, 1e-14)?.eps_map;
    let x_s = h_landscape(fp.eps_star.min(1.0), &e, 1e-14)?.x_s;
    let shrink = 1.0 - 4.0 * w.powf(-0.125);
    let last = if shrink > 0.0 {
        2.0 * r * l * l / shrink.powf(r) * w.powf(-0.875)
    } else {
        f64::INFINITY
    };
    let c = 4.0 * l * r * w.powf(-0.125)
        + w * l * (2.0 + r) / half_length as f64
        + l * r * (x(-lp + big_l) + x(0) - x(-big_l))
        + last;
    let lhs = (eps_map - fp.eps_star).abs();
    let denom = 1.0 - (l - 1.0).powf(-1.0 / (r - 2.0));
    let rhs = (2.0 * l * r * (x(0) - x_s).abs() + c) / (denom * denom);
    let formal_regime = w > f64::max(16.0 * l * l * r * r, 65536.0);
    Ok(BoundReport {
        formal_regime,
        lhs,
        rhs,
        c,
        satisfied: lhs <= rhs,
        slack: rhs - lhs,
    })
}

/// Pointwise checks of a proper one-sided fixed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FpDiagnostics {
    pub x_u: f64,
    pub x_s: f64,
    pub x0: f64,
    /// `max_i |x_i - eps* U(x)_i| / x_i` over nonzero sections.
    pub relative_residual: f64,
    /// `x_u(eps*) <= x_0 <= x_s(eps*)`.
    pub max_bracket_ok: bool,
    /// Sections violating the spacing bound.
    pub spacing_violations: Vec<isize>,
    /// Sections violating each of the four averaged bounds.
    pub avg_bound_violations: [Vec<isize>; 4],
    pub delta: f64,
    /// `|{i : delta < x_i < x_s(eps*) - delta}|`.
    pub transition_count: usize,
}

impl FpDiagnostics {
    pub fn all_ok(&self) -> bool {
        self.max_bracket_ok
            && self.spacing_violations.is_empty()
            && self.avg_bound_violations.iter().all(Vec::is_empty)
    }
}

/// `lhs <= rhs` up to relative slack `rel`.
fn within(lhs: f64, rhs: f64, rel: f64) -> bool {
    lhs <= rhs + rel * rhs.abs().max(lhs.abs()) + 1e-300
}

/// Bracket, spacing, averaged bounds and transition count of a proper one-sided FP.
pub fn fp_diagnostics(fp: &OneSidedFP, delta: f64) -> Result<FpDiagnostics> {
    if !fp.is_proper() {
        return invalid("diagnostics need a proper one-sided fixed point");
    }
    let e = fp.base();
    let eps = fp.eps_star;
    let land = h_landscape(eps, &e, 1e-14)?;
    let (l, r) = (e.l(), e.r());
    let (lf, rf) = (l as f64, r as f64);
    let w = fp.w() as isize;
    let wf = w as f64;
    let lp = fp.length() as isize;
    let x = |i: isize| fp.x.get(i);
    let x0 = x(0);
    let slack = 1e-12;
    let u = OneSidedSystem::new(fp.params).u_map(fp.x.values());
    let relative_residual =
        fp.x.values()
            .iter()
            .zip(&u)
            .filter(|(xi, _)| **xi > 0.0)
            .map(|(xi, ui)| (xi - eps * ui).abs() / xi)
            .fold(0.0, f64::max);
    // the bounds hold for exact fixed points; allow for the measured relative error
    let rel = 1e-12 + 8.0 * relative_residual;
    let max_bracket_ok = x0 >= land.x_u - slack && x0 <= land.x_s + slack;

    let mut spacing_violations = Vec::new();
    for i in (-lp + 1)..=0 {
        let sum: f64 = (0..w).map(|k| x(i + k)).sum();
        let bound = eps * (lf - 1.0) * (rf - 1.0) * (x(i) / eps).powf((lf - 2.0) / (lf - 1.0))
            / (wf * wf)
            * sum;
        if !within(x(i) - x(i - 1), bound, rel) {
            spacing_violations.push(i);
        }
    }

    let mut avg: [Vec<isize>; 4] = Default::default();
    for i in -lp..=0 {
        let mut xbar = 0.0;
        for j in 0..w {
            for k in 0..w {
                xbar += x(i + j - k);
            }
        }
        xbar /= wf * wf;
        let top: f64 = (0..w).map(|k| x(i + w - 1 - k)).sum::<f64>() / wf;
        let xi = x(i);
        let b1 = eps * powi(one_minus_pow(xbar, r - 1), l - 1);
        let b2 = eps * powi((rf - 1.0) * xbar, l - 1);
        let b3 = eps * powi(xbar, l - 1);
        let b4 = eps * powi(powi(1.0 - top, r - 2) * (rf - 1.0) * xbar, l - 1);
        if !within(xi, b1, rel) {
            avg[0].push(i);
        }
        if !within(xi, b2, rel) {
            avg[1].push(i);
        }
        if !within(b3, xi, rel) {
            avg[2].push(i);
        }
        if !within(b4, xi, rel) {
            avg[3].push(i);
        }
    }

    let transition_count =
        fp.x.values()
            .iter()
            .filter(|&&v| v > delta && v < land.x_s - delta)
            .count();
    Ok(FpDiagnostics {
        x_u: land.x_u,
        x_s: land.x_s,
        x0,
        relative_residual,
        max_bracket_ok,
        spacing_violations,
        avg_bound_violations: avg,
        delta,
        transition_count,
    })
}

/// Outcome of a forward-DE run below the family's channel envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub beta: f64,
    /// Infimum of finite local channel parameters over `alpha in [beta, 1]`.
    pub eps_beta: f64,
    /// Parameter forward DE was run at.
    pub eps: f64,
    /// Largest `x_i^inf - x_i(beta)`.
    pub max_excess: f64,
    pub passed: bool,
    pub fixed_point: Vec<f64>,
}

/// Runs forward DE at `fraction * eps^(beta)` (capped at 1) and compares with `x(beta)`.
///
/// Sections with `x_i(alpha) = 0` carry no constraint and are left out of the infimum.
pub fn stability_probe(
    family: &InterpolatedFamily,
    beta: f64,
    fraction: f64,
    cfg: &DeConfig,
) -> Result<StabilityVerdict> {
    if !(beta > 0.0 && beta < 1.0) {
        return invalid(format!("beta = {beta} outside (0, 1)"));
    }
    if !(0.0..1.0).contains(&fraction) {
        return invalid(format!("fraction = {fraction} outside [0, 1)"));
    }
    let mut alphas: Vec<f64> = (0..=4096)
        .map(|k| beta + (1.0 - beta) * k as f64 / 4096.0)
        .collect();
    let period = 4 * (family.source().length() - family.half_length());
    alphas.extend(
        (0..=period)
            .map(|k| k as f64 / period as f64)
            .filter(|a| *a >= beta),
    );
    let mut eps_beta = f64::INFINITY;
    for a in alphas {
        let pt = family.interpolate(a)?;
        for (e, x) in pt.eps.iter().zip(pt.x.values()) {
            if e.is_finite() && *x > 0.0 {
                eps_beta = eps_beta.min(*e);
            }
        }
    }
    if !(eps_beta > 0.0 && eps_beta.is_finite()) {
        return Err(Error::Precondition(format!(
            "eps^(beta) = {eps_beta} is not positive"
        )));
    }
    let eps = (fraction * eps_beta).min(1.0);
    let run = forward_de(family.system(), eps, Schedule::Parallel, cfg)?;
    let xb = family.constellation(beta);
    let max_excess = run
        .state
        .iter()
        .zip(&xb)
        .map(|(a, b)| a - b)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityVerdict {
        beta,
        eps_beta,
        eps,
        max_excess,
        passed: max_excess <= 1e-10,
        fixed_point: run.state,
    })
}
