//! One-sided fixed points, the interpolated EXIT family and their diagnostics.

mod diagnostics;
mod family;

pub use diagnostics::{
    eps_star_bound_check, fp_diagnostics, stability_probe, BoundReport, FpDiagnostics,
    StabilityVerdict,
};
pub use family::{family_area, AreaReport, FamilyPoint, InterpolatedFamily, PhaseThreeReport};

use serde::{Deserialize, Serialize};

use crate::de::{forward_de, DeConfig, DeSystem, OneSidedConstellation, OneSidedSystem, Schedule};
use crate::ensemble::{RegularEnsemble, SmoothedParams};
use crate::error::{invalid, Error, Result};
use crate::landscape::h_landscape;
use crate::numeric::{mirrored_sum, sup_diff};

/// Controls for the one-sided construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FpConfig {
    pub de: DeConfig,
    /// Sup-norm change under which a V-step counts as stationary.
    pub v_tolerance: f64,
    /// Number of consecutive stationary V-steps required.
    pub v_stable_steps: usize,
    pub max_v_iterations: usize,
    /// Reject lengths below the existence bound `L(l, r, w, chi)`.
    pub enforce_length_bound: bool,
}

impl Default for FpConfig {
    fn default() -> Self {
        Self {
            de: DeConfig::default(),
            v_tolerance: 1e-11,
            v_stable_steps: 50,
            max_v_iterations: 1_000_000,
            enforce_length_bound: true,
        }
    }
}

/// Which alternative of the existence statement was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FpOutcome {
    /// Proper fixed point of the requested entropy with `eps* < 1`.
    ProperAtChi,
    /// Entropy fell short; fixed point at `eps = 1`.
    EpsOneCase,
}

/// A one-sided fixed point `(eps*, x*)` of length `L'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneSidedFP {
    /// Base ensemble, window and one-sided length `L'`.
    pub params: SmoothedParams,
    pub eps_star: f64,
    pub x: OneSidedConstellation,
    pub chi: f64,
    pub outcome: FpOutcome,
    /// Largest deviation of `x_i / U(x)_i` from `eps*` over nonzero sections.
    pub eps_spread: f64,
    /// `sup |x - eps* U(x)|`.
    pub residual: f64,
    /// Existence bound `L(l, r, w, chi)`.
    pub length_bound: f64,
    pub v_iterations: usize,
}

impl OneSidedFP {
    pub fn base(&self) -> RegularEnsemble {
        self.params.base()
    }

    pub fn w(&self) -> usize {
        self.params.w()
    }

    /// One-sided length `L'`.
    pub fn length(&self) -> usize {
        self.params.half_length()
    }

    pub fn is_proper(&self) -> bool {
        self.outcome == FpOutcome::ProperAtChi && self.x.is_proper(1e-14, 0.0)
    }
}

/// `max{ 4lw/(r(1-l/r)d), 8w/(kappa^*(1) d^2), 8w/(lambda^*(1) d (1-l/r)), w/(r/l - 1) }`, `d = chi - x_u(1)`.
pub fn existence_length_bound(e: &RegularEnsemble, w: usize, chi: f64) -> Result<f64> {
    let h1 = h_landscape(1.0, e, 1e-13)?;
    let d = chi - h1.x_u;
    if !(d > 0.0) {
        return Err(Error::Precondition(format!(
            "chi = {chi} must exceed x_u(1) = {}",
            h1.x_u
        )));
    }
    let (l, r, w) = (e.l() as f64, e.r() as f64, w as f64);
    let rate = 1.0 - l / r;
    let terms = [
        4.0 * l * w / (r * rate * d),
        8.0 * w / (h1.kappa_upstar * d * d),
        8.0 * w / (h1.lambda_upstar * d * rate),
        w / (r / l - 1.0),
    ];
    Ok(terms.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// The self-map of `{x : entropy chi, non-decreasing, x <= z}` whose fixed points are one-sided FPs.
#[derive(Debug, Clone)]
pub struct VMap {
    sys: OneSidedSystem,
    z: Vec<f64>,
    chi_z: f64,
    chi: f64,
}

impl VMap {
    /// `z` is the one-sided forward-DE fixed point at `eps = 1`.
    pub fn new(params: SmoothedParams, chi: f64, de: &DeConfig) -> Result<Self> {
        let sys = OneSidedSystem::new(params);
        let z = forward_de(&sys, 1.0, Schedule::Parallel, de)?.state;
        let chi_z = mean(&z);
        if !(chi < chi_z) {
            return Err(Error::Unreachable {
                chi,
                reason: format!("needs chi below the entropy {chi_z} of the eps = 1 fixed point"),
            });
        }
        Ok(Self { sys, z, chi_z, chi })
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn chi_z(&self) -> f64 {
        self.chi_z
    }

    /// `z` rescaled to entropy `chi`.
    pub fn start(&self) -> Vec<f64> {
        let s = self.chi / self.chi_z;
        self.z.iter().map(|v| v * s).collect()
    }

    /// Channel-free one-sided DE factors.
    pub fn u(&self, x: &[f64]) -> Vec<f64> {
        self.sys.u_map(x)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let u = self.u(x);
        let chi_u = mean(&u);
        if self.chi <= chi_u {
            let s = self.chi / chi_u;
            u.into_iter().map(|v| v * s).collect()
        } else {
            let a = (self.chi_z - self.chi) / (self.chi_z - chi_u);
            u.iter()
                .zip(&self.z)
                .map(|(uv, zv)| a * uv + (1.0 - a) * zv)
                .collect()
        }
    }
}

fn mean(v: &[f64]) -> f64 {
    mirrored_sum(v) / v.len() as f64
}

/// Proper one-sided FP of entropy `chi` and length `lp` for the (l, r, w) system.
pub fn construct_one_sided_fp(
    l: u32,
    r: u32,
    w: usize,
    lp: usize,
    chi: f64,
    cfg: &FpConfig,
) -> Result<OneSidedFP> {
    let e = RegularEnsemble::new(l, r)?;
    let params = SmoothedParams::new(e, lp, w)?;
    if !(chi > 0.0 && chi < 1.0) {
        return invalid(format!("chi = {chi} outside (0, 1)"));
    }
    let length_bound = existence_length_bound(&e, w, chi)?;
    if cfg.enforce_length_bound && (lp as f64) < length_bound {
        return Err(Error::Precondition(format!(
            "length {lp} below the existence bound {length_bound:.3}"
        )));
    }
    let v = VMap::new(params, chi, &cfg.de)?;
    let mut x = v.start();
    let mut stable = 0;
    let mut iterations = 0;
    let mut change = f64::INFINITY;
    while stable < cfg.v_stable_steps {
        if iterations >= cfg.max_v_iterations {
            return Err(Error::NoConvergence {
                iterations,
                last_change: change,
                last_iterate: x,
            });
        }
        let next = v.apply(&x);
        change = sup_diff(&x, &next);
        x = next;
        iterations += 1;
        stable = if change < cfg.v_tolerance {
            stable + 1
        } else {
            0
        };
    }

    let u = v.u(&x);
    if chi <= mean(&u) {
        let ratios: Vec<f64> = x
            .iter()
            .zip(&u)
            .filter(|(xv, uv)| **xv > cfg.de.zero_threshold && **uv > 0.0)
            .map(|(xv, uv)| xv / uv)
            .collect();
        if ratios.is_empty() {
            return Err(Error::Empty("no nonzero sections to read eps* from".into()));
        }
        let mut sorted = ratios.clone();
        sorted.sort_by(f64::total_cmp);
        let eps_star = sorted[sorted.len() / 2];
        let eps_spread = ratios
            .iter()
            .map(|q| (q - eps_star).abs())
            .fold(0.0, f64::max);
        let residual = x
            .iter()
            .zip(&u)
            .map(|(xv, uv)| (xv - eps_star * uv).abs())
            .fold(0.0, f64::max);
        let chi_x = mean(&x);
        let x = OneSidedConstellation::new(lp, x.into_iter().map(|v| v.min(1.0)).collect())?;
        return Ok(OneSidedFP {
            params,
            eps_star,
            x,
            chi: chi_x,
            outcome: FpOutcome::ProperAtChi,
            eps_spread,
            residual,
            length_bound,
            v_iterations: iterations,
        });
    }

    // Entropy cannot be held: descend with eps = 1 from the current point.
    let sys = OneSidedSystem::new(params);
    let mut cur = x;
    let mut steps = 0;
    loop {
        let next = sys.u_map(&cur);
        let d = sup_diff(&cur, &next);
        cur = next;
        steps += 1;
        if d < cfg.de.tolerance {
            break;
        }
        if steps >= cfg.de.max_iterations {
            return Err(Error::NoConvergence {
                iterations: steps,
                last_change: d,
                last_iterate: cur,
            });
        }
    }
    let u = sys.u_map(&cur);
    let residual = sup_diff(&cur, &u);
    let chi_x = mean(&cur);
    Ok(OneSidedFP {
        params,
        eps_star: 1.0,
        x: OneSidedConstellation::new(lp, cur)?,
        chi: chi_x,
        outcome: FpOutcome::EpsOneCase,
        eps_spread: 0.0,
        residual,
        length_bound,
        v_iterations: iterations,
    })
}

/// DE residual of a one-sided state at `eps`.
pub fn one_sided_residual(params: &SmoothedParams, x: &[f64], eps: f64) -> f64 {
    let sys = OneSidedSystem::new(*params);
    let mut u = vec![0.0; sys.state_len()];
    sys.factors(x, &mut u);
    x.iter()
        .zip(&u)
        .map(|(a, b)| (a - eps * b).abs())
        .fold(0.0, f64::max)
}
