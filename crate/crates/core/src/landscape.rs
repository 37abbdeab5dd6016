//! Stationary points, fixed points and slope bounds of `h(x) = eps g(x) - x`.

use serde::{Deserialize, Serialize};

use crate::ensemble::RegularEnsemble;
use crate::error::{invalid, Error, Result};
use crate::numeric::bisect;
use crate::thresholds::thresholds_regular;

/// The scalar DE landscape at one channel parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HLandscape {
    pub eps: f64,
    /// Unstable fixed point.
    pub x_u: f64,
    /// Stable fixed point.
    pub x_s: f64,
    /// Stationary point below the inflection point.
    pub x_star: f64,
    /// Stationary point above the inflection point.
    pub x_upstar: f64,
    pub kappa_star: f64,
    pub lambda_star: f64,
    pub kappa_upstar: f64,
    pub lambda_upstar: f64,
}

impl HLandscape {
    /// Slope of `h` at the stable fixed point.
    pub fn h_prime_at_stable(&self, e: &RegularEnsemble) -> f64 {
        e.h_prime(self.eps, self.x_s)
    }
}

/// Landscape for `eps` in `(eps_BP, 1]`.
pub fn h_landscape(eps: f64, e: &RegularEnsemble, tol: f64) -> Result<HLandscape> {
    if !(eps > 0.0 && eps <= 1.0) {
        return invalid(format!("eps = {eps} outside (0, 1]"));
    }
    let t = thresholds_regular(e, tol.max(1e-15))?;
    let none = || Error::NoNontrivialFixedPoint {
        eps,
        eps_bp: t.eps_bp,
    };
    if eps <= t.eps_bp {
        return Err(none());
    }
    let xc = e.inflection_point();
    let hp = |x: f64| e.h_prime(eps, x);
    let h = |x: f64| e.h(eps, x);
    if hp(xc) <= 0.0 {
        return Err(none());
    }
    let x_star = bisect(hp, 0.0, xc, tol, "h'").map_err(|_| none())?.x;
    let x_upstar = bisect(hp, xc, 1.0, tol, "h'").map_err(|_| none())?.x;
    if h(x_upstar) <= 0.0 {
        return Err(none());
    }
    let x_u = bisect(h, x_star, x_upstar, tol, "h").map_err(|_| none())?.x;
    let x_s = bisect(h, x_upstar, 1.0, tol, "h").map_err(|_| none())?.x;

    let kappa_star = f64::min(-hp(0.0), -h(x_star) / x_star);
    let lambda_star = f64::min(hp(x_u), -h(x_star) / (x_u - x_star));
    let kappa_upstar = f64::min(hp(x_u), h(x_upstar) / (x_upstar - x_u));
    let lambda_upstar = f64::min(-hp(x_s), h(x_upstar) / (x_s - x_upstar));
    Ok(HLandscape {
        eps,
        x_u,
        x_s,
        x_star,
        x_upstar,
        kappa_star,
        lambda_star,
        kappa_upstar,
        lambda_upstar,
    })
}
