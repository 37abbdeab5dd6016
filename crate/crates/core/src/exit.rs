//! EBP EXIT curves, the area-theorem MAP threshold and wiggle measurement.

use serde::{Deserialize, Serialize};

use crate::de::{DeConfig, DeSystem};
use crate::ensemble::RegularEnsemble;
use crate::error::{invalid, Error, Result};
use crate::landscape::h_landscape;
use crate::numeric::{adaptive_simpson, bisect, mirrored_sum, powi, sup_diff};
use crate::thresholds::thresholds_regular;

/// One point of an EXIT curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitPoint {
    pub chi: f64,
    pub eps: f64,
    pub h_ebp: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// EXIT curve ordered by entropy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitCurve {
    pub ensemble: String,
    pub points: Vec<ExitPoint>,
}

impl ExitCurve {
    pub fn new(ensemble: String, points: Vec<ExitPoint>) -> Result<Self> {
        if points.windows(2).any(|p| p[1].chi <= p[0].chi) {
            return invalid("EXIT curve points must have strictly increasing entropy");
        }
        Ok(Self { ensemble, points })
    }

    /// Point with the smallest channel parameter among converged points.
    pub fn min_eps(&self) -> Option<ExitPoint> {
        self.points
            .iter()
            .filter(|p| p.converged)
            .copied()
            .min_by(|a, b| a.eps.total_cmp(&b.eps))
    }
}

/// Wiggle statistics over an entropy band of the steep branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WiggleReport {
    pub eps_min: f64,
    pub eps_max: f64,
    pub amplitude: f64,
    pub chi_lo: f64,
    pub chi_hi: f64,
    pub points: usize,
    /// Number of interior local maxima of the channel parameter along the band.
    pub wiggle_count: usize,
}

/// Parametric EBP point `(eps(x), (1 - (1-x)^(r-1))^l)` of a regular ensemble.
pub fn ebp_regular(x: f64, e: &RegularEnsemble) -> Result<(f64, f64)> {
    if !(x > 0.0 && x <= 1.0) {
        return invalid(format!("x = {x} outside (0, 1]"));
    }
    Ok((e.eps_of_x(x), powi(e.check_out(x), e.l())))
}

/// One DE step with the channel parameter chosen so the result has entropy `chi`.
pub fn ebp_fixed_entropy_step<S: DeSystem + ?Sized>(
    sys: &S,
    state: &[f64],
    chi: f64,
) -> Result<(Vec<f64>, f64)> {
    if !(chi > 0.0 && chi < 1.0) {
        return invalid(format!("chi = {chi} outside (0, 1)"));
    }
    let mut g = vec![0.0; sys.state_len()];
    sys.factors(state, &mut g);
    let mean = sys.entropy(&g);
    if !(mean > 0.0) {
        return Err(Error::Unreachable {
            chi,
            reason: "all DE factors vanish".into(),
        });
    }
    let eps = chi / mean;
    g.iter_mut().for_each(|v| *v *= eps);
    Ok((g, eps))
}

/// Average EXIT value of a state.
pub fn mean_exit<S: DeSystem + ?Sized>(sys: &S, state: &[f64]) -> f64 {
    let h = sys.exit_values(state);
    mirrored_sum(&h) / h.len() as f64
}

/// Converged fixed-entropy state together with its point.
fn converge_at<S: DeSystem + ?Sized>(
    sys: &S,
    state: &mut Vec<f64>,
    chi: f64,
    cfg: &DeConfig,
) -> Result<ExitPoint> {
    let mut eps = f64::NAN;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        let (next, e) = ebp_fixed_entropy_step(sys, state, chi)?;
        iterations += 1;
        let change = sup_diff(state, &next);
        *state = next;
        eps = e;
        if change < cfg.tolerance {
            converged = true;
            break;
        }
    }
    Ok(ExitPoint {
        chi,
        eps,
        h_ebp: mean_exit(sys, state),
        converged,
        iterations,
    })
}

/// EBP curve by fixed-entropy continuation, warm-started along the grid.
pub fn ebp_curve<S: DeSystem + ?Sized>(
    sys: &S,
    chi_grid: &[f64],
    cfg: &DeConfig,
) -> Result<ExitCurve> {
    cfg.validate()?;
    if chi_grid.is_empty() {
        return Err(Error::Empty("entropy grid".into()));
    }
    if chi_grid.windows(2).any(|p| p[1] <= p[0]) || chi_grid.iter().any(|c| !(*c > 0.0 && *c < 1.0))
    {
        return invalid("entropy grid must be strictly increasing inside (0, 1)");
    }
    let mut state = vec![chi_grid[0]; sys.state_len()];
    let mut points = Vec::with_capacity(chi_grid.len());
    for &chi in chi_grid {
        let current = sys.entropy(&state);
        if current > 0.0 {
            let scale = chi / current;
            state.iter_mut().for_each(|v| *v = (*v * scale).min(1.0));
        } else {
            state.iter_mut().for_each(|v| *v = chi);
        }
        points.push(converge_at(sys, &mut state, chi, cfg)?);
    }
    ExitCurve::new(sys.describe(), points)
}

/// Area under the BP EXIT curve from `eps` to 1, by quadrature in `x` over the stable branch.
pub fn bp_exit_area(e: &RegularEnsemble, eps: f64, quad_tol: f64) -> Result<f64> {
    let x_s = h_landscape(eps, e, 1e-14)?.x_s;
    area_from_x(e, x_s, quad_tol)
}

fn area_from_x(e: &RegularEnsemble, x_lo: f64, quad_tol: f64) -> Result<f64> {
    let (l, r) = (e.l(), e.r());
    // (1 - (1-x)^(r-1))^l eps'(x) = y - (l-1) x y'
    let integrand =
        |x: f64| e.check_out(x) - (l - 1) as f64 * x * (r - 1) as f64 * powi(1.0 - x, r - 2);
    adaptive_simpson(integrand, x_lo, 1.0, quad_tol, 50)
}

/// MAP threshold as the parameter where the BP EXIT area equals the design rate.
pub fn map_threshold_via_area(e: &RegularEnsemble, quad_tol: f64) -> Result<f64> {
    let t = thresholds_regular(e, 1e-14)?;
    let rate = e.design_rate();
    let tol = quad_tol.clamp(1e-15, 1e-6);
    let root = bisect(
        |eps| match h_landscape(eps, e, 1e-14) {
            Ok(h) => area_from_x(e, h.x_s, tol * 1e-3)
                .map(|a| a - rate)
                .unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        },
        t.eps_bp + 1e-12,
        1.0,
        tol * 1e-2,
        "area - rate",
    )?;
    if root.x.is_nan() {
        return Err(Error::Quadrature("area bisection produced NaN".into()));
    }
    Ok(root.x)
}

/// Default steep-branch band `[0.5, 0.7] * x_s(eps_MAP)`.
pub fn default_wiggle_band(e: &RegularEnsemble) -> Result<(f64, f64)> {
    let t = thresholds_regular(e, 1e-14)?;
    let top = h_landscape(t.eps_map, e, 1e-14)?.x_s;
    Ok((0.5 * top, 0.7 * top))
}

/// Spread of the channel parameter over converged points with `chi` in `band`.
pub fn wiggle_report(curve: &ExitCurve, band: (f64, f64)) -> Result<WiggleReport> {
    if !(band.0 <= band.1) {
        return invalid(format!("entropy band [{}, {}] is reversed or NaN", band.0, band.1));
    }
    let pts: Vec<&ExitPoint> = curve
        .points
        .iter()
        .filter(|p| p.converged && p.chi >= band.0 && p.chi <= band.1)
        .collect();
    if pts.is_empty() {
        return Err(Error::Empty(format!(
            "no converged points with chi in [{}, {}]",
            band.0, band.1
        )));
    }
    let eps_min = pts.iter().map(|p| p.eps).fold(f64::INFINITY, f64::min);
    let eps_max = pts.iter().map(|p| p.eps).fold(f64::NEG_INFINITY, f64::max);
    let wiggle_count = pts
        .windows(3)
        .filter(|w| w[1].eps > w[0].eps && w[1].eps >= w[2].eps)
        .count();
    Ok(WiggleReport {
        eps_min,
        eps_max,
        amplitude: eps_max - eps_min,
        chi_lo: pts[0].chi,
        chi_hi: pts[pts.len() - 1].chi,
        points: pts.len(),
        wiggle_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::de::{de_step, ScalarSystem, SmoothedSystem};
    use crate::ensemble::SmoothedParams;
    use crate::numeric::linspace;

    fn e36() -> RegularEnsemble {
        RegularEnsemble::new(3, 6).unwrap()
    }

    #[test]
    fn ebp_regular_endpoints() {
        let e = e36();
        let t = thresholds_regular(&e, 1e-14).unwrap();
        let (eps, _) = ebp_regular(t.x_bp, &e).unwrap();
        assert!((eps - 0.42944).abs() < 1e-5);
        assert_eq!(ebp_regular(1.0, &e).unwrap(), (1.0, 1.0));
        assert!(ebp_regular(0.0, &e).is_err());
    }

    #[test]
    fn ebp_leaves_box_at_unstable_point() {
        let e = e36();
        let xu = h_landscape(1.0, &e, 1e-14).unwrap().x_u;
        let (eps, _) = ebp_regular(xu, &e).unwrap();
        assert!((eps - 1.0).abs() < 1e-10);
    }

    #[test]
    fn scalar_fixed_entropy_step_is_eps_of_x() {
        let e = e36();
        let sys = ScalarSystem::new(e);
        for chi in [0.1, 0.3, 0.7] {
            let (next, eps) = ebp_fixed_entropy_step(&sys, &[chi], chi).unwrap();
            assert!((eps - e.eps_of_x(chi)).abs() < 1e-14);
            assert!((next[0] - chi).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_step_is_unreachable() {
        let sys = ScalarSystem::new(e36());
        assert!(matches!(
            ebp_fixed_entropy_step(&sys, &[0.0], 0.3),
            Err(Error::Unreachable { .. })
        ));
    }

    #[test]
    fn uncoupled_curve_matches_parametric() {
        let e = e36();
        let sys = ScalarSystem::new(e);
        let grid = linspace(0.01, 0.99, 99);
        let c = ebp_curve(&sys, &grid, &DeConfig::default()).unwrap();
        for p in &c.points {
            let (eps, h) = ebp_regular(p.chi, &e).unwrap();
            assert!(p.converged);
            assert!((p.eps - eps).abs() < 1e-10 && (p.h_ebp - h).abs() < 1e-10);
        }
    }

    #[test]
    fn converged_point_is_fixed_point() {
        let sys = SmoothedSystem::new(SmoothedParams::new(e36(), 8, 2).unwrap());
        let mut state = vec![0.25; sys.state_len()];
        let p = converge_at(&sys, &mut state, 0.25, &DeConfig::default()).unwrap();
        assert!(p.converged);
        let again = de_step(&sys, &state, p.eps);
        assert!(sup_diff(&again, &state) < 1e-10);
    }

    #[test]
    fn area_map_threshold() {
        for (l, v) in [(3u32, 0.488151), (4, 0.49774)] {
            let e = RegularEnsemble::new(l, 2 * l).unwrap();
            let a = map_threshold_via_area(&e, 1e-10).unwrap();
            assert!((a - v).abs() < 1e-5, "{a}");
            let poly = thresholds_regular(&e, 1e-14).unwrap().eps_map;
            assert!((a - poly).abs() < 1e-9);
        }
    }

    #[test]
    fn wiggle_band_cases() {
        let pts = vec![
            ExitPoint {
                chi: 0.1,
                eps: 0.5,
                h_ebp: 0.1,
                converged: true,
                iterations: 1,
            },
            ExitPoint {
                chi: 0.2,
                eps: 0.6,
                h_ebp: 0.2,
                converged: true,
                iterations: 1,
            },
            ExitPoint {
                chi: 0.3,
                eps: 0.4,
                h_ebp: 0.3,
                converged: false,
                iterations: 1,
            },
        ];
        let c = ExitCurve::new("t".into(), pts).unwrap();
        let single = wiggle_report(&c, (0.15, 0.25)).unwrap();
        assert_eq!(single.amplitude, 0.0);
        let both = wiggle_report(&c, (0.0, 1.0)).unwrap();
        assert!((both.amplitude - 0.1).abs() < 1e-15);
        assert!(wiggle_report(&c, (0.5, 0.6)).is_err());
    }

    #[test]
    fn curve_rejects_unsorted_grid() {
        let sys = ScalarSystem::new(e36());
        assert!(ebp_curve(&sys, &[0.3, 0.2], &DeConfig::default()).is_err());
        assert!(ebp_curve(&sys, &[], &DeConfig::default()).is_err());
    }
}
