//! The four-phase interpolated family built from a one-sided fixed point.

use serde::{Deserialize, Serialize};

use super::OneSidedFP;
use crate::de::{Constellation, DeSystem, EpsilonProfile, SmoothedSystem};
use crate::ensemble::SmoothedParams;
use crate::error::{invalid, Error, Result};
use crate::numeric::mirrored_sum;

/// Interpolated family `alpha -> (x(alpha), eps(alpha))` on `[-L, L]`.
#[derive(Debug, Clone)]
pub struct InterpolatedFamily {
    source: OneSidedFP,
    half_length: usize,
    sys: SmoothedSystem,
}

/// Family member at one `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyPoint {
    pub alpha: f64,
    pub x: Constellation,
    /// Local channel parameters; `+inf` where `g = 0 < x_i`, `0` where `g = x_i = 0`.
    pub eps: Vec<f64>,
    /// EXIT values `g^(l/(l-1))`.
    pub h: Vec<f64>,
    /// DE factors `g`.
    pub g: Vec<f64>,
}

impl FamilyPoint {
    /// Local channel parameters as a profile; fails on the infinite sentinel.
    pub fn profile(&self) -> Result<EpsilonProfile> {
        EpsilonProfile::new(self.eps.clone())
    }
}

impl InterpolatedFamily {
    /// Requires a proper source of length `L' > L >= 1`.
    pub fn new(source: OneSidedFP, half_length: usize) -> Result<Self> {
        if !source.is_proper() {
            return invalid("interpolated family needs a proper one-sided fixed point");
        }
        if half_length < 1 || half_length >= source.length() {
            return invalid(format!(
                "need 1 <= L < L' = {}, got L = {half_length}",
                source.length()
            ));
        }
        let p = SmoothedParams::new(source.base(), half_length, source.w())?;
        Ok(Self {
            source,
            half_length,
            sys: SmoothedSystem::new(p),
        })
    }

    pub fn source(&self) -> &OneSidedFP {
        &self.source
    }

    pub fn half_length(&self) -> usize {
        self.half_length
    }

    pub fn system(&self) -> &SmoothedSystem {
        &self.sys
    }

    /// `x*_j` with zero below `-L'`.
    fn xs(&self, j: isize) -> f64 {
        self.source.x.get(j)
    }

    /// `x_i(alpha)` for `i in [-L, 0]`.
    pub fn left_value(&self, i: isize, alpha: f64) -> f64 {
        let lp = self.source.length() as isize;
        let l = self.half_length as isize;
        let x0 = self.xs(0);
        if alpha >= 0.75 {
            (4.0 * alpha - 3.0) + (4.0 - 4.0 * alpha) * x0
        } else if alpha >= 0.5 {
            (4.0 * alpha - 2.0) * x0 - (4.0 * alpha - 3.0) * self.xs(i)
        } else if alpha > 0.25 {
            let s = 4.0 * (0.5 - alpha) * (lp - l) as f64;
            let p = s.ceil();
            let t = s - (p - 1.0);
            let p = p as isize;
            self.xs(i - p).powf(t) * self.xs(i - p + 1).powf(1.0 - t)
        } else {
            4.0 * alpha * self.xs(i - lp + l)
        }
    }

    /// Symmetric constellation `x(alpha)` on `[-L, L]`.
    pub fn constellation(&self, alpha: f64) -> Vec<f64> {
        let l = self.half_length as isize;
        let n = 2 * self.half_length + 1;
        let mut v = vec![0.0; n];
        for i in -l..=0 {
            let x = self.left_value(i, alpha).clamp(0.0, 1.0);
            v[(i + l) as usize] = x;
            v[(l - i) as usize] = x;
        }
        v
    }

    /// `(x(alpha), eps(alpha))` with EXIT values.
    pub fn interpolate(&self, alpha: f64) -> Result<FamilyPoint> {
        if !(0.0..=1.0).contains(&alpha) {
            return invalid(format!("alpha = {alpha} outside [0, 1]"));
        }
        let x = self.constellation(alpha);
        let mut g = vec![0.0; x.len()];
        self.sys.factors(&x, &mut g);
        let l = self.source.base().l();
        let eps = x
            .iter()
            .zip(&g)
            .map(|(&xi, &gi)| {
                if gi > 0.0 {
                    xi / gi
                } else if xi > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .collect();
        let h = g
            .iter()
            .map(|&gi| gi * gi.powf(1.0 / (l - 1) as f64))
            .collect();
        Ok(FamilyPoint {
            alpha,
            x: Constellation::new(self.half_length, x)?,
            eps,
            h,
            g,
        })
    }

    /// Threshold `gamma` separating large and small sections in phase (iii).
    pub fn gamma(&self) -> f64 {
        let e = self.source.base();
        let w = self.source.w() as f64;
        let (l, r) = (e.l() as f64, e.r() as f64);
        let base = (r - 1.0)
            * (l - 1.0)
            * self.source.eps_star.powf(1.0 / (l - 1.0))
            * (1.0 + w.powf(0.125))
            / w;
        base.powf(l - 1.0)
    }

    /// Checks the phase-(iii) channel bounds at `alpha in [1/4, 1/2]` for sections above `gamma`.
    pub fn phase_three_bounds(&self, alpha: f64) -> Result<PhaseThreeReport> {
        if !(0.25..=0.5).contains(&alpha) {
            return invalid(format!("alpha = {alpha} outside phase (iii)"));
        }
        let pt = self.interpolate(alpha)?;
        let gamma = self.gamma();
        let w = self.source.w() as f64;
        let es = self.source.eps_star;
        let upper = es * (1.0 + w.powf(-0.125));
        let lower = es * (1.0 - 1.0 / (1.0 + w.powf(0.125)));
        let l = self.half_length as isize;
        let wi = self.source.w() as isize;
        let mut checked = 0;
        let mut violations = Vec::new();
        for i in -l..=0 {
            let k = (i + l) as usize;
            if pt.x.values()[k] <= gamma {
                continue;
            }
            checked += 1;
            let eps = pt.eps[k];
            let interior = i >= -l + wi - 1 && i <= -wi + 1;
            if eps < lower || (interior && eps > upper) {
                violations.push(i);
            }
        }
        Ok(PhaseThreeReport {
            alpha,
            gamma,
            lower,
            upper,
            checked,
            violations,
        })
    }
}

/// Outcome of the phase-(iii) channel bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseThreeReport {
    pub alpha: f64,
    pub gamma: f64,
    pub lower: f64,
    pub upper: f64,
    /// Sections above `gamma`.
    pub checked: usize,
    pub violations: Vec<isize>,
}

/// Area under the family's EXIT curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaReport {
    pub a: f64,
    /// `w l r / L`.
    pub bound: f64,
    pub design_rate: f64,
    /// `|A - (1 - l/r)|`.
    pub residual: f64,
    /// Uniform `alpha` intervals of the accepted evaluation.
    pub intervals: usize,
    /// Change of `A` between the last two refinements.
    pub refinement_delta: f64,
}

/// Parts-form Stieltjes sum on a uniform grid of `n` intervals.
fn area_on_grid(family: &InterpolatedFamily, n: usize) -> Result<f64> {
    let sections = 2 * family.half_length + 1;
    let mut acc = vec![0.0; sections];
    let mut prev_h = family.interpolate(0.0)?.h;
    for k in 0..n {
        let a1 = (k + 1) as f64 / n as f64;
        let mid = (k as f64 + 0.5) / n as f64;
        let next_h = family.interpolate(a1)?.h;
        let m = family.interpolate(mid)?;
        for i in 0..sections {
            let dh = next_h[i] - prev_h[i];
            if dh == 0.0 {
                continue;
            }
            if !m.eps[i].is_finite() {
                return Err(Error::Quadrature(format!(
                    "infinite channel parameter at alpha = {mid} with EXIT change"
                )));
            }
            acc[i] += m.eps[i] * dh;
        }
        prev_h = next_h;
    }
    let top = family.interpolate(1.0)?;
    let per: Vec<f64> = (0..sections)
        .map(|i| top.h[i] * top.eps[i] - acc[i])
        .collect();
    Ok(mirrored_sum(&per) / sections as f64)
}

/// EXIT area of the family, refined by doubling until two evaluations agree to `1e-4`.
///
/// `intervals` is rounded up so every phase seam and period boundary is a grid point.
pub fn family_area(family: &InterpolatedFamily, intervals: usize) -> Result<AreaReport> {
    let period = 4 * (family.source.length() - family.half_length);
    let mut n = intervals.max(period).div_ceil(period) * period;
    let mut prev = area_on_grid(family, n)?;
    let limit = 1usize << 22;
    loop {
        let fine = area_on_grid(family, 2 * n)?;
        let delta = (fine - prev).abs();
        n *= 2;
        if delta < 1e-4 {
            let e = family.source.base();
            let design_rate = e.design_rate();
            return Ok(AreaReport {
                a: fine,
                bound: (family.source.w() * (e.l() * e.r()) as usize) as f64
                    / family.half_length as f64,
                design_rate,
                residual: (fine - design_rate).abs(),
                intervals: n,
                refinement_delta: delta,
            });
        }
        if n >= limit {
            return Err(Error::Quadrature(format!(
                "area refinement did not settle (last change {delta:e})"
            )));
        }
        prev = fine;
    }
}
