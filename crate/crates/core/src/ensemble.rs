//! Degree pairs, coupling geometry and design rates.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numeric::{one_minus_pow, powi};

/// The (l, r)-regular ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegularEnsemble {
    l: u32,
    r: u32,
}

impl RegularEnsemble {
    /// Requires `l >= 3` and `r >= l`.
    pub fn new(l: u32, r: u32) -> Result<Self> {
        if l < 3 {
            return invalid(format!("variable degree l = {l} unsupported, need l >= 3"));
        }
        if r < l {
            return invalid(format!("check degree r = {r} must be >= l = {l}"));
        }
        if r > 4096 {
            return invalid(format!("check degree r = {r} too large"));
        }
        Ok(Self { l, r })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `1 - l/r`.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.l as f64 / self.r as f64
    }

    /// Check-node output `1 - (1-x)^(r-1)`.
    #[inline]
    pub fn check_out(&self, x: f64) -> f64 {
        one_minus_pow(x, self.r - 1)
    }

    /// Scalar DE factor `(1 - (1-x)^(r-1))^(l-1)`.
    #[inline]
    pub fn g(&self, x: f64) -> f64 {
        powi(self.check_out(x), self.l - 1)
    }

    /// Channel parameter for which `x` is a scalar fixed point.
    pub fn eps_of_x(&self, x: f64) -> f64 {
        x / self.g(x)
    }

    /// `h(x) = eps g(x) - x`.
    #[inline]
    pub fn h(&self, eps: f64, x: f64) -> f64 {
        eps * self.g(x) - x
    }

    /// First derivative of `h` in `x`.
    pub fn h_prime(&self, eps: f64, x: f64) -> f64 {
        let (l, r) = (self.l, self.r);
        let y = self.check_out(x);
        let dy = (r - 1) as f64 * powi(1.0 - x, r - 2);
        eps * (l - 1) as f64 * powi(y, l - 2) * dy - 1.0
    }

    /// Second derivative of `h` in `x`.
    pub fn h_second(&self, eps: f64, x: f64) -> f64 {
        let (l, r) = (self.l as f64, self.r);
        let y = self.check_out(x);
        let dy = (r - 1) as f64 * powi(1.0 - x, r - 2);
        let ddy = if r >= 3 {
            -((r - 1) as f64) * (r - 2) as f64 * powi(1.0 - x, r - 3)
        } else {
            0.0
        };
        let yl3 = if self.l >= 3 {
            powi(y, self.l - 3)
        } else {
            0.0
        };
        eps * (l - 1.0) * ((l - 2.0) * yl3 * dy * dy + powi(y, self.l - 2) * ddy)
    }

    /// Unique root of `h''` in (0, 1); independent of eps.
    pub fn inflection_point(&self) -> f64 {
        let (l, r) = (self.l as f64, self.r as f64);
        1.0 - ((r - 2.0) / (l * r - l - r)).powf(1.0 / (r - 1.0))
    }

    /// `1 - (l-1)^(-1/(r-2))`, a lower bound on the BP root.
    pub fn x_bp_lower_bound(&self) -> f64 {
        let (l, r) = (self.l as f64, self.r as f64);
        1.0 - (l - 1.0).powf(-1.0 / (r - 2.0))
    }
}

/// The (l, r = k l, L) chain ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainParams {
    base: RegularEnsemble,
    half_length: usize,
}

impl ChainParams {
    /// Requires `l` odd and `r` a multiple of `l` with ratio at least 2.
    pub fn new(base: RegularEnsemble, half_length: usize) -> Result<Self> {
        if base.l % 2 == 0 {
            return invalid(format!("chain ensemble needs odd l, got {}", base.l));
        }
        if base.r % base.l != 0 || base.r / base.l < 2 {
            return invalid(format!(
                "chain ensemble needs r = k l with k >= 2, got l = {}, r = {}",
                base.l, base.r
            ));
        }
        if half_length < 1 {
            return invalid("half-length L must be >= 1");
        }
        Ok(Self { base, half_length })
    }

    pub fn base(&self) -> RegularEnsemble {
        self.base
    }

    pub fn half_length(&self) -> usize {
        self.half_length
    }

    /// `(l-1)/2`.
    pub fn lhat(&self) -> usize {
        (self.base.l as usize - 1) / 2
    }

    /// `r / l`.
    pub fn k(&self) -> u32 {
        self.base.r / self.base.l
    }

    /// `(k-1)/k - 2 lhat / (k (2L+1))`.
    pub fn design_rate(&self) -> f64 {
        let k = self.k() as f64;
        let n = (2 * self.half_length + 1) as f64;
        (k - 1.0) / k - 2.0 * self.lhat() as f64 / (k * n)
    }
}

/// The (l, r, L, w) ensemble with uniform smoothing window `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SmoothedParams {
    base: RegularEnsemble,
    half_length: usize,
    w: usize,
}

impl SmoothedParams {
    pub fn new(base: RegularEnsemble, half_length: usize, w: usize) -> Result<Self> {
        if half_length < 1 {
            return invalid("half-length L must be >= 1");
        }
        if w < 1 {
            return invalid("window w must be >= 1");
        }
        Ok(Self {
            base,
            half_length,
            w,
        })
    }

    pub fn base(&self) -> RegularEnsemble {
        self.base
    }

    pub fn half_length(&self) -> usize {
        self.half_length
    }

    pub fn w(&self) -> usize {
        self.w
    }

    /// `(1 - l/r) - (l/r)(w + 1 - 2 sum_{i=0}^{w} (i/w)^r)/(2L+1)`; needs `w <= 2L`.
    pub fn design_rate(&self) -> Result<f64> {
        if self.w > 2 * self.half_length {
            return invalid(format!(
                "design rate needs w <= 2L, got w = {}, L = {}",
                self.w, self.half_length
            ));
        }
        let (l, r) = (self.base.l as f64, self.base.r);
        let w = self.w as f64;
        let s: f64 = (0..=self.w).map(|i| powi(i as f64 / w, r)).sum();
        let n = (2 * self.half_length + 1) as f64;
        Ok(self.base.design_rate() - (l / r as f64) * (w + 1.0 - 2.0 * s) / n)
    }
}

pub fn design_rate_regular(e: &RegularEnsemble) -> f64 {
    e.design_rate()
}

pub fn design_rate_chain(p: &ChainParams) -> f64 {
    p.design_rate()
}

pub fn design_rate_smoothed(p: &SmoothedParams) -> Result<f64> {
    p.design_rate()
}
