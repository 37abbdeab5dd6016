//! Concrete DE recursions.

use crate::ensemble::{ChainParams, RegularEnsemble, SmoothedParams};
use crate::numeric::{mirrored_sum, one_minus_pow, powi};

use super::DeSystem;

/// EXIT value `g^(l/(l-1))` from a DE factor.
#[inline]
fn exit_from_g(g: f64, l: u32) -> f64 {
    g * g.powf(1.0 / (l - 1) as f64)
}

/// Single-section (uncoupled) recursion.
#[derive(Debug, Clone, Copy)]
pub struct ScalarSystem {
    e: RegularEnsemble,
}

impl ScalarSystem {
    pub fn new(e: RegularEnsemble) -> Self {
        Self { e }
    }

    pub fn ensemble(&self) -> RegularEnsemble {
        self.e
    }
}

impl DeSystem for ScalarSystem {
    fn state_len(&self) -> usize {
        1
    }
    fn sections(&self) -> usize {
        1
    }
    fn section_range(&self, _section: usize) -> std::ops::Range<usize> {
        0..1
    }
    fn factors(&self, state: &[f64], out: &mut [f64]) {
        out[0] = self.e.g(state[0]);
    }
    fn section_factors(&self, state: &[f64], _section: usize, out: &mut [f64]) {
        out[0] = self.e.g(state[0]);
    }
    fn exit_values(&self, state: &[f64]) -> Vec<f64> {
        vec![powi(self.e.check_out(state[0]), self.e.l())]
    }
    fn describe(&self) -> String {
        format!("({},{}) uncoupled", self.e.l(), self.e.r())
    }
}

/// `g` of the smoothed recursion from the `2w-1` values `x_{i-w+1..i+w-1}`.
pub fn g_smoothed(window: &[f64], e: &RegularEnsemble, w: usize) -> f64 {
    assert_eq!(window.len(), 2 * w - 1, "window must hold 2w-1 values");
    // check j averages x_{i+j-w+1..i+j}
    let f: Vec<f64> = (0..w).map(|j| f_of(&window[j..j + w], e.r(), w)).collect();
    g_of(&f, e.l(), w)
}

/// Check output `1 - f` of one check window: `1 - (1 - mean x)^(r-1)`.
#[inline]
fn f_of(xs: &[f64], r: u32, w: usize) -> f64 {
    one_minus_pow(mirrored_sum(xs) / w as f64, r - 1)
}

/// `g = (mean of check outputs)^(l-1)`, i.e. `(1 - mean f)^(l-1)`.
#[inline]
fn g_of(cs: &[f64], l: u32, w: usize) -> f64 {
    powi(mirrored_sum(cs) / w as f64, l - 1)
}

/// Two-sided (l, r, L, w) recursion on `x_{-L..L}`.
#[derive(Debug, Clone, Copy)]
pub struct SmoothedSystem {
    p: SmoothedParams,
}

impl SmoothedSystem {
    pub fn new(p: SmoothedParams) -> Self {
        Self { p }
    }

    pub fn params(&self) -> SmoothedParams {
        self.p
    }

    /// Padded copy with `w-1` zeros on both sides.
    fn padded(&self, state: &[f64]) -> Vec<f64> {
        let w = self.p.w();
        let mut v = vec![0.0; state.len() + 2 * (w - 1)];
        v[w - 1..w - 1 + state.len()].copy_from_slice(state);
        v
    }

    /// `f_m` for `m = -L .. L+w-1`.
    fn all_f(&self, state: &[f64]) -> Vec<f64> {
        let w = self.p.w();
        let pad = self.padded(state);
        let r = self.p.base().r();
        // f at padded position q uses pad[q-w+1 ..= q]; m = -L maps to q = w-1
        (0..state.len() + w - 1)
            .map(|m| f_of(&pad[m..m + w], r, w))
            .collect()
    }

    fn all_g(&self, state: &[f64]) -> Vec<f64> {
        let w = self.p.w();
        let l = self.p.base().l();
        let f = self.all_f(state);
        (0..state.len()).map(|i| g_of(&f[i..i + w], l, w)).collect()
    }
}

impl DeSystem for SmoothedSystem {
    fn state_len(&self) -> usize {
        2 * self.p.half_length() + 1
    }
    fn sections(&self) -> usize {
        self.state_len()
    }
    fn section_range(&self, section: usize) -> std::ops::Range<usize> {
        section..section + 1
    }
    fn factors(&self, state: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.all_g(state));
    }
    fn section_factors(&self, state: &[f64], section: usize, out: &mut [f64]) {
        let w = self.p.w();
        let pad = self.padded(state);
        let (l, r) = (self.p.base().l(), self.p.base().r());
        let f: Vec<f64> = (section..section + w)
            .map(|m| f_of(&pad[m..m + w], r, w))
            .collect();
        out[0] = g_of(&f, l, w);
    }
    fn exit_values(&self, state: &[f64]) -> Vec<f64> {
        let l = self.p.base().l();
        self.all_g(state)
            .into_iter()
            .map(|g| exit_from_g(g, l))
            .collect()
    }
    fn describe(&self) -> String {
        let b = self.p.base();
        format!(
            "({},{},L={},w={}) smoothed",
            b.l(),
            b.r(),
            self.p.half_length(),
            self.p.w()
        )
    }
}

/// One-sided (l, r, L, w) recursion on `x_{-L..0}` with `x_i = x_0` for `i > 0`.
#[derive(Debug, Clone, Copy)]
pub struct OneSidedSystem {
    p: SmoothedParams,
}

impl OneSidedSystem {
    /// `p.half_length()` is the one-sided length `L` (state has `L+1` sections).
    pub fn new(p: SmoothedParams) -> Self {
        Self { p }
    }

    pub fn params(&self) -> SmoothedParams {
        self.p
    }

    fn padded(&self, state: &[f64]) -> Vec<f64> {
        let w = self.p.w();
        let n = state.len();
        let mut v = vec![0.0; n + 2 * (w - 1)];
        v[w - 1..w - 1 + n].copy_from_slice(state);
        let top = state[n - 1];
        v[w - 1 + n..].iter_mut().for_each(|x| *x = top);
        v
    }

    /// Channel-free factors `U(x)`.
    pub fn u_map(&self, state: &[f64]) -> Vec<f64> {
        let w = self.p.w();
        let (l, r) = (self.p.base().l(), self.p.base().r());
        let pad = self.padded(state);
        let f: Vec<f64> = (0..state.len() + w - 1)
            .map(|m| f_of(&pad[m..m + w], r, w))
            .collect();
        (0..state.len()).map(|i| g_of(&f[i..i + w], l, w)).collect()
    }
}

impl DeSystem for OneSidedSystem {
    fn state_len(&self) -> usize {
        self.p.half_length() + 1
    }
    fn sections(&self) -> usize {
        self.state_len()
    }
    fn section_range(&self, section: usize) -> std::ops::Range<usize> {
        section..section + 1
    }
    fn factors(&self, state: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.u_map(state));
    }
    fn section_factors(&self, state: &[f64], section: usize, out: &mut [f64]) {
        let w = self.p.w();
        let pad = self.padded(state);
        let (l, r) = (self.p.base().l(), self.p.base().r());
        let f: Vec<f64> = (section..section + w)
            .map(|m| f_of(&pad[m..m + w], r, w))
            .collect();
        out[0] = g_of(&f, l, w);
    }
    fn exit_values(&self, state: &[f64]) -> Vec<f64> {
        let l = self.p.base().l();
        self.u_map(state)
            .into_iter()
            .map(|g| exit_from_g(g, l))
            .collect()
    }
    fn describe(&self) -> String {
        let b = self.p.base();
        format!(
            "({},{},L={},w={}) one-sided",
            b.l(),
            b.r(),
            self.p.half_length(),
            self.p.w()
        )
    }
}

/// Protograph recursion of the (l, r = k l, L) chain.
///
/// Variable position `i` sends edge type `t` (k copies) to check position
/// `i + t - lhat`; each check thus sees `k` edges from each of `l`
/// consecutive positions, fewer at the boundary. The state holds the
/// variable-to-check message of every (position, type) pair.
#[derive(Debug, Clone, Copy)]
pub struct ChainSystem {
    p: ChainParams,
}

impl ChainSystem {
    pub fn new(p: ChainParams) -> Self {
        Self { p }
    }

    pub fn params(&self) -> ChainParams {
        self.p
    }

    fn l(&self) -> usize {
        self.p.base().l() as usize
    }

    fn positions(&self) -> usize {
        2 * self.p.half_length() + 1
    }

    /// Check-to-variable message at check `c` on edge type `t`.
    fn check_message(&self, state: &[f64], c: usize, t: usize) -> f64 {
        let l = self.l();
        let n = self.positions();
        let k = self.p.k();
        let mut prod = 1.0;
        for t2 in 0..l {
            // variable at position c - t2 (check index offset by 0)
            let incoming = if c >= t2 && c - t2 < n {
                state[(c - t2) * l + t2]
            } else {
                0.0
            };
            let e = if t2 == t { k - 1 } else { k };
            prod *= powi(1.0 - incoming, e);
        }
        1.0 - prod
    }

    /// All check messages `y[c * l + t]`.
    fn all_checks(&self, state: &[f64]) -> Vec<f64> {
        let l = self.l();
        let nc = self.positions() + l - 1;
        let mut y = vec![0.0; nc * l];
        for c in 0..nc {
            for t in 0..l {
                y[c * l + t] = self.check_message(state, c, t);
            }
        }
        y
    }

    fn variable_factor(&self, y_at: impl Fn(usize, usize) -> f64, i: usize, t: usize) -> f64 {
        let mut prod = 1.0;
        for t2 in 0..self.l() {
            if t2 != t {
                prod *= y_at(i + t2, t2);
            }
        }
        prod
    }
}

impl DeSystem for ChainSystem {
    fn state_len(&self) -> usize {
        self.positions() * self.l()
    }
    fn sections(&self) -> usize {
        self.positions()
    }
    fn section_range(&self, section: usize) -> std::ops::Range<usize> {
        let l = self.l();
        section * l..(section + 1) * l
    }
    fn factors(&self, state: &[f64], out: &mut [f64]) {
        let l = self.l();
        let y = self.all_checks(state);
        for i in 0..self.positions() {
            for t in 0..l {
                out[i * l + t] = self.variable_factor(|c, t2| y[c * l + t2], i, t);
            }
        }
    }
    fn section_factors(&self, state: &[f64], section: usize, out: &mut [f64]) {
        let l = self.l();
        for t in 0..l {
            out[t] = self.variable_factor(|c, t2| self.check_message(state, c, t2), section, t);
        }
    }
    fn exit_values(&self, state: &[f64]) -> Vec<f64> {
        let l = self.l();
        let y = self.all_checks(state);
        (0..self.positions())
            .map(|i| (0..l).map(|t| y[(i + t) * l + t]).product())
            .collect()
    }
    fn describe(&self) -> String {
        let b = self.p.base();
        format!("({},{},L={}) chain", b.l(), b.r(), self.p.half_length())
    }
}
