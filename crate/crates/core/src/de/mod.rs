//! Density evolution for uncoupled, chain and smoothed ensembles.

mod forward;
mod systems;

pub use forward::{
    bp_threshold_coupled, forward_de, forward_de_entropy_bound, forward_de_observed,
    one_sided_forward_de, CoupledThreshold, DeRun, OneSidedRun,
};
pub use systems::{g_smoothed, ChainSystem, OneSidedSystem, ScalarSystem, SmoothedSystem};

use serde::{Deserialize, Serialize};

use crate::ensemble::{ChainParams, RegularEnsemble, SmoothedParams};
use crate::error::{invalid, Result};
use crate::numeric::mirrored_sum;

/// A density-evolution recursion `state <- eps * factors(state)`.
///
/// The state holds one or more messages per spatial section; the channel
/// parameter of a section multiplies all of its messages.
pub trait DeSystem: Sync {
    /// Number of scalar messages in the state.
    fn state_len(&self) -> usize;
    /// Number of spatial sections.
    fn sections(&self) -> usize;
    /// Index range of the messages of one section.
    fn section_range(&self, section: usize) -> std::ops::Range<usize>;
    /// Channel-free update factors for every message.
    fn factors(&self, state: &[f64], out: &mut [f64]);
    /// Channel-free update factors for the messages of one section.
    fn section_factors(&self, state: &[f64], section: usize, out: &mut [f64]);
    /// Per-section EXIT values.
    fn exit_values(&self, state: &[f64]) -> Vec<f64>;
    /// Mean message per section.
    fn section_values(&self, state: &[f64]) -> Vec<f64> {
        (0..self.sections())
            .map(|s| {
                let r = self.section_range(s);
                let n = r.len() as f64;
                mirrored_sum(&state[r]) / n
            })
            .collect()
    }
    /// Entropy: the normalized mean of all messages.
    fn entropy(&self, state: &[f64]) -> f64 {
        mirrored_sum(state) / state.len() as f64
    }
    /// Short human-readable descriptor.
    fn describe(&self) -> String;
}

/// Which coupled recursion to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Uncoupled,
    Chain,
    Smoothed,
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uncoupled" => Ok(Self::Uncoupled),
            "chain" => Ok(Self::Chain),
            "smoothed" => Ok(Self::Smoothed),
            other => Err(format!("unknown variant {other:?}")),
        }
    }
}

/// Any of the supported systems behind one type.
#[derive(Debug, Clone)]
pub enum Coupled {
    Uncoupled(ScalarSystem),
    Chain(ChainSystem),
    Smoothed(SmoothedSystem),
}

impl Coupled {
    pub fn uncoupled(e: RegularEnsemble) -> Self {
        Self::Uncoupled(ScalarSystem::new(e))
    }

    pub fn chain(p: ChainParams) -> Self {
        Self::Chain(ChainSystem::new(p))
    }

    pub fn smoothed(p: SmoothedParams) -> Self {
        Self::Smoothed(SmoothedSystem::new(p))
    }

    /// Builds a system from loose parameters; `w` is ignored by the chain and uncoupled variants.
    pub fn build(variant: Variant, l: u32, r: u32, half_length: usize, w: usize) -> Result<Self> {
        let e = RegularEnsemble::new(l, r)?;
        Ok(match variant {
            Variant::Uncoupled => Self::uncoupled(e),
            Variant::Chain => Self::chain(ChainParams::new(e, half_length)?),
            Variant::Smoothed => Self::smoothed(SmoothedParams::new(e, half_length, w)?),
        })
    }

    pub fn base(&self) -> RegularEnsemble {
        match self {
            Self::Uncoupled(s) => s.ensemble(),
            Self::Chain(s) => s.params().base(),
            Self::Smoothed(s) => s.params().base(),
        }
    }

    fn inner(&self) -> &dyn DeSystem {
        match self {
            Self::Uncoupled(s) => s,
            Self::Chain(s) => s,
            Self::Smoothed(s) => s,
        }
    }
}

impl DeSystem for Coupled {
    fn state_len(&self) -> usize {
        self.inner().state_len()
    }
    fn sections(&self) -> usize {
        self.inner().sections()
    }
    fn section_range(&self, section: usize) -> std::ops::Range<usize> {
        self.inner().section_range(section)
    }
    fn factors(&self, state: &[f64], out: &mut [f64]) {
        self.inner().factors(state, out)
    }
    fn section_factors(&self, state: &[f64], section: usize, out: &mut [f64]) {
        self.inner().section_factors(state, section, out)
    }
    fn exit_values(&self, state: &[f64]) -> Vec<f64> {
        self.inner().exit_values(state)
    }
    fn section_values(&self, state: &[f64]) -> Vec<f64> {
        self.inner().section_values(state)
    }
    fn describe(&self) -> String {
        self.inner().describe()
    }
}

/// Per-section erasure probabilities `x_{-L..L}`; zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    half_length: usize,
    values: Vec<f64>,
}

impl Constellation {
    pub fn new(half_length: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 2 * half_length + 1 {
            return invalid(format!(
                "constellation needs {} values, got {}",
                2 * half_length + 1,
                values.len()
            ));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return invalid("constellation entries must lie in [0, 1]");
        }
        Ok(Self {
            half_length,
            values,
        })
    }

    pub fn constant(half_length: usize, value: f64) -> Result<Self> {
        Self::new(half_length, vec![value; 2 * half_length + 1])
    }

    pub fn half_length(&self) -> usize {
        self.half_length
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `x_i` for any integer `i`, zero outside `[-L, L]`.
    pub fn get(&self, i: isize) -> f64 {
        let l = self.half_length as isize;
        if i < -l || i > l {
            0.0
        } else {
            self.values[(i + l) as usize]
        }
    }

    pub fn entropy(&self) -> f64 {
        entropy(&self.values)
    }
}

/// One-sided constellation `x_{-L..0}`; `x_i = x_0` for `i > 0`, zero for `i < -L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneSidedConstellation {
    length: usize,
    values: Vec<f64>,
}

impl OneSidedConstellation {
    pub fn new(length: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != length + 1 {
            return invalid(format!(
                "one-sided constellation needs {} values, got {}",
                length + 1,
                values.len()
            ));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return invalid("constellation entries must lie in [0, 1]");
        }
        Ok(Self { length, values })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `x_i` under the one-sided extension rule.
    pub fn get(&self, i: isize) -> f64 {
        let l = self.length as isize;
        if i < -l {
            0.0
        } else if i > 0 {
            self.values[self.length]
        } else {
            self.values[(i + l) as usize]
        }
    }

    pub fn entropy(&self) -> f64 {
        entropy(&self.values)
    }

    /// Non-decreasing within `slack`.
    pub fn is_non_decreasing(&self, slack: f64) -> bool {
        self.values.windows(2).all(|p| p[1] >= p[0] - slack)
    }

    /// Non-decreasing and not identically (numerically) zero.
    pub fn is_proper(&self, slack: f64, zero: f64) -> bool {
        self.is_non_decreasing(slack) && self.values[self.length] > zero
    }
}

/// Per-section channel parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonProfile {
    pub values: Vec<f64>,
}

impl EpsilonProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return invalid("channel parameters must be finite and >= 0");
        }
        Ok(Self { values })
    }

    pub fn constant(sections: usize, eps: f64) -> Result<Self> {
        Self::new(vec![eps; sections])
    }
}

/// Update order of forward DE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Schedule {
    /// Synchronous update of every section.
    Parallel,
    /// Blocks of `block` consecutive sections updated in place, left to right.
    RoundRobinBlocks { block: usize },
    /// Each step updates a seeded random subset; no section waits more than `fairness` steps.
    SeededRandomSubsets { seed: u64, fairness: usize },
}

impl Schedule {
    /// Maximum number of steps between two updates of a section.
    pub fn fairness_window(&self, sections: usize) -> usize {
        match *self {
            Schedule::Parallel => 1,
            Schedule::RoundRobinBlocks { block } => sections.div_ceil(block.max(1)),
            Schedule::SeededRandomSubsets { fairness, .. } => fairness.max(1),
        }
    }
}

/// Convergence controls for DE iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub zero_threshold: f64,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 1_000_000,
            zero_threshold: 1e-10,
        }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return invalid("DE tolerance must be > 0");
        }
        if self.max_iterations == 0 {
            return invalid("max iterations must be > 0");
        }
        Ok(())
    }
}

/// Normalized mean of a constellation.
pub fn entropy(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    mirrored_sum(values) / values.len() as f64
}

/// One synchronous step with a scalar channel parameter.
pub fn de_step<S: DeSystem + ?Sized>(sys: &S, state: &[f64], eps: f64) -> Vec<f64> {
    let mut out = vec![0.0; sys.state_len()];
    sys.factors(state, &mut out);
    out.iter_mut().for_each(|v| *v *= eps);
    out
}

/// One synchronous step with a per-section channel profile.
pub fn de_step_profile<S: DeSystem + ?Sized>(
    sys: &S,
    state: &[f64],
    prof: &EpsilonProfile,
) -> Result<Vec<f64>> {
    if prof.values.len() != sys.sections() {
        return invalid(format!(
            "profile has {} entries, system has {} sections",
            prof.values.len(),
            sys.sections()
        ));
    }
    let mut out = vec![0.0; sys.state_len()];
    sys.factors(state, &mut out);
    for (s, &eps) in prof.values.iter().enumerate() {
        out[sys.section_range(s)].iter_mut().for_each(|v| *v *= eps);
    }
    Ok(out)
}
