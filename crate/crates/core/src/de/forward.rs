//! Forward DE from the all-one state, thresholds of coupled systems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DeConfig, DeSystem, OneSidedConstellation, OneSidedSystem, Schedule};
use crate::ensemble::SmoothedParams;
use crate::error::{invalid, Error, Result};
use crate::numeric::{bisect_predicate, sup_diff};

/// Outcome of a forward-DE run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeRun {
    pub state: Vec<f64>,
    pub iterations: usize,
    /// Every message fell below the declare-zero threshold.
    pub trivial: bool,
    pub last_change: f64,
}

/// Forward DE under `sched` starting from the all-one state.
pub fn forward_de<S: DeSystem + ?Sized>(
    sys: &S,
    eps: f64,
    sched: Schedule,
    cfg: &DeConfig,
) -> Result<DeRun> {
    forward_de_observed(sys, eps, sched, cfg, |_, _| {})
}

/// Like [`forward_de`], handing every iterate (including the start) to `observe`.
pub fn forward_de_observed<S, F>(
    sys: &S,
    eps: f64,
    sched: Schedule,
    cfg: &DeConfig,
    mut observe: F,
) -> Result<DeRun>
where
    S: DeSystem + ?Sized,
    F: FnMut(usize, &[f64]),
{
    if !(0.0..=1.0).contains(&eps) {
        return invalid(format!("eps = {eps} outside [0, 1]"));
    }
    cfg.validate()?;
    let n = sys.state_len();
    let sections = sys.sections();
    let mut state = vec![1.0; n];
    let mut next = vec![0.0; n];
    observe(0, &state);
    let is_zero = |s: &[f64]| s.iter().all(|&v| v < cfg.zero_threshold);
    let done = |state: Vec<f64>, iterations: usize, last_change: f64| {
        let trivial = state.iter().all(|&v| v < cfg.zero_threshold);
        Ok(DeRun {
            state,
            iterations,
            trivial,
            last_change,
        })
    };

    match sched {
        Schedule::Parallel => {
            let mut change = f64::INFINITY;
            for it in 1..=cfg.max_iterations {
                sys.factors(&state, &mut next);
                next.iter_mut().for_each(|v| *v *= eps);
                change = sup_diff(&state, &next);
                std::mem::swap(&mut state, &mut next);
                observe(it, &state);
                if change < cfg.tolerance || is_zero(&state) {
                    return done(state, it, change);
                }
            }
            Err(Error::NoConvergence {
                iterations: cfg.max_iterations,
                last_change: change,
                last_iterate: state,
            })
        }
        Schedule::RoundRobinBlocks { block }
        | Schedule::SeededRandomSubsets {
            fairness: block, ..
        } if block == 0 => invalid("schedule block size / fairness window must be >= 1"),
        Schedule::RoundRobinBlocks { block } => {
            let blocks = sections.div_ceil(block);
            let mut cycle_change: f64 = 0.0;
            let mut buf = vec![0.0; n];
            for it in 1..=cfg.max_iterations {
                let b = (it - 1) % blocks;
                for s in b * block..((b + 1) * block).min(sections) {
                    let range = sys.section_range(s);
                    let out = &mut buf[..range.len()];
                    sys.section_factors(&state, s, out);
                    for (dst, &f) in state[range].iter_mut().zip(out.iter()) {
                        let v = eps * f;
                        cycle_change = cycle_change.max((v - *dst).abs());
                        *dst = v;
                    }
                }
                observe(it, &state);
                if is_zero(&state) {
                    return done(state, it, cycle_change);
                }
                if b == blocks - 1 {
                    if cycle_change < cfg.tolerance {
                        return done(state, it, cycle_change);
                    }
                    cycle_change = 0.0;
                }
            }
            Err(Error::NoConvergence {
                iterations: cfg.max_iterations,
                last_change: cycle_change,
                last_iterate: state,
            })
        }
        Schedule::SeededRandomSubsets { seed, fairness } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut waiting = vec![0usize; sections];
            let mut window_change: f64 = 0.0;
            let mut window_updated = vec![false; sections];
            let mut buf = vec![0.0; n];
            let mut chosen = Vec::with_capacity(sections);
            for it in 1..=cfg.max_iterations {
                chosen.clear();
                for s in 0..sections {
                    if rng.gen_bool(0.5) || waiting[s] + 1 >= fairness {
                        chosen.push(s);
                        waiting[s] = 0;
                    } else {
                        waiting[s] += 1;
                    }
                }
                // the subset is updated synchronously from the current state
                let mut updates = Vec::with_capacity(chosen.len());
                for &s in &chosen {
                    let range = sys.section_range(s);
                    let out = &mut buf[..range.len()];
                    sys.section_factors(&state, s, out);
                    updates.push((range, out.to_vec()));
                }
                for (range, vals) in updates {
                    let s = range.start / range.len();
                    window_updated[s] = true;
                    for (dst, f) in state[range].iter_mut().zip(vals) {
                        let v = eps * f;
                        window_change = window_change.max((v - *dst).abs());
                        *dst = v;
                    }
                }
                observe(it, &state);
                if is_zero(&state) {
                    return done(state, it, window_change);
                }
                if window_updated.iter().all(|&u| u) {
                    if window_change < cfg.tolerance {
                        return done(state, it, window_change);
                    }
                    window_change = 0.0;
                    window_updated.iter_mut().for_each(|u| *u = false);
                }
            }
            Err(Error::NoConvergence {
                iterations: cfg.max_iterations,
                last_change: window_change,
                last_iterate: state,
            })
        }
    }
}

/// Bracket of the BP threshold of a coupled system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledThreshold {
    pub eps: f64,
    /// Largest tested parameter with a trivial forward-DE fixed point.
    pub lo: f64,
    /// Smallest tested parameter with a nontrivial one.
    pub hi: f64,
}

/// Bisection on the forward-DE outcome over `[0.01, 0.999]`.
///
/// A run that exhausts `cfg.max_iterations` counts as not decoded.
pub fn bp_threshold_coupled<S: DeSystem + ?Sized>(
    sys: &S,
    cfg: &DeConfig,
    bisect_tol: f64,
) -> Result<CoupledThreshold> {
    if !(bisect_tol >= 1e-7) {
        return invalid(format!("bisection tolerance {bisect_tol} below 1e-7"));
    }
    let nontrivial = |eps: f64| -> Result<bool> {
        match forward_de(sys, eps, Schedule::Parallel, cfg) {
            Ok(run) => Ok(!run.trivial),
            Err(Error::NoConvergence { .. }) => Ok(true),
            Err(e) => Err(e),
        }
    };
    let (lo, hi) = (0.01, 0.999);
    if nontrivial(lo)? {
        return Err(Error::NoBracket {
            what: "forward DE nontrivial at lower end".into(),
            lo,
            hi,
        });
    }
    if !nontrivial(hi)? {
        return Err(Error::NoBracket {
            what: "forward DE trivial at upper end".into(),
            lo,
            hi,
        });
    }
    let (a, b) = bisect_predicate(nontrivial, lo, hi, bisect_tol)?;
    Ok(CoupledThreshold {
        eps: 0.5 * (a + b),
        lo: a,
        hi: b,
    })
}

/// Result of one-sided forward DE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneSidedRun {
    pub x: OneSidedConstellation,
    pub proper: bool,
    pub iterations: usize,
}

/// One-sided forward DE under the parallel schedule; `p.half_length()` is the one-sided length.
pub fn one_sided_forward_de(p: &SmoothedParams, eps: f64, cfg: &DeConfig) -> Result<OneSidedRun> {
    let sys = OneSidedSystem::new(*p);
    let run = forward_de(&sys, eps, Schedule::Parallel, cfg)?;
    let x = OneSidedConstellation::new(p.half_length(), run.state)?;
    let proper = !run.trivial && x.is_non_decreasing(1e-14);
    Ok(OneSidedRun {
        x,
        proper,
        iterations: run.iterations,
    })
}

/// Entropy guaranteed for the forward-DE fixed point of the (l, r, L, w) system at `eps`.
///
/// Largest `chi` with `L >= w / (2((r/l)(eps - chi eps^(-1/(l-1))) - 1))`; zero when none.
pub fn forward_de_entropy_bound(p: &SmoothedParams, eps: f64) -> f64 {
    let b = p.base();
    let ratio = b.l() as f64 / b.r() as f64;
    let loss = ratio * p.w() as f64 / (2.0 * p.half_length() as f64);
    let chi = eps.powf(1.0 / (b.l() - 1) as f64) * (eps - ratio - loss);
    chi.max(0.0)
}
