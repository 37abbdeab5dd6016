use bec_coupling::de::{
    forward_de, forward_de_observed, ChainSystem, DeConfig, DeSystem, OneSidedSystem, ScalarSystem,
    Schedule, SmoothedSystem,
};
use bec_coupling::landscape::h_landscape;
use bec_coupling::numeric::sup_diff;
use bec_coupling::{ChainParams, RegularEnsemble, SmoothedParams};

fn ens(l: u32, r: u32) -> RegularEnsemble {
    RegularEnsemble::new(l, r).unwrap()
}

fn smoothed(l: u32, r: u32, half: usize, w: usize) -> SmoothedSystem {
    SmoothedSystem::new(SmoothedParams::new(ens(l, r), half, w).unwrap())
}

fn assert_monotone<S: DeSystem>(sys: &S, eps: f64, sched: Schedule) {
    let mut prev: Option<Vec<f64>> = None;
    let mut violations = 0usize;
    let mut steps = 0usize;
    forward_de_observed(sys, eps, sched, &DeConfig::default(), |_, s| {
        if let Some(p) = &prev {
            violations += s.iter().zip(p).filter(|(a, b)| a > b).count();
        }
        steps += 1;
        prev = Some(s.to_vec());
    })
    .unwrap();
    assert_eq!(
        violations,
        0,
        "{} at eps {eps} under {sched:?}",
        sys.describe()
    );
    assert!(steps > 1);
}

#[test]
fn forward_iterates_decrease_every_step() {
    for eps in [0.3, 0.45, 0.488, 0.49, 0.6, 1.0] {
        assert_monotone(&smoothed(3, 6, 8, 2), eps, Schedule::Parallel);
        assert_monotone(&smoothed(4, 8, 6, 3), eps, Schedule::Parallel);
        assert_monotone(&ScalarSystem::new(ens(3, 6)), eps, Schedule::Parallel);
    }
    for eps in [0.5, 0.52, 0.7] {
        assert_monotone(
            &ChainSystem::new(ChainParams::new(ens(3, 6), 4).unwrap()),
            eps,
            Schedule::Parallel,
        );
    }
    for eps in [0.45, 0.49] {
        assert_monotone(
            &smoothed(3, 6, 8, 2),
            eps,
            Schedule::RoundRobinBlocks { block: 3 },
        );
        assert_monotone(
            &smoothed(3, 6, 8, 2),
            eps,
            Schedule::SeededRandomSubsets {
                seed: 7,
                fairness: 4,
            },
        );
    }
}

#[test]
fn schedules_reach_the_same_fixed_point() {
    let sys = smoothed(3, 6, 8, 2);
    let cfg = DeConfig::default();
    for eps in [0.45, 0.49] {
        let reference = forward_de(&sys, eps, Schedule::Parallel, &cfg).unwrap();
        for sched in [
            Schedule::SeededRandomSubsets {
                seed: 1,
                fairness: 3,
            },
            Schedule::SeededRandomSubsets {
                seed: 2024,
                fairness: 8,
            },
            Schedule::RoundRobinBlocks { block: 1 },
            Schedule::RoundRobinBlocks { block: 5 },
        ] {
            let run = forward_de(&sys, eps, sched, &cfg).unwrap();
            let d = sup_diff(&reference.state, &run.state);
            assert!(d < 1e-9, "eps {eps} {sched:?}: {d:e}");
            assert_eq!(run.trivial, reference.trivial);
        }
        assert_eq!(reference.trivial, eps < 0.46);
    }
}

#[test]
fn forward_de_keeps_mirror_symmetry_exactly() {
    for (sys, eps) in [
        (smoothed(3, 6, 8, 2), 0.49),
        (smoothed(4, 8, 7, 3), 0.55),
        (smoothed(3, 6, 5, 4), 0.6),
    ] {
        let mut asym = 0usize;
        forward_de_observed(
            &sys,
            eps,
            Schedule::Parallel,
            &DeConfig::default(),
            |_, s| {
                let n = s.len();
                asym += (0..n)
                    .filter(|&k| s[k].to_bits() != s[n - 1 - k].to_bits())
                    .count();
            },
        )
        .unwrap();
        assert_eq!(asym, 0, "{}", sys.describe());
    }
}

#[test]
fn one_sided_fixed_point_dominates_two_sided() {
    let cfg = DeConfig::default();
    for (l, r, half, w) in [(3, 6, 8, 2), (4, 8, 6, 3), (3, 6, 12, 3)] {
        let p = SmoothedParams::new(ens(l, r), half, w).unwrap();
        for eps in [0.44, 0.47, 0.49, 0.5, 0.6] {
            // a trivial run has the all-zero fixed point
            let limit = |run: bec_coupling::de::DeRun| {
                if run.trivial {
                    vec![0.0; run.state.len()]
                } else {
                    run.state
                }
            };
            let two =
                limit(forward_de(&SmoothedSystem::new(p), eps, Schedule::Parallel, &cfg).unwrap());
            let one =
                limit(forward_de(&OneSidedSystem::new(p), eps, Schedule::Parallel, &cfg).unwrap());
            for k in 0..=half {
                assert!(
                    one[k] >= two[k],
                    "({l},{r},{half},{w}) eps {eps} section {}: {} < {}",
                    k as isize - half as isize,
                    one[k],
                    two[k]
                );
            }
        }
    }
}

#[test]
fn coupled_fixed_points_stay_below_scalar_stable_point() {
    let cfg = DeConfig::default();
    for eps in [0.45, 0.49, 0.55, 0.7, 1.0] {
        let x_s = h_landscape(eps, &ens(3, 6), 1e-14).unwrap().x_s;
        let systems: Vec<Box<dyn DeSystem>> = vec![
            Box::new(smoothed(3, 6, 8, 2)),
            Box::new(smoothed(3, 6, 6, 4)),
            Box::new(ChainSystem::new(ChainParams::new(ens(3, 6), 4).unwrap())),
            Box::new(ChainSystem::new(ChainParams::new(ens(3, 6), 8).unwrap())),
        ];
        for sys in systems {
            let state = forward_de(sys.as_ref(), eps, Schedule::Parallel, &cfg)
                .unwrap()
                .state;
            let top = state.iter().copied().fold(0.0, f64::max);
            assert!(
                top <= x_s + 1e-12,
                "{} eps {eps}: {top} > {x_s}",
                sys.describe()
            );
        }
    }
}
