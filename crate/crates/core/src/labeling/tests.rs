use proptest::prelude::*;

use super::*;
use crate::heuristics::HeuristicKind;
use crate::instance::check_solution;
use crate::instance::test_support::{edge, instance, triangle};
use crate::units::Units;
use crate::verify::oracle_solve;

fn all_configs() -> Vec<SolverConfig> {
    configs_with(Dominance::Resource)
}

fn configs_with(dominance: Dominance) -> Vec<SolverConfig> {
    let mut out = Vec::new();
    for selection in Selection::ALL {
        for heuristic in HeuristicKind::ALL {
            out.push(SolverConfig {
                dominance,
                ..SolverConfig::new(selection, heuristic)
            });
        }
    }
    out
}

#[test]
fn triangle_takes_the_detour_under_every_config() {
    let inst = triangle();
    for config in all_configs() {
        let outcome = solve(&inst, &config).unwrap();
        let sol = outcome.solution().expect("feasible");
        assert_eq!(sol.cost, 12.0, "{config:?}");
        assert_eq!(sol.path, vec![0, 1, 2]);
        assert_eq!(sol.gen, vec![false, false]);
        assert_eq!(sol.battery, vec![Units(8), Units(5), Units(2)]);
        assert_eq!(check_solution(&inst, sol), Ok(()));
    }
}

#[test]
fn infeasible_instance_reports_infeasible() {
    let mut inst = triangle();
    inst.edges[1].drain = Units(9);
    for config in all_configs() {
        let outcome = solve(&inst, &config).unwrap();
        assert!(
            matches!(outcome, SolveOutcome::Infeasible { .. }),
            "{config:?}"
        );
    }
}

#[test]
fn generator_recharge_makes_the_path_feasible() {
    // battery 5 with drains 4 + 4 only works with the generator on edge 0;
    // edge 1 is noise restricted
    let mut inst = instance(
        3,
        vec![edge(0, 1, 1.0, 4, 4, true), edge(1, 2, 1.0, 4, 0, false)],
        0,
        2,
    );
    inst.b0 = Units(5);
    inst.bmax = Units(10);
    inst.q0 = Units(4);
    inst.startup = Units(1);
    let sol = solve(&inst, &SolverConfig::default())
        .unwrap()
        .solution()
        .cloned()
        .unwrap();
    assert_eq!(sol.gen, vec![true, false]);
    // 5 - 4 - 1 = 0 >= Bmin, then + 4
    assert_eq!(sol.battery, vec![Units(5), Units(4), Units(0)]);
    assert_eq!(sol.fuel, vec![Units(4), Units(0), Units(0)]);
}

#[test]
fn zero_fuel_never_runs_the_generator() {
    let mut inst = triangle();
    inst.edges[0].drain = Units(1);
    inst.q0 = Units(0);
    let sol = solve(&inst, &SolverConfig::default())
        .unwrap()
        .solution()
        .cloned()
        .unwrap();
    assert!(sol.gen.iter().all(|&g| !g));
    assert_eq!(sol.cost, 10.0);
}

#[test]
fn sup_path_is_returned_when_it_is_feasible() {
    let mut inst = triangle();
    inst.edges[0].drain = Units(0);
    let sup = crate::heuristics::sup_path(&inst).unwrap();
    let outcome = solve(
        &inst,
        &SolverConfig::new(Selection::Label, HeuristicKind::Sup),
    )
    .unwrap();
    assert_eq!(outcome.cost(), Some(sup.cost));
    assert_eq!(outcome.solution().unwrap().path, sup.path);
}

#[test]
fn extract_path_follows_parents() {
    let inst = triangle();
    let table = HeuristicTable::build(HeuristicKind::Zero, &inst).unwrap();
    let mut open = OpenList::new(3);
    let (root, _) = open.insert(Label::start(&inst, table.get(0)));
    let mut a = extend_resources(open.label(root), 1, &inst.edges[1], false, &inst).unwrap();
    a.parent = Some(root);
    a.f = a.cost;
    let (a_id, _) = open.insert(a);
    let mut b = extend_resources(open.label(a_id), 2, &inst.edges[2], false, &inst).unwrap();
    b.parent = Some(a_id);
    b.f = b.cost;
    let (b_id, _) = open.insert(b);
    let sol = extract_path(&open, b_id);
    assert_eq!(sol.path, vec![0, 1, 2]);
    assert_eq!(sol.gen, vec![false, false]);
    assert_eq!(sol.fuel, vec![Units(0); 3]);
    assert_eq!(sol.cost, 12.0);
}

#[test]
fn label_limit_stops_the_search() {
    let inst = triangle();
    let config = SolverConfig {
        limits: Limits {
            max_labels: Some(1),
            max_time: None,
        },
        ..SolverConfig::new(Selection::Label, HeuristicKind::Zero)
    };
    match solve(&inst, &config) {
        Err(SolveError::LimitExceeded { stats, bound }) => {
            assert!(stats.labels_created > 1);
            assert!(bound.is_finite());
        }
        other => panic!("expected limit, got {other:?}"),
    }
}

#[test]
fn invalid_instance_is_rejected() {
    let mut inst = triangle();
    inst.goal = inst.start;
    assert!(matches!(
        solve(&inst, &SolverConfig::default()),
        Err(SolveError::InvalidInstance(_))
    ));
}

#[test]
fn start_unable_to_reach_goal() {
    let inst = instance(3, vec![edge(0, 1, 1.0, 0, 0, true)], 0, 2);
    let outcome = solve(&inst, &SolverConfig::default()).unwrap();
    assert!(outcome.solution().is_none());
    assert_eq!(outcome.stats().labels_created, 0);
}

/// The label at node 2 that came through node 3 dominates the one that came
/// through node 4, but only the latter can go on to 1 -> 3 -> 6 with enough
/// battery for the final edge.
fn revisit_trap() -> Instance {
    let mut inst = instance(
        7,
        vec![
            edge(0, 3, 3.0, 1, 1, false),
            edge(0, 4, 4.0, 1, 3, true),
            edge(1, 3, 2.0, 1, 1, false),
            edge(2, 1, 1.0, 1, 4, true),
            edge(3, 2, 1.0, 1, 2, true),
            edge(3, 6, 3.0, 5, 5, false),
            edge(4, 2, 2.0, 2, 0, false),
        ],
        0,
        6,
    );
    inst.b0 = Units(5);
    inst.bmax = Units(14);
    inst.q0 = Units(7);
    inst
}

#[test]
fn resource_dominance_can_lose_the_optimum_on_simple_paths() {
    let inst = revisit_trap();
    assert_eq!(oracle_solve(&inst).unwrap().optimal_cost(), Some(12.0));
    for config in all_configs() {
        let lossy = solve(&inst, &config).unwrap();
        assert_eq!(lossy.cost(), None, "{config:?}");
    }
    for config in configs_with(Dominance::Elementary) {
        let exact = solve(&inst, &config).unwrap();
        assert_eq!(exact.cost(), Some(12.0), "{config:?}");
        assert_eq!(exact.solution().unwrap().path, vec![0, 4, 2, 1, 3, 6]);
    }
}

/// Small random digraph on a line with integral costs no shorter than the
/// chord, so every path cost is exact and the straight-line bound holds.
/// Recharge tracks drain, so running the generator is often worth it.
pub(crate) fn small_instance() -> impl Strategy<Value = Instance> {
    (4usize..=9)
        .prop_flat_map(|n| {
            let pair = (
                prop::bool::weighted(0.35),
                1u32..=9,
                1i64..=6,
                -2i64..=4,
                prop::bool::weighted(0.7),
            );
            (
                Just(n),
                prop::collection::vec(pair, n * (n - 1)),
                6i64..=20,
                0.2f64..=1.0,
                0i64..=24,
                0i64..=3,
            )
        })
        .prop_map(|(n, pairs, bmax, b0_frac, q0, v)| {
            let ordered = (0..n).flat_map(|u| (0..n).filter(move |&w| w != u).map(move |w| (u, w)));
            let edges = ordered
                .zip(pairs)
                .filter(|&((u, w), (keep, ..))| keep && !(u == 0 && w == n - 1))
                .map(|((u, w), (_, d, c, dz, g))| {
                    edge(
                        u,
                        w,
                        f64::from(d).max(u.abs_diff(w) as f64),
                        c,
                        (c + dz).max(0),
                        g,
                    )
                })
                .collect();
            let mut inst = instance(n, edges, 0, n - 1);
            inst.bmax = Units(bmax);
            inst.b0 = Units((bmax as f64 * b0_frac) as i64);
            inst.q0 = Units(q0);
            inst.startup = Units(v);
            inst
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn elementary_dominance_matches_the_oracle(inst in small_instance()) {
        let oracle = oracle_solve(&inst).unwrap();
        for config in configs_with(Dominance::Elementary) {
            let outcome = solve(&inst, &config).unwrap();
            prop_assert_eq!(outcome.cost(), oracle.optimal_cost(), "{:?}", config);
        }
    }

    #[test]
    fn resource_dominance_never_beats_the_oracle(inst in small_instance()) {
        let oracle = oracle_solve(&inst).unwrap();
        for config in all_configs() {
            let outcome = solve(&inst, &config).unwrap();
            match (outcome.solution(), oracle.optimal_cost()) {
                (Some(sol), Some(best)) => {
                    prop_assert!(sol.cost >= best);
                    prop_assert_eq!(check_solution(&inst, sol), Ok(()));
                }
                (Some(_), None) => prop_assert!(false, "solver found a path the oracle did not"),
                (None, _) => {}
            }
        }
    }

    #[test]
    fn repeated_solves_are_identical(inst in small_instance()) {
        for config in [SolverConfig::default(), SolverConfig::new(Selection::Node, HeuristicKind::Sld)] {
            let a = solve(&inst, &config).unwrap();
            let b = solve(&inst, &config).unwrap();
            prop_assert_eq!(a.solution(), b.solution());
            let (sa, sb) = (a.stats(), b.stats());
            prop_assert_eq!(
                (sa.labels_created, sa.labels_treated, sa.labels_pruned, sa.peak_open, sa.max_labels_at_node),
                (sb.labels_created, sb.labels_treated, sb.labels_pruned, sb.peak_open, sb.max_labels_at_node)
            );
        }
    }

    #[test]
    fn stats_are_consistent(inst in small_instance()) {
        for config in all_configs() {
            let s = solve(&inst, &config).unwrap().stats().clone();
            prop_assert!(s.labels_treated <= s.labels_created);
            prop_assert!(s.peak_open <= s.labels_created);
            prop_assert!(s.max_labels_at_node <= s.labels_created);
            // one label per (battery, fuel, generator) state at most
            let grid = 2 * (inst.bmax.0 - inst.bmin.0 + 1) as u64 * (inst.q0.0 + 1) as u64;
            prop_assert!(s.max_labels_at_node <= grid);
        }
    }

    #[test]
    fn cost_is_at_least_the_unconstrained_shortest_path(inst in small_instance()) {
        let Ok(sup) = crate::heuristics::sup_path(&inst) else { return Ok(()); };
        for config in all_configs() {
            if let Some(cost) = solve(&inst, &config).unwrap().cost() {
                prop_assert!(cost >= sup.cost);
            }
        }
    }
}
