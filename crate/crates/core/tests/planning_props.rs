use std::collections::BTreeSet;

use kbrecon::planning::data::{BLOCKS_DOMAIN, BLOCKS_SUSSMAN, BLOCKS_TWO, MOVE_DOMAIN, MOVE_LINE3};
use kbrecon::planning::{
    encode_bounded, explain_plan, ground, parse_pddl, tweak_model, validate_plan, ExplainConfig, Plan,
    PlanningProblem, TweakParams,
};
use kbrecon::sat::{SatSession, SolveResult};
use proptest::prelude::*;

fn task(domain: &str, problem: &str) -> PlanningProblem {
    ground(&parse_pddl(domain, problem).unwrap()).unwrap()
}

/// States reachable by exactly `t` steps, for `t` in `0..=max`.
fn exact_layers(p: &PlanningProblem, max: usize) -> Vec<BTreeSet<BTreeSet<usize>>> {
    let mut layers = vec![BTreeSet::from([p.init.iter().copied().collect::<BTreeSet<usize>>()])];
    for _ in 0..max {
        let next = layers
            .last()
            .unwrap()
            .iter()
            .flat_map(|s| {
                p.actions.iter().filter(|a| a.pre.iter().all(|f| s.contains(f))).map(move |a| {
                    let mut t = s.clone();
                    for d in &a.del {
                        t.remove(d);
                    }
                    t.extend(a.add.iter().copied());
                    t
                })
            })
            .collect();
        layers.push(next);
    }
    layers
}

fn check_horizons(p: &PlanningProblem, max: usize) {
    let layers = exact_layers(p, max);
    for (n, layer) in layers.iter().enumerate() {
        let reachable = layer.iter().any(|s| p.goal.iter().all(|g| s.contains(g)));
        let enc = encode_bounded(p, n, true);
        let mut session = SatSession::new(enc.layout.num_vars());
        for c in enc.cnf.clauses() {
            session.add_hard(c);
        }
        match session.solve(&[]) {
            SolveResult::Sat(model) => {
                assert!(reachable, "horizon {n}: encoding has a plan BFS does not");
                let steps = enc.decode_plan(&model).into_iter().map(|i| p.actions[i].clone()).collect();
                let plan = Plan { steps };
                assert_eq!(plan.len(), n);
                assert!(validate_plan(p, &plan), "horizon {n}: decoded plan is invalid");
            }
            SolveResult::Unsat(_) => assert!(!reachable, "horizon {n}: BFS has a plan the encoding lacks"),
        }
    }
}

#[test]
fn encoding_agrees_with_exact_length_search() {
    check_horizons(&task(BLOCKS_DOMAIN, BLOCKS_SUSSMAN), 8);
    check_horizons(&task(BLOCKS_DOMAIN, BLOCKS_TWO), 6);
    check_horizons(&task(MOVE_DOMAIN, MOVE_LINE3), 6);
}

#[test]
fn zero_deletions_need_no_explanation() {
    let p = task(BLOCKS_DOMAIN, BLOCKS_SUSSMAN);
    let mut cfg = ExplainConfig::new(6, 0);
    cfg.params = TweakParams {
        init_atoms: 0,
        ..TweakParams::default()
    };
    let e = explain_plan(&p, &cfg).unwrap();
    assert_eq!(e.tweak_log.deletions(), 0);
    assert!(e.explanation.update.is_empty());
    assert!(e.verification.passed());
}

#[test]
fn every_planning_scenario_verifies_on_blocks() {
    let p = task(BLOCKS_DOMAIN, BLOCKS_SUSSMAN);
    for scenario in 1..=8 {
        let e = explain_plan(&p, &ExplainConfig::new(scenario, 100 + scenario as u64)).unwrap();
        assert!(e.feasible_after_repair, "scenario {scenario}");
        assert!(e.verification.passed(), "scenario {scenario}: {}", e.verification);
        for c in &e.explanation.update {
            assert!(e.kb_a.cnf.contains(c), "scenario {scenario}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn line3_explanations_verify(scenario in 1u8..=8, seed in any::<u64>()) {
        let p = task(MOVE_DOMAIN, MOVE_LINE3);
        let e = explain_plan(&p, &ExplainConfig::new(scenario, seed)).unwrap();
        prop_assert!(e.verification.passed(), "{}", e.verification);
        prop_assert_eq!(e.plan.len(), 2);
        prop_assert!(e.feasible_after_repair);
    }

    #[test]
    fn tweaks_only_delete(scenario in 1u8..=7, seed in any::<u64>()) {
        let p = task(BLOCKS_DOMAIN, BLOCKS_SUSSMAN);
        let (h, log) = tweak_model(&p, scenario, seed, TweakParams::default()).unwrap();
        prop_assert_eq!(h.actions.len(), p.actions.len());
        prop_assert!(h.init.iter().all(|f| p.init.contains(f)));
        let mut removed = 0;
        for (a, b) in p.actions.iter().zip(&h.actions) {
            prop_assert!(b.pre.iter().all(|f| a.pre.contains(f)));
            prop_assert!(b.add.iter().all(|f| a.add.contains(f)));
            prop_assert!(b.del.iter().all(|f| a.del.contains(f)));
            removed += a.pre.len() + a.add.len() + a.del.len() - b.pre.len() - b.add.len() - b.del.len();
        }
        removed += p.init.len() - h.init.len();
        prop_assert_eq!(removed, log.deletions());
    }
}
