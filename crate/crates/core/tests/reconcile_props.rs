mod common;

use kbrecon::formula::{max_var, Clause, CnfFormula};
use kbrecon::generate::{random_reconcile_instance, InstanceShape};
use kbrecon::hitting_set::min_hitting_set;
use kbrecon::minimal::ClauseIndexSet;
use kbrecon::reconcile::{
    brute_force_min_update, parse_explanation_records, reconcile, verify_explanation, write_records, Mode,
    ReconcileError, DEFAULT_BRUTE_FORCE_CAP,
};
use kbrecon::sat::is_satisfiable;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn instance(seed: u64, mode: Mode) -> kbrecon::reconcile::ReconcileProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_reconcile_instance(&mut rng, InstanceShape::default()).with_mode(mode)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn general_update_is_minimum_and_verifies(seed in any::<u64>()) {
        let p = instance(seed, Mode::General);
        let e = reconcile(&p).unwrap();
        let reduced = e.reduced_kb_h(&p.kb_h);
        prop_assert_eq!(Some(e.update.len()), truth_table_min_update(&p, &reduced));
        let v = verify_explanation(&reduced, &e.support, &p.query).unwrap();
        prop_assert!(v.passed(), "{}", v);
        for c in &e.update {
            prop_assert!(p.kb_a.contains(c) && !reduced.contains(c));
        }
        for c in &e.support {
            prop_assert!(p.kb_a.contains(c) || reduced.contains(c));
        }
        for c in &e.removed_from_kb_h {
            prop_assert!(p.kb_h.contains(c) && !p.kb_a.contains(c));
        }
    }

    #[test]
    fn restricted_update_is_minimum(seed in any::<u64>()) {
        let p = instance(seed, Mode::Restricted);
        match reconcile(&p) {
            Ok(e) => {
                let reduced = e.reduced_kb_h(&p.kb_h);
                prop_assert_eq!(Some(e.update.len()), truth_table_min_update(&p, &reduced));
                for c in &e.support {
                    prop_assert!(p.kb_a.contains(c));
                }
                let v = verify_explanation(&reduced, &e.support, &p.query).unwrap();
                prop_assert!(v.entailment && v.minimality, "{}", v);
            }
            Err(ReconcileError::RestrictedInconsistent { explanation }) => {
                let reduced = explanation.reduced_kb_h(&p.kb_h);
                prop_assert!(!is_satisfiable(reduced.clauses().iter().chain(&explanation.support)));
            }
            Err(other) => prop_assert!(false, "{other}"),
        }
    }

    #[test]
    fn library_oracle_agrees_with_truth_table(seed in any::<u64>()) {
        let p = instance(seed, Mode::General);
        let e = reconcile(&p).unwrap();
        let reduced = e.reduced_kb_h(&p.kb_h);
        let b = brute_force_min_update(&p, DEFAULT_BRUTE_FORCE_CAP).unwrap();
        prop_assert_eq!(Some(b.size), truth_table_min_update(&p, &reduced));
    }

    #[test]
    fn records_round_trip(seed in any::<u64>()) {
        let p = instance(seed, Mode::General);
        let e = reconcile(&p).unwrap();
        let parsed = parse_explanation_records(&write_records(&e, None)).unwrap();
        prop_assert_eq!(parsed.support, e.support);
        prop_assert_eq!(parsed.update, e.update);
        prop_assert_eq!(parsed.removed, e.removed_from_kb_h);
    }

    #[test]
    fn hitting_set_is_minimum(sets in prop::collection::vec(prop::collection::btree_set(0usize..10, 1..5), 1..8)) {
        let sets: Vec<ClauseIndexSet> = sets.into_iter().map(ClauseIndexSet::new).collect();
        let h = min_hitting_set(&sets).unwrap();
        prop_assert!(sets.iter().all(|s| s.intersects(&h)));
        let masks: Vec<u64> = sets.iter().map(|s| mask_of(s.iter())).collect();
        let best = (0..=10).find(|&k| subsets_of_size(10, k).any(|m| masks.iter().all(|&s| s & m != 0)));
        prop_assert_eq!(Some(h.len()), best);
    }
}

#[test]
fn dimacs_round_trip_keeps_instances() {
    for seed in 0..20 {
        let p = instance(seed, Mode::General);
        let text = kbrecon::formula::write_dimacs(&p.kb_a);
        let back = kbrecon::formula::parse_dimacs(&text).unwrap();
        assert_eq!(back.clauses(), p.kb_a.clauses());
    }
}

#[test]
fn non_unit_queries_are_supported() {
    // φ = (a ∨ b) ∧ c over kb_a = {a, c}, kb_h = {}
    let kb_a = CnfFormula::from_dimacs_clauses(3, &[&[1], &[3]]);
    let kb_h = CnfFormula::new(3);
    let query = CnfFormula::from_dimacs_clauses(3, &[&[1, 2], &[3]]);
    let p = kbrecon::reconcile::ReconcileProblem::new(kb_a, kb_h.clone(), query.clone());
    let e = reconcile(&p).unwrap();
    assert_eq!(e.update.len(), 2);
    assert!(verify_explanation(&kb_h, &e.support, &query).unwrap().passed());
    assert!(e.update.iter().all(|c: &Clause| max_var([c]) <= 3));
}
