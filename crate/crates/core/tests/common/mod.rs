//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the reconciliation, hitting-set, MUS/MCS or backbone code under test.
#![allow(dead_code)]

use std::collections::BTreeSet;

use kbrecon::formula::{Clause, CnfFormula, Literal};
use kbrecon::reconcile::{Mode, ReconcileProblem};
use kbrecon::sat::is_satisfiable;

pub const TABLE_KB_A: &str = include_str!("../../data/table/kb_a.cnf");
pub const TABLE_KB_H: &str = include_str!("../../data/table/kb_h.cnf");
pub const TABLE_QUERY: &str = include_str!("../../data/table/query.txt");

/// A clause as (positive mask, negative mask) over variables `1..=32`.
#[derive(Clone, Copy)]
pub struct Bits {
    pos: u32,
    neg: u32,
}

impl Bits {
    pub fn of(c: &Clause) -> Bits {
        let mut b = Bits { pos: 0, neg: 0 };
        for l in c.lits() {
            assert!(l.var() <= 32, "truth tables stop at 32 variables");
            let bit = 1u32 << (l.var() - 1);
            if l.is_positive() {
                b.pos |= bit;
            } else {
                b.neg |= bit;
            }
        }
        b
    }

    pub fn sat(self, a: u32) -> bool {
        a & self.pos != 0 || !a & self.neg != 0
    }
}

fn num_vars<'a>(cs: impl IntoIterator<Item = &'a Clause>) -> u32 {
    cs.into_iter().flat_map(|c| c.lits()).map(|l| l.var()).max().unwrap_or(0)
}

/// Every total assignment over `n` variables, as bitmasks.
fn assignments(n: u32) -> impl Iterator<Item = u32> {
    assert!(n <= 24, "truth table too large");
    0..(1u32 << n)
}

/// For every assignment satisfying `context` and `¬query` (a conjunction of
/// unit clauses), the set of `universe` clauses it falsifies; then only the
/// inclusion-minimal ones.
fn counter_masks(universe: &[Clause], context: &[Clause], query: &[Literal]) -> Vec<u64> {
    let n = num_vars(universe.iter().chain(context)).max(query.iter().map(|l| l.var()).max().unwrap_or(0));
    let ub: Vec<Bits> = universe.iter().map(Bits::of).collect();
    let cb: Vec<Bits> = context.iter().map(Bits::of).collect();
    let neg = Bits::of(&Clause::new(query.iter().map(|&l| !l)));
    let mut masks = BTreeSet::new();
    for a in assignments(n) {
        if !neg.sat(a) || !cb.iter().all(|c| c.sat(a)) {
            continue;
        }
        let m = ub
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.sat(a))
            .fold(0u64, |m, (i, _)| m | 1 << i);
        masks.insert(m);
    }
    let all: Vec<u64> = masks.into_iter().collect();
    all.iter()
        .copied()
        .filter(|&m| !all.iter().any(|&o| o != m && o & m == o))
        .collect()
}

/// Size of a smallest subset of `0..n` meeting every mask, or `None` if
/// some mask is empty.
fn min_cover(masks: &[u64], n: usize) -> Option<usize> {
    if masks.contains(&0) {
        return None;
    }
    (0..=n).find(|&k| subsets_of_size(n, k).any(|s| masks.iter().all(|&m| m & s != 0)))
}

pub fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u64> {
    assert!(n < 64);
    (0u64..1 << n).filter(move |s| s.count_ones() as usize == k)
}

pub fn unit_literals(query: &CnfFormula) -> Vec<Literal> {
    query
        .clauses()
        .iter()
        .map(|c| {
            assert!(c.is_unit(), "oracles take conjunctions of literals");
            c.lits()[0]
        })
        .collect()
}

/// Smallest `|S|` with `S ⊆ kb` and `S ⊨ query`, by truth table.
pub fn truth_table_min_support(kb: &CnfFormula, query: &CnfFormula) -> Option<usize> {
    let masks = counter_masks(kb.clauses(), &[], &unit_literals(query));
    min_cover(&masks, kb.len())
}

/// The part of `kb_a` that may be added, and the fixed context, for a human
/// KB already reduced by preprocessing.
pub fn update_split(problem: &ReconcileProblem, reduced_kb_h: &CnfFormula) -> (Vec<Clause>, Vec<Clause>) {
    let universe: Vec<Clause> = problem
        .kb_a
        .clauses()
        .iter()
        .filter(|c| !reduced_kb_h.contains(c))
        .cloned()
        .collect();
    let context: Vec<Clause> = match problem.mode {
        Mode::General => reduced_kb_h.clauses().to_vec(),
        Mode::Restricted => problem
            .kb_a
            .clauses()
            .iter()
            .filter(|c| reduced_kb_h.contains(c))
            .cloned()
            .collect(),
    };
    (universe, context)
}

/// Smallest update by truth table.
pub fn truth_table_min_update(problem: &ReconcileProblem, reduced_kb_h: &CnfFormula) -> Option<usize> {
    let (universe, context) = update_split(problem, reduced_kb_h);
    let masks = counter_masks(&universe, &context, &unit_literals(&problem.query));
    min_cover(&masks, universe.len())
}

/// Smallest update by subset search with SAT entailment tests; for
/// instances whose truth tables are too large.
pub fn subset_search_min_update(problem: &ReconcileProblem, reduced_kb_h: &CnfFormula) -> Option<usize> {
    let (universe, context) = update_split(problem, reduced_kb_h);
    let neg = Clause::new(unit_literals(&problem.query).into_iter().map(|l| !l));
    let n = universe.len();
    (0..=n).find(|&k| {
        subsets_of_size(n, k).any(|s| {
            let picked = (0..n).filter(|i| s >> i & 1 == 1).map(|i| &universe[i]);
            !is_satisfiable(context.iter().chain(picked).chain([&neg]))
        })
    })
}

/// Satisfiability of `clauses[mask]` by truth table.
pub fn subset_satisfiable(bits: &[Bits], n: u32, mask: u64) -> bool {
    assignments(n).any(|a| (0..bits.len()).filter(|i| mask >> i & 1 == 1).all(|i| bits[i].sat(a)))
}

/// All MUSes and all MCSes of an unsatisfiable formula, as bitmasks, by
/// scanning every subset.
pub fn truth_table_muses_mcses(f: &CnfFormula) -> (BTreeSet<u64>, BTreeSet<u64>) {
    let m = f.len();
    assert!(m <= 16);
    let n = num_vars(f.clauses());
    let bits: Vec<Bits> = f.clauses().iter().map(Bits::of).collect();
    let full = (1u64 << m) - 1;
    let sat: Vec<bool> = (0..=full).map(|s| subset_satisfiable(&bits, n, s)).collect();
    let mut muses = BTreeSet::new();
    let mut mcses = BTreeSet::new();
    for s in 0..=full {
        let drop_one = |s: u64| (0..m).filter(move |i| s >> i & 1 == 1).map(move |i| s & !(1 << i));
        if !sat[s as usize] && drop_one(s).all(|t| sat[t as usize]) {
            muses.insert(s);
        }
        // complement satisfiable, and restoring any member breaks it
        if sat[(full & !s) as usize] && (0..m).filter(|i| s >> i & 1 == 1).all(|i| !sat[(full & !s | 1 << i) as usize]) {
            mcses.insert(s);
        }
    }
    (muses, mcses)
}

/// Inclusion-minimal hitting sets of `sets` over `0..m`.
pub fn minimal_hitting_sets(sets: &BTreeSet<u64>, m: usize) -> BTreeSet<u64> {
    let hits = |h: u64| sets.iter().all(|&s| s & h != 0);
    (0u64..1 << m)
        .filter(|&h| hits(h) && (0..m).filter(|i| h >> i & 1 == 1).all(|i| !hits(h & !(1 << i))))
        .collect()
}

/// Literals true in every model, by enumeration; `None` if unsatisfiable.
pub fn enumerated_backbone(f: &CnfFormula) -> Option<Vec<Literal>> {
    let n = f.num_vars().max(num_vars(f.clauses()));
    let bits: Vec<Bits> = f.clauses().iter().map(Bits::of).collect();
    let mut always_true = u32::MAX;
    let mut always_false = u32::MAX;
    let mut any = false;
    for a in assignments(n) {
        if bits.iter().all(|b| b.sat(a)) {
            any = true;
            always_true &= a;
            always_false &= !a;
        }
    }
    any.then(|| {
        (1..=n)
            .filter_map(|v| {
                let bit = 1u32 << (v - 1);
                if always_true & bit != 0 {
                    Some(Literal::pos(v))
                } else if always_false & bit != 0 {
                    Some(Literal::neg(v))
                } else {
                    None
                }
            })
            .collect()
    })
}

pub fn mask_of(ids: impl IntoIterator<Item = usize>) -> u64 {
    ids.into_iter().fold(0, |m, i| m | 1 << i)
}
