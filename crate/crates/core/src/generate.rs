//! Seeded random instances for tests, benchmarks and examples.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::backbone::compute_backbone;
use crate::formula::{Clause, CnfFormula, Literal};
use crate::reconcile::ReconcileProblem;
use crate::sat::is_satisfiable;

/// A clause of `len` literals over distinct variables in `1..=num_vars`.
pub fn random_clause<R: Rng>(rng: &mut R, num_vars: u32, len: usize) -> Clause {
    let vars: Vec<u32> = (1..=num_vars).collect();
    Clause::new(
        vars.choose_multiple(rng, len.min(num_vars as usize))
            .map(|&v| Literal::new(v, rng.gen_bool(0.5))),
    )
}

/// `num_clauses` pushes of random clauses with lengths in `1..=max_len`.
/// Duplicates merge, so the result may be shorter.
pub fn random_cnf<R: Rng>(rng: &mut R, num_vars: u32, num_clauses: usize, max_len: usize) -> CnfFormula {
    let mut f = CnfFormula::new(num_vars);
    for _ in 0..num_clauses {
        let len = rng.gen_range(1..=max_len);
        f.push(random_clause(rng, num_vars, len));
    }
    f
}

#[derive(Clone, Copy, Debug)]
pub struct InstanceShape {
    pub max_vars: u32,
    /// Upper bound on `|kb_a \ kb_h|`.
    pub max_agent_only: usize,
    pub max_shared: usize,
    pub max_human_only: usize,
}

impl Default for InstanceShape {
    fn default() -> Self {
        InstanceShape {
            max_vars: 10,
            max_agent_only: 12,
            max_shared: 4,
            max_human_only: 3,
        }
    }
}

/// A reconciliation instance where `kb_a` is consistent, entails the query
/// (one or two backbone literals of `kb_a`), and `kb_h` does not.
/// Human-only clauses may contradict the agent.
pub fn random_reconcile_instance<R: Rng>(rng: &mut R, shape: InstanceShape) -> ReconcileProblem {
    loop {
        let n = rng.gen_range(3..=shape.max_vars.max(3));
        let sizes = [
            rng.gen_range(0..=shape.max_shared),
            rng.gen_range(1..=shape.max_agent_only),
            rng.gen_range(0..=shape.max_human_only),
        ];
        let shared = random_cnf(rng, n, sizes[0], 3);
        let agent_only = random_cnf(rng, n, sizes[1], 3);
        let human_only = random_cnf(rng, n, sizes[2], 3);

        let mut kb_a = shared.clone();
        for c in agent_only.clauses() {
            kb_a.push(c.clone());
        }
        let mut kb_h = shared;
        for c in human_only.clauses() {
            kb_h.push(c.clone());
        }
        let agent_extra = kb_a.clauses().iter().filter(|c| !kb_h.contains(c)).count();
        if agent_extra == 0 || agent_extra > shape.max_agent_only {
            continue;
        }
        let Ok(bb) = compute_backbone(&kb_a) else { continue };
        if bb.is_empty() {
            continue;
        }
        let k = rng.gen_range(1..=bb.len().min(2));
        let mut query = CnfFormula::new(n);
        for l in bb.literals.choose_multiple(rng, k) {
            query.push(Clause::unit(*l));
        }
        let neg = negated_units(&query);
        if is_satisfiable(kb_h.clauses().iter().chain([&neg])) {
            return ReconcileProblem::new(kb_a, kb_h, query);
        }
    }
}

/// The single clause `¬φ` for a query of unit clauses.
fn negated_units(query: &CnfFormula) -> Clause {
    Clause::new(query.clauses().iter().map(|c| !c.lits()[0]))
}

/// An unsatisfiable formula of at most `max_clauses` clauses over at most
/// `max_vars` variables.
pub fn random_unsat_formula<R: Rng>(rng: &mut R, max_vars: u32, max_clauses: usize) -> CnfFormula {
    loop {
        let n = rng.gen_range(2..=max_vars.max(2));
        let mut f = CnfFormula::new(n);
        while f.len() < max_clauses {
            let len = rng.gen_range(1..=3);
            f.push(random_clause(rng, n, len));
            if !is_satisfiable(f.clauses()) {
                return f;
            }
        }
    }
}

/// A random formula satisfied by a hidden random assignment: `num_clauses`
/// draws (before deduplication) with lengths in `lens`, each redrawn until
/// the hidden assignment satisfies it.
pub fn random_satisfiable_cnf<R: Rng>(
    rng: &mut R,
    num_vars: u32,
    num_clauses: usize,
    lens: RangeInclusive<usize>,
) -> CnfFormula {
    let hidden: Vec<bool> = (0..=num_vars).map(|_| rng.gen_bool(0.5)).collect();
    let mut f = CnfFormula::new(num_vars);
    for _ in 0..num_clauses {
        let len = rng.gen_range(lens.clone());
        loop {
            let c = random_clause(rng, num_vars, len);
            if c.lits().iter().any(|l| l.is_positive() == hidden[l.var() as usize]) {
                f.push(c);
                break;
            }
        }
    }
    f
}

#[derive(Clone, Copy, Debug)]
pub struct PlantedShape {
    pub num_vars: u32,
    pub num_clauses: usize,
    /// Implication chains, each rooted in a unit clause.
    pub chains: usize,
    pub chain_len: usize,
}

impl Default for PlantedShape {
    fn default() -> Self {
        PlantedShape {
            num_vars: 300,
            num_clauses: 1000,
            chains: 10,
            chain_len: 8,
        }
    }
}

/// A satisfiable 3-CNF with a hidden model and a guaranteed backbone made
/// of unit-rooted implication chains. Random filler clauses are satisfied by
/// the hidden model.
pub fn planted_kb<R: Rng>(rng: &mut R, shape: PlantedShape) -> CnfFormula {
    let n = shape.num_vars;
    let hidden: Vec<bool> = (0..=n).map(|_| rng.gen_bool(0.5)).collect();
    let lit = |v: u32| Literal::new(v, hidden[v as usize]);
    let mut vars: Vec<u32> = (1..=n).collect();
    vars.shuffle(rng);
    let mut f = CnfFormula::new(n);
    let mut used = 0;
    for _ in 0..shape.chains {
        let chain: Vec<u32> = vars.iter().skip(used).take(shape.chain_len).copied().collect();
        used += chain.len();
        let Some(&root) = chain.first() else { break };
        f.push(Clause::unit(lit(root)));
        for w in chain.windows(2) {
            f.push(Clause::new([!lit(w[0]), lit(w[1])]));
        }
    }
    while f.len() < shape.num_clauses {
        let c = random_clause(rng, n, 3);
        let ok = c.lits().iter().any(|l| l.is_positive() == hidden[l.var() as usize]);
        if ok {
            f.push(c);
        }
    }
    f
}
