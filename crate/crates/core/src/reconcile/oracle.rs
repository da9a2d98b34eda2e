//! Exhaustive reference answers for small instances.

use crate::formula::{intersect_kbs, max_var, negate_query, Clause, CnfFormula};
use crate::sat::{is_satisfiable, SatSession, Selector};

use super::{preprocess_consistency, Mode, ReconcileError, ReconcileProblem};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForceResult {
    pub size: usize,
    pub witness: Vec<Clause>,
}

/// Visit every `k`-subset of `0..n` in lexicographic order until `f` says stop.
fn first_combination(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
    if k > n {
        return None;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx) {
            return Some(idx);
        }
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Smallest `U ⊆ universe` with `context ∧ U` unsatisfiable.
fn smallest_unsat_subset(
    universe: &[Clause],
    context: &[Clause],
) -> Option<Vec<usize>> {
    let mut s = SatSession::new(max_var(universe.iter().chain(context)));
    for c in context {
        s.add_hard(c);
    }
    let sels: Vec<Selector> = universe.iter().map(|c| s.add_soft(c)).collect();
    (0..=universe.len()).find_map(|k| {
        first_combination(universe.len(), k, |idx| {
            let assume: Vec<Selector> = idx.iter().map(|&i| sels[i]).collect();
            !s.solve_selectors(&assume).is_sat()
        })
    })
}

/// Minimum update size by enumerating subsets of the agent's clauses outside
/// the human KB in increasing size, after the same preprocessing as
/// [`super::reconcile`].
pub fn brute_force_min_update(
    problem: &ReconcileProblem,
    cap: usize,
) -> Result<BruteForceResult, ReconcileError> {
    let neg = problem.negation()?;
    let (kb_h, _) = preprocess_consistency(&problem.kb_a, &problem.kb_h)?;
    let part = intersect_kbs(&problem.kb_a, &kb_h);
    if part.soft.len() > cap {
        return Err(ReconcileError::CapExceeded {
            size: part.soft.len(),
            cap,
        });
    }
    let universe: Vec<Clause> = part.soft.iter().map(|&id| problem.kb_a.clause(id).clone()).collect();
    let mut context: Vec<Clause> = match problem.mode {
        Mode::General => kb_h.clauses().to_vec(),
        Mode::Restricted => part.hard.iter().map(|&id| problem.kb_a.clause(id).clone()).collect(),
    };
    context.extend(neg.clauses.iter().cloned());
    let idx = smallest_unsat_subset(&universe, &context).ok_or(ReconcileError::NoUpdate)?;
    Ok(BruteForceResult {
        size: idx.len(),
        witness: idx.iter().map(|&i| universe[i].clone()).collect(),
    })
}

/// Minimum-cardinality support of `query` within `kb` by enumeration.
pub fn brute_force_smallest_support(
    kb: &CnfFormula,
    query: &CnfFormula,
    cap: usize,
) -> Result<BruteForceResult, ReconcileError> {
    if kb.len() > cap {
        return Err(ReconcileError::CapExceeded { size: kb.len(), cap });
    }
    let next = kb.num_vars().max(query.num_vars()).max(max_var(kb.clauses())).max(max_var(query.clauses())) + 1;
    let neg = negate_query(query, next)?;
    if is_satisfiable(kb.clauses().iter().chain(&neg.clauses)) {
        return Err(ReconcileError::NotEntailed);
    }
    let idx = smallest_unsat_subset(kb.clauses(), &neg.clauses).ok_or(ReconcileError::NotEntailed)?;
    Ok(BruteForceResult {
        size: idx.len(),
        witness: idx.iter().map(|&i| kb.clauses()[i].clone()).collect(),
    })
}
