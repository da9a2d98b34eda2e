//! Backbone literals: those true in every model of a satisfiable KB.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::{CnfFormula, Literal};
use crate::sat::{SatSession, SolveResult};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BackboneError {
    #[error("the knowledge base is unsatisfiable")]
    Unsatisfiable,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BackboneSet {
    /// Sorted by variable; at most one polarity per variable.
    pub literals: Vec<Literal>,
    pub oracle_calls: u64,
}

impl BackboneSet {
    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.literals.binary_search(&lit).is_ok()
    }
}

/// Exact backbone by model refinement: candidates start as the literals of
/// one model; each surviving candidate is tested by assuming its negation,
/// and every model found along the way filters the rest.
pub fn compute_backbone(kb: &CnfFormula) -> Result<BackboneSet, BackboneError> {
    let mut session = SatSession::new(kb.num_vars());
    for c in kb.clauses() {
        session.add_hard(c);
    }
    let SolveResult::Sat(first) = session.solve(&[]) else {
        return Err(BackboneError::Unsatisfiable);
    };
    let n = kb.num_vars() as usize;
    let mut occurs = vec![false; n + 1];
    for c in kb.clauses() {
        for l in c.lits() {
            occurs[l.var() as usize] = true;
        }
    }
    // candidate[v] = Some(polarity) while v may still be in the backbone
    let mut candidate: Vec<Option<bool>> = (0..=n)
        .map(|v| (v > 0 && occurs[v]).then(|| first.value(v as u32)))
        .collect();
    let mut literals = Vec::new();
    for v in 1..=n {
        let Some(pol) = candidate[v] else { continue };
        let lit = Literal::new(v as u32, pol);
        match session.solve(&[!lit]) {
            SolveResult::Unsat(_) => literals.push(lit),
            SolveResult::Sat(m) => {
                for (w, slot) in candidate.iter_mut().enumerate().skip(v) {
                    if slot.is_some_and(|p| m.value(w as u32) != p) {
                        *slot = None;
                    }
                }
            }
        }
    }
    Ok(BackboneSet {
        literals,
        oracle_calls: session.calls(),
    })
}

/// `k` backbone literals chosen with a seeded RNG, sorted by variable.
/// `k = 0` or `k ≥ len` returns the whole backbone.
pub fn sample_backbone(backbone: &BackboneSet, k: usize, seed: u64) -> Vec<Literal> {
    if k == 0 || k >= backbone.len() {
        return backbone.literals.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<Literal> = backbone
        .literals
        .choose_multiple(&mut rng, k)
        .copied()
        .collect();
    picked.sort();
    picked
}
