//! Scenarios 9 to 12: derive a human KB from a CNF by removing a fraction
//! `p` of its clauses and trimming literals from as many survivors.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::{Clause, CnfFormula};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfTweakError {
    #[error("CNF scenarios are 9 to 12, got {0}")]
    InvalidScenario(u8),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CnfEdit {
    /// Clause ordinal (0-based, in input order) and the clause.
    Removed { ordinal: usize, clause: Clause },
    Trimmed { ordinal: usize, before: Clause, after: Clause },
    /// Unit clauses are never trimmed, so trimming cannot empty a clause.
    SkippedUnit { ordinal: usize },
}

impl fmt::Display for CnfEdit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CnfEdit::Removed { ordinal, clause } => write!(f, "removed {ordinal}: {clause}"),
            CnfEdit::Trimmed { ordinal, before, after } => {
                write!(f, "trimmed {ordinal}: {before} -> {after}")
            }
            CnfEdit::SkippedUnit { ordinal } => write!(f, "skip {ordinal}: unit"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfTweakLog {
    pub scenario: u8,
    pub seed: u64,
    pub edits: Vec<CnfEdit>,
}

impl CnfTweakLog {
    pub fn removed(&self) -> usize {
        self.edits.iter().filter(|e| matches!(e, CnfEdit::Removed { .. })).count()
    }

    /// Clauses picked for trimming, including skipped units.
    pub fn picked_for_trim(&self) -> usize {
        self.edits.len() - self.removed()
    }
}

impl fmt::Display for CnfTweakLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {} seed {}", self.scenario, self.seed)?;
        for e in &self.edits {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

/// `⌈tenths · m / 10⌉` without floating point.
fn ceil_tenths(tenths: usize, m: usize) -> usize {
    (tenths * m).div_ceil(10)
}

pub fn tweak_cnf(kb: &CnfFormula, scenario: u8, seed: u64) -> Result<(CnfFormula, CnfTweakLog), CnfTweakError> {
    if !(9..=12).contains(&scenario) {
        return Err(CnfTweakError::InvalidScenario(scenario));
    }
    let tenths = (scenario - 8) as usize;
    let m = kb.len();
    let k = ceil_tenths(tenths, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ordinals: Vec<usize> = (0..m).collect();
    let mut removed: Vec<usize> = ordinals.choose_multiple(&mut rng, k).copied().collect();
    removed.sort_unstable();
    let survivors: Vec<usize> = ordinals.iter().copied().filter(|i| removed.binary_search(i).is_err()).collect();
    let mut trim: Vec<usize> = survivors.choose_multiple(&mut rng, k).copied().collect();
    trim.sort_unstable();

    let mut edits: Vec<CnfEdit> = removed
        .iter()
        .map(|&i| CnfEdit::Removed {
            ordinal: i,
            clause: kb.clauses()[i].clone(),
        })
        .collect();
    let mut out = CnfFormula::new(kb.num_vars());
    for &i in &survivors {
        let clause = &kb.clauses()[i];
        if trim.binary_search(&i).is_err() {
            out.push(clause.clone());
            continue;
        }
        if clause.len() <= 1 {
            edits.push(CnfEdit::SkippedUnit { ordinal: i });
            out.push(clause.clone());
            continue;
        }
        let drop = clause.len().div_ceil(5);
        let gone: Vec<_> = clause.lits().choose_multiple(&mut rng, drop).copied().collect();
        let after = Clause::new(clause.lits().iter().copied().filter(|l| !gone.contains(l)));
        edits.push(CnfEdit::Trimmed {
            ordinal: i,
            before: clause.clone(),
            after: after.clone(),
        });
        out.push(after);
    }
    Ok((out, CnfTweakLog { scenario, seed, edits }))
}
