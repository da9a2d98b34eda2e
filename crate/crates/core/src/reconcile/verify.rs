use std::fmt;

use crate::formula::{max_var, negate_query, Clause, CnfFormula, NegationError};
use crate::sat::is_satisfiable;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    /// `KB_h′ ∧ ε ∧ ¬φ` is unsatisfiable.
    pub entailment: bool,
    /// Dropping any one clause of `ε` loses the entailment of `φ`.
    pub minimality: bool,
    /// `KB_h′ ∧ ε` is satisfiable.
    pub consistency: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.entailment && self.minimality && self.consistency
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "entailment={} minimality={} consistency={}",
            self.entailment, self.minimality, self.consistency
        )
    }
}

/// Check an explanation against the (preprocessed) human KB.
pub fn verify_explanation(
    kb_h: &CnfFormula,
    support: &[Clause],
    query: &CnfFormula,
) -> Result<VerificationReport, NegationError> {
    let next = kb_h
        .num_vars()
        .max(query.num_vars())
        .max(max_var(kb_h.clauses().iter().chain(support).chain(query.clauses())))
        + 1;
    let neg = negate_query(query, next)?;
    let entailment = !is_satisfiable(kb_h.clauses().iter().chain(support).chain(&neg.clauses));
    let minimality = (0..support.len()).all(|drop| {
        let rest = support
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != drop)
            .map(|(_, c)| c);
        is_satisfiable(rest.chain(&neg.clauses))
    });
    let consistency = is_satisfiable(kb_h.clauses().iter().chain(support));
    Ok(VerificationReport {
        entailment,
        minimality,
        consistency,
    })
}
