//! Assumption-based incremental satisfiability sessions.
//!
//! A [`SatSession`] holds hard clauses, which are always active, and soft
//! clauses, each guarded by its own selector variable. Assuming a selector
//! activates its clause; leaving it unassumed switches the clause off. The
//! decision procedure sits behind the [`Backend`] trait; [`CdclSolver`] is
//! the bundled implementation.

mod cdcl;

pub use cdcl::{CdclSolver, CdclStats};

use crate::formula::{Clause, Literal};

/// Raw answer from a [`Backend`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackendResult {
    Sat,
    /// Subset of the assumptions sufficient for unsatisfiability.
    Unsat(Vec<Literal>),
}

/// A complete incremental SAT procedure.
pub trait Backend {
    /// Make variables `1..=n` known to the solver.
    fn ensure_vars(&mut self, n: u32);
    fn num_vars(&self) -> u32;
    /// Returns `false` once the clause database is unsatisfiable at level 0.
    fn add_clause(&mut self, lits: &[Literal]) -> bool;
    fn solve(&mut self, assumptions: &[Literal]) -> BackendResult;
    /// Assignment from the last satisfiable call, indexed by `var - 1`.
    fn model(&self) -> &[bool];
}

/// Selector guarding one soft clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Selector(u32);

impl Selector {
    pub fn var(self) -> u32 {
        self.0
    }

    /// The assumption literal that activates the clause.
    pub fn lit(self) -> Literal {
        Literal::pos(self.0)
    }
}

/// Total assignment; index 0 is unused so `values[v]` is variable `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn value(&self, var: u32) -> bool {
        self.values.get(var as usize).copied().unwrap_or(false)
    }

    pub fn lit_value(&self, lit: Literal) -> bool {
        lit.eval(self.value(lit.var()))
    }

    pub fn satisfies(&self, clause: &Clause) -> bool {
        clause.is_satisfied_by(&self.values)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.values
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Model),
    /// The assumed literals named here, together with the hard clauses,
    /// are unsatisfiable. Not necessarily minimal.
    Unsat(Vec<Literal>),
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            SolveResult::Sat(m) => Some(m),
            SolveResult::Unsat(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarKind {
    Problem,
    Selector(usize),
}

/// Incremental session over one backend.
pub struct SatSession<B: Backend = CdclSolver> {
    backend: B,
    kinds: Vec<VarKind>,
    hard: Vec<Clause>,
    soft: Vec<(Selector, Clause)>,
    calls: u64,
}

impl SatSession<CdclSolver> {
    pub fn new(num_vars: u32) -> Self {
        Self::with_backend(CdclSolver::new(), num_vars)
    }
}

impl<B: Backend> SatSession<B> {
    pub fn with_backend(mut backend: B, num_vars: u32) -> Self {
        backend.ensure_vars(num_vars);
        SatSession {
            backend,
            kinds: vec![VarKind::Problem; num_vars as usize + 1],
            hard: Vec::new(),
            soft: Vec::new(),
            calls: 0,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.kinds.len() as u32 - 1
    }

    /// Allocate a fresh problem variable.
    pub fn new_var(&mut self) -> u32 {
        self.kinds.push(VarKind::Problem);
        let v = self.num_vars();
        self.backend.ensure_vars(v);
        v
    }

    fn register(&mut self, clause: &Clause) {
        let max = clause.max_var();
        if max > self.num_vars() {
            self.kinds.resize(max as usize + 1, VarKind::Problem);
            self.backend.ensure_vars(max);
        }
        debug_assert!(
            clause
                .lits()
                .iter()
                .all(|l| self.kinds[l.var() as usize] == VarKind::Problem),
            "clause mentions a selector variable"
        );
    }

    pub fn add_hard(&mut self, clause: &Clause) {
        self.register(clause);
        self.backend.add_clause(clause.lits());
        self.hard.push(clause.clone());
    }

    /// Register a soft clause; it is active only while its selector is assumed.
    pub fn add_soft(&mut self, clause: &Clause) -> Selector {
        self.register(clause);
        self.kinds.push(VarKind::Selector(self.soft.len()));
        let sel = Selector(self.num_vars());
        self.backend.ensure_vars(sel.0);
        let mut lits = clause.lits().to_vec();
        lits.push(!sel.lit());
        self.backend.add_clause(&lits);
        self.soft.push((sel, clause.clone()));
        sel
    }

    pub fn soft_clause(&self, sel: Selector) -> Option<&Clause> {
        match self.kinds.get(sel.0 as usize) {
            Some(VarKind::Selector(i)) => Some(&self.soft[*i].1),
            _ => None,
        }
    }

    /// Number of `solve` calls made on this session.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn solve(&mut self, assumptions: &[Literal]) -> SolveResult {
        self.calls += 1;
        for l in assumptions {
            if l.var() > self.num_vars() {
                self.kinds.resize(l.var() as usize + 1, VarKind::Problem);
                self.backend.ensure_vars(l.var());
            }
        }
        match self.backend.solve(assumptions) {
            BackendResult::Sat => {
                let mut values = Vec::with_capacity(self.kinds.len());
                values.push(false);
                values.extend_from_slice(self.backend.model());
                values.resize(self.kinds.len(), false);
                let model = Model { values };
                debug_assert!(self.model_is_sound(&model, assumptions));
                SolveResult::Sat(model)
            }
            BackendResult::Unsat(core) => {
                debug_assert!(core.iter().all(|l| assumptions.contains(l)));
                SolveResult::Unsat(core)
            }
        }
    }

    pub fn solve_selectors(&mut self, selectors: &[Selector]) -> SolveResult {
        let lits: Vec<Literal> = selectors.iter().map(|s| s.lit()).collect();
        self.solve(&lits)
    }

    /// Every hard clause, every activated soft clause and every assumption
    /// hold under `model`.
    pub fn model_is_sound(&self, model: &Model, assumptions: &[Literal]) -> bool {
        self.hard.iter().all(|c| model.satisfies(c))
            && assumptions.iter().all(|&l| model.lit_value(l))
            && self
                .soft
                .iter()
                .filter(|(s, _)| model.value(s.0))
                .all(|(_, c)| model.satisfies(c))
    }
}

/// One-shot satisfiability check of a clause collection.
pub fn is_satisfiable<'a>(clauses: impl IntoIterator<Item = &'a Clause>) -> bool {
    let mut s = SatSession::new(0);
    for c in clauses {
        s.add_hard(c);
    }
    s.solve(&[]).is_sat()
}
