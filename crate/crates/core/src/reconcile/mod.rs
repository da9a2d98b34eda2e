//! Smallest supports and model reconciliation.
//!
//! [`smallest_support`] finds a minimum-cardinality subset of one KB that
//! entails a query. [`reconcile`] finds a support for the agent's claim in
//! the human's KB whose part outside that KB is as small as possible. Both
//! alternate a minimum hitting set over the correction sets found so far
//! with one satisfiability test of the clauses it selects.

mod oracle;
mod record;
mod verify;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use log::debug;
use thiserror::Error;

use crate::formula::{
    intersect_kbs, max_var, negate_query, Clause, ClauseId, CnfFormula, NegationError,
    QueryNegation,
};
use crate::hitting_set::HittingSetInstance;
use crate::minimal::{extract_mus_counted, ClauseIndexSet, McsExtractor, MinimalSetError};
use crate::sat::{is_satisfiable, SolveResult};

pub use oracle::{
    brute_force_min_update, brute_force_smallest_support, BruteForceResult, DEFAULT_BRUTE_FORCE_CAP,
};
pub use record::{
    parse_explanation_records, strip_timing, write_records, write_text, ParsedExplanation,
    RecordError, RECORD_FORMAT,
};
pub use verify::{verify_explanation, VerificationReport};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    #[default]
    General,
    /// Supports are drawn from the agent's clauses only; the human's own
    /// clauses outside the shared part are never used as context.
    Restricted,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::General => "general",
            Mode::Restricted => "restricted",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "general" => Ok(Mode::General),
            "restricted" => Ok(Mode::Restricted),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReconcileProblem {
    pub kb_a: CnfFormula,
    pub kb_h: CnfFormula,
    pub query: CnfFormula,
    pub mode: Mode,
}

impl ReconcileProblem {
    pub fn new(kb_a: CnfFormula, kb_h: CnfFormula, query: CnfFormula) -> Self {
        ReconcileProblem {
            kb_a,
            kb_h,
            query,
            mode: Mode::General,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    fn negation(&self) -> Result<QueryNegation, ReconcileError> {
        let next = [
            self.kb_a.num_vars(),
            self.kb_h.num_vars(),
            self.query.num_vars(),
            max_var(self.kb_a.clauses()),
            max_var(self.kb_h.clauses()),
            max_var(self.query.clauses()),
        ]
        .into_iter()
        .max()
        .unwrap()
            + 1;
        Ok(negate_query(&self.query, next)?)
    }
}

/// Shared flag for stopping a run between iterations.
#[derive(Clone, Debug, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ReconcileConfig {
    pub time_limit: Option<Duration>,
    pub cancel: Option<CancelToken>,
    /// Record one [`IterationRecord`] per loop iteration.
    pub trace: bool,
}

impl ReconcileConfig {
    pub fn with_time_limit(limit: Duration) -> Self {
        ReconcileConfig {
            time_limit: Some(limit),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub iterations: usize,
    pub mcs_count: usize,
    pub oracle_calls: u64,
    pub elapsed: Duration,
    /// Seed cardinality per iteration.
    pub seed_sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationRecord {
    /// Agent clause ids selected by the hitting set.
    pub seed: Vec<ClauseId>,
    pub entailed: bool,
    /// Correction set added when the seed did not suffice.
    pub mcs: Option<Vec<ClauseId>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    pub mode: Mode,
    pub support: Vec<Clause>,
    pub update: Vec<Clause>,
    pub removed_from_kb_h: Vec<Clause>,
    pub stats: Stats,
    pub trace: Vec<IterationRecord>,
}

impl Explanation {
    /// The human KB after preprocessing.
    pub fn reduced_kb_h(&self, kb_h: &CnfFormula) -> CnfFormula {
        kb_h.without(&self.removed_from_kb_h)
    }
}

#[derive(Debug, Error)]
pub enum ReconcileError {
    #[error("the agent knowledge base is unsatisfiable")]
    AgentInconsistent,
    #[error("the knowledge base does not entail the query")]
    NotEntailed,
    #[error("invalid query: {0}")]
    Query(#[from] NegationError),
    #[error("restricted-mode support is inconsistent with the reduced human knowledge base")]
    RestrictedInconsistent { explanation: Box<Explanation> },
    #[error("time limit reached after {} iterations", stats.iterations)]
    TimedOut { stats: Stats },
    #[error("cancelled after {} iterations", stats.iterations)]
    Cancelled { stats: Stats },
    #[error("minimal set extraction failed: {0}")]
    Internal(#[from] MinimalSetError),
    #[error("brute-force universe of {size} clauses exceeds the cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("no update makes the human knowledge base entail the query")]
    NoUpdate,
}

impl ReconcileError {
    /// A defining premise of the problem does not hold.
    pub fn is_premise_violation(&self) -> bool {
        matches!(
            self,
            ReconcileError::AgentInconsistent
                | ReconcileError::NotEntailed
                | ReconcileError::NoUpdate
                | ReconcileError::RestrictedInconsistent { .. }
        )
    }
}

/// Remove from `kb_h` a correction set of its own clauses so that it becomes
/// consistent with `kb_a`. Returns the reduced KB and the removed clauses.
pub fn preprocess_consistency(
    kb_a: &CnfFormula,
    kb_h: &CnfFormula,
) -> Result<(CnfFormula, Vec<Clause>), ReconcileError> {
    preprocess_counted(kb_a, kb_h).map(|(kb, removed, _)| (kb, removed))
}

fn preprocess_counted(
    kb_a: &CnfFormula,
    kb_h: &CnfFormula,
) -> Result<(CnfFormula, Vec<Clause>, u64), ReconcileError> {
    if !is_satisfiable(kb_a.clauses()) {
        return Err(ReconcileError::AgentInconsistent);
    }
    if is_satisfiable(kb_a.clauses().iter().chain(kb_h.clauses())) {
        return Ok((kb_h.clone(), Vec::new(), 2));
    }
    let soft: Vec<Clause> = kb_h
        .clauses()
        .iter()
        .filter(|c| !kb_a.contains(c))
        .cloned()
        .collect();
    let mut ex = McsExtractor::new(&soft, kb_a.clauses());
    let mcs = ex.extract(&ClauseIndexSet::empty())?;
    let removed: Vec<Clause> = mcs.ids.iter().map(|i| soft[i].clone()).collect();
    debug!("preprocessing removed {} human clauses", removed.len());
    Ok((kb_h.without(&removed), removed, 2 + ex.oracle_calls()))
}

struct Deadline {
    start: Instant,
    limit: Option<Duration>,
    cancel: Option<CancelToken>,
}

impl Deadline {
    fn check(&self, stats: &mut Stats) -> Result<(), ReconcileError> {
        stats.elapsed = self.start.elapsed();
        if self.cancel.as_ref().is_some_and(CancelToken::is_cancelled) {
            return Err(ReconcileError::Cancelled {
                stats: stats.clone(),
            });
        }
        if self.limit.is_some_and(|l| stats.elapsed >= l) {
            return Err(ReconcileError::TimedOut {
                stats: stats.clone(),
            });
        }
        Ok(())
    }
}

/// Minimum-cardinality subset of `kb` entailing `query`.
pub fn smallest_support(kb: &CnfFormula, query: &CnfFormula) -> Result<Explanation, ReconcileError> {
    let start = Instant::now();
    let next = kb.num_vars().max(query.num_vars()).max(max_var(kb.clauses())).max(max_var(query.clauses())) + 1;
    let neg = negate_query(query, next)?;
    let mut stats = Stats::default();
    let mut trace = Vec::new();
    let soft = kb.clauses();
    if is_satisfiable(soft.iter().chain(&neg.clauses)) {
        return Err(ReconcileError::NotEntailed);
    }
    let mut ex = McsExtractor::new(soft, &neg.clauses);
    let mut hs = HittingSetInstance::with_universe(soft.len());
    loop {
        let seed = hs.min_hitting_set();
        stats.iterations += 1;
        stats.seed_sizes.push(seed.len());
        let seed_ids: Vec<ClauseId> = seed.iter().map(ClauseId).collect();
        match ex.check(&seed)? {
            SolveResult::Unsat(_) => {
                trace.push(IterationRecord {
                    seed: seed_ids,
                    entailed: true,
                    mcs: None,
                });
                let support: Vec<Clause> = seed.iter().map(|i| soft[i].clone()).collect();
                stats.oracle_calls = ex.oracle_calls() + 1;
                stats.elapsed = start.elapsed();
                return Ok(Explanation {
                    mode: Mode::General,
                    update: support.clone(),
                    support,
                    removed_from_kb_h: Vec::new(),
                    stats,
                    trace,
                });
            }
            SolveResult::Sat(model) => {
                let mcs = ex.extract_from_model(&seed, model)?.ids;
                trace.push(IterationRecord {
                    seed: seed_ids,
                    entailed: false,
                    mcs: Some(mcs.iter().map(ClauseId).collect()),
                });
                stats.mcs_count += 1;
                hs.add_set(mcs).expect("an MCS of an unsatisfiable formula is nonempty");
            }
        }
    }
}

/// Reconcile with default configuration.
pub fn reconcile(problem: &ReconcileProblem) -> Result<Explanation, ReconcileError> {
    reconcile_with(problem, &ReconcileConfig::default())
}

pub fn reconcile_with(
    problem: &ReconcileProblem,
    config: &ReconcileConfig,
) -> Result<Explanation, ReconcileError> {
    let deadline = Deadline {
        start: Instant::now(),
        limit: config.time_limit,
        cancel: config.cancel.clone(),
    };
    let mut stats = Stats::default();
    let neg = problem.negation()?;
    let kb_a = &problem.kb_a;
    let (kb_h, removed, pre_calls) = preprocess_counted(kb_a, &problem.kb_h)?;
    stats.oracle_calls += pre_calls + 1;
    if is_satisfiable(kb_a.clauses().iter().chain(&neg.clauses)) {
        return Err(ReconcileError::NotEntailed);
    }

    let part = intersect_kbs(kb_a, &kb_h);
    let soft: Vec<Clause> = part.soft.iter().map(|&id| kb_a.clause(id).clone()).collect();
    let context: Vec<Clause> = match problem.mode {
        Mode::General => kb_h.clauses().to_vec(),
        Mode::Restricted => part.hard.iter().map(|&id| kb_a.clause(id).clone()).collect(),
    };
    let mcs_hard: Vec<Clause> = context.iter().chain(&neg.clauses).cloned().collect();
    let mut ex = McsExtractor::new(&soft, &mcs_hard);
    let mut hs = HittingSetInstance::with_universe(soft.len());
    let mut trace = Vec::new();
    let to_ids = |s: &ClauseIndexSet| -> Vec<ClauseId> { s.iter().map(|i| part.soft[i]).collect() };

    loop {
        deadline.check(&mut stats)?;
        let seed = hs.min_hitting_set();
        stats.iterations += 1;
        stats.seed_sizes.push(seed.len());
        let result = ex.check(&seed)?;
        match result {
            SolveResult::Unsat(_) => {
                if config.trace {
                    trace.push(IterationRecord {
                        seed: to_ids(&seed),
                        entailed: true,
                        mcs: None,
                    });
                }
                let partial: Vec<Clause> = seed.iter().map(|i| soft[i].clone()).collect();
                let mus_hard: Vec<Clause> = partial.iter().chain(&neg.clauses).cloned().collect();
                let (mus, calls) = extract_mus_counted(&context, &mus_hard)?;
                let mut support = partial;
                support.extend(mus.ids.iter().map(|i| context[i].clone()));
                let update: Vec<Clause> =
                    support.iter().filter(|c| !kb_h.contains(c)).cloned().collect();
                stats.oracle_calls += ex.oracle_calls() + calls;
                stats.mcs_count = hs.len();
                stats.elapsed = deadline.start.elapsed();
                let explanation = Explanation {
                    mode: problem.mode,
                    support,
                    update,
                    removed_from_kb_h: removed,
                    stats,
                    trace,
                };
                if problem.mode == Mode::Restricted {
                    let ok = is_satisfiable(kb_h.clauses().iter().chain(&explanation.support));
                    if !ok {
                        return Err(ReconcileError::RestrictedInconsistent {
                            explanation: Box::new(explanation),
                        });
                    }
                }
                return Ok(explanation);
            }
            SolveResult::Sat(model) => {
                let mcs = ex.extract_from_model(&seed, model)?.ids;
                debug_assert!(!mcs.intersects(&seed));
                debug!("iteration {}: seed {} mcs {}", stats.iterations, seed, mcs);
                if config.trace {
                    trace.push(IterationRecord {
                        seed: to_ids(&seed),
                        entailed: false,
                        mcs: Some(to_ids(&mcs)),
                    });
                }
                hs.add_set(mcs).expect("an MCS of an unsatisfiable formula is nonempty");
                stats.mcs_count = hs.len();
                stats.oracle_calls = pre_calls + 1 + ex.oracle_calls();
            }
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn cnf(clauses: &[&[i32]]) -> CnfFormula {
        let n = clauses.iter().flat_map(|c| c.iter()).map(|l| l.unsigned_abs()).max().unwrap_or(0);
        CnfFormula::from_dimacs_clauses(n, clauses)
    }

    pub(crate) fn table_problem() -> ReconcileProblem {
        // a=1 b=2 c=3 d=4 f=6
        ReconcileProblem::new(
            cnf(&[&[1, 2], &[-2, 3], &[-3], &[-2, 4], &[-4]]),
            cnf(&[&[-3], &[6]]),
            cnf(&[&[1]]),
        )
    }

    fn clauses(cs: &[&[i32]]) -> Vec<Clause> {
        cs.iter().map(|c| Clause::from_dimacs(c)).collect()
    }

    fn sorted(mut v: Vec<Clause>) -> Vec<Clause> {
        v.sort();
        v
    }

    #[test]
    fn table_example() {
        let cfg = ReconcileConfig {
            trace: true,
            ..Default::default()
        };
        let e = reconcile_with(&table_problem(), &cfg).unwrap();
        assert_eq!(sorted(e.support.clone()), sorted(clauses(&[&[1, 2], &[-2, 3], &[-3]])));
        assert_eq!(sorted(e.update.clone()), sorted(clauses(&[&[1, 2], &[-2, 3]])));
        assert!(e.removed_from_kb_h.is_empty());
        assert_eq!(e.stats.iterations, 3);
        assert_eq!(e.stats.mcs_count, 2);
        assert_eq!(e.trace.len(), 3);
        assert_eq!(e.trace[0].seed, vec![]);
        assert!(e.trace[2].entailed);
        let mut ids = e.trace[2].seed.clone();
        ids.sort();
        assert_eq!(ids, vec![ClauseId(0), ClauseId(1)]);
    }

    #[test]
    fn human_already_entails() {
        let p = ReconcileProblem::new(cnf(&[&[1]]), cnf(&[&[1], &[2]]), cnf(&[&[1]]));
        let e = reconcile(&p).unwrap();
        assert!(e.update.is_empty());
        assert_eq!(e.support, clauses(&[&[1]]));
    }

    #[test]
    fn premise_errors() {
        let p = ReconcileProblem::new(cnf(&[&[1, 2]]), cnf(&[&[2]]), cnf(&[&[1]]));
        assert!(matches!(reconcile(&p), Err(ReconcileError::NotEntailed)));
        let p = ReconcileProblem::new(cnf(&[&[1], &[-1]]), cnf(&[&[2]]), cnf(&[&[1]]));
        assert!(matches!(reconcile(&p), Err(ReconcileError::AgentInconsistent)));
    }

    #[test]
    fn preprocessing_examples() {
        let (kb, removed) = preprocess_consistency(&cnf(&[&[1]]), &cnf(&[&[-1], &[2]])).unwrap();
        assert_eq!(removed, clauses(&[&[-1]]));
        assert_eq!(kb.clauses(), clauses(&[&[2]]).as_slice());

        let (kb, removed) =
            preprocess_consistency(&cnf(&[&[1], &[2]]), &cnf(&[&[-1], &[-2], &[3]])).unwrap();
        assert_eq!(removed, clauses(&[&[-1], &[-2]]));
        assert_eq!(kb.clauses(), clauses(&[&[3]]).as_slice());

        let p = table_problem();
        let (kb, removed) = preprocess_consistency(&p.kb_a, &p.kb_h).unwrap();
        assert!(removed.is_empty());
        assert_eq!(kb, p.kb_h);
    }

    #[test]
    fn reconcile_after_preprocessing() {
        // Human believes ¬a; agent knows a and a → b; claim b.
        let p = ReconcileProblem::new(cnf(&[&[1], &[-1, 2]]), cnf(&[&[-1], &[3]]), cnf(&[&[2]]));
        let e = reconcile(&p).unwrap();
        assert_eq!(e.removed_from_kb_h, clauses(&[&[-1]]));
        assert_eq!(sorted(e.update), sorted(clauses(&[&[1], &[-1, 2]])));
    }

    #[test]
    fn smallest_support_examples() {
        let p = table_problem();
        let e = smallest_support(&p.kb_a, &p.query).unwrap();
        assert_eq!(sorted(e.support), sorted(clauses(&[&[1, 2], &[-2, 3], &[-3]])));
        let e = smallest_support(&cnf(&[&[1]]), &cnf(&[&[1]])).unwrap();
        assert_eq!(e.support, clauses(&[&[1]]));
        let e = smallest_support(&cnf(&[&[1], &[2]]), &cnf(&[&[1]])).unwrap();
        assert_eq!(e.support, clauses(&[&[1]]));
        assert!(matches!(
            smallest_support(&cnf(&[&[1, 2]]), &cnf(&[&[1]])),
            Err(ReconcileError::NotEntailed)
        ));
    }

    #[test]
    fn restricted_mode_uses_agent_clauses_only() {
        // The human's own b would suffice in general mode.
        let kb_a = cnf(&[&[1], &[-1, 2]]);
        let kb_h = cnf(&[&[-1, 2], &[3]]);
        let q = cnf(&[&[2]]);
        let general = reconcile(&ReconcileProblem::new(kb_a.clone(), kb_h.clone(), q.clone())).unwrap();
        let restricted = reconcile(
            &ReconcileProblem::new(kb_a, kb_h, q).with_mode(Mode::Restricted),
        )
        .unwrap();
        assert_eq!(general.update, clauses(&[&[1]]));
        assert_eq!(restricted.update, clauses(&[&[1]]));
        assert_eq!(sorted(restricted.support), sorted(clauses(&[&[1], &[-1, 2]])));
    }

    #[test]
    fn zero_time_limit_times_out() {
        let cfg = ReconcileConfig::with_time_limit(Duration::ZERO);
        assert!(matches!(
            reconcile_with(&table_problem(), &cfg),
            Err(ReconcileError::TimedOut { .. })
        ));
        let token = CancelToken::new();
        token.cancel();
        let cfg = ReconcileConfig {
            cancel: Some(token),
            ..Default::default()
        };
        assert!(matches!(
            reconcile_with(&table_problem(), &cfg),
            Err(ReconcileError::Cancelled { .. })
        ));
    }

    #[test]
    fn non_unit_query() {
        // φ = (a ∨ b) ∧ c
        let kb_a = cnf(&[&[1], &[3]]);
        let kb_h = cnf(&[&[3]]);
        let e = reconcile(&ReconcileProblem::new(kb_a, kb_h, cnf(&[&[1, 2], &[3]]))).unwrap();
        assert_eq!(e.update, clauses(&[&[1]]));
        assert!(e.support.iter().all(|c| c.lits().iter().all(|l| l.var() <= 3)));
    }
}
