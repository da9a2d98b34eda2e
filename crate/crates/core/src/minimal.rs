//! Minimal correction sets and minimal unsatisfiable subsets.
//!
//! All sets are index sets over a soft clause slice; the hard clauses are
//! always kept. MCSes come from linear search seeded by a satisfiable
//! subset, MUSes from deletion. Candidate order is ascending index, so
//! results are deterministic. The exhaustive enumerators are meant as
//! test oracles on small universes.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::formula::{max_var, Clause};
use crate::sat::{Model, SatSession, Selector, SolveResult};

/// Sorted, duplicate-free set of indices into a soft clause universe.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ClauseIndexSet(Vec<usize>);

impl ClauseIndexSet {
    pub fn new(ids: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ClauseIndexSet(v)
    }

    pub fn empty() -> Self {
        ClauseIndexSet(Vec::new())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn is_subset(&self, other: &ClauseIndexSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    pub fn intersects(&self, other: &ClauseIndexSet) -> bool {
        self.0.iter().any(|&i| other.contains(i))
    }

    pub fn largest(&self) -> Option<usize> {
        self.0.last().copied()
    }
}

impl FromIterator<usize> for ClauseIndexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        ClauseIndexSet::new(iter)
    }
}

impl fmt::Display for ClauseIndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, id) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetKind {
    Mcs,
    Mus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalSet {
    pub ids: ClauseIndexSet,
    pub kind: SetKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MinimalSetError {
    #[error("seed clauses are inconsistent with the hard clauses")]
    SeedInconsistent,
    #[error("hard and soft clauses are jointly satisfiable; nothing to correct")]
    NothingToCorrect,
    #[error("hard and soft clauses are jointly satisfiable; no unsatisfiable subset")]
    Satisfiable,
    #[error("seed index {0} is outside the soft universe")]
    SeedOutOfRange(usize),
    #[error("universe of {size} clauses exceeds the enumeration limit {limit}")]
    UniverseTooLarge { size: usize, limit: usize },
}

static AUDIT_CHECKS: AtomicU64 = AtomicU64::new(0);
static AUDIT_FAILURES: AtomicU64 = AtomicU64::new(0);

/// Counts of perturbation checks run on returned sets in debug builds, and
/// how many of them failed.
pub fn audit_counters() -> (u64, u64) {
    (
        AUDIT_CHECKS.load(Ordering::Relaxed),
        AUDIT_FAILURES.load(Ordering::Relaxed),
    )
}

fn audit(ok: bool, what: &str) {
    AUDIT_CHECKS.fetch_add(1, Ordering::Relaxed);
    if !ok {
        AUDIT_FAILURES.fetch_add(1, Ordering::Relaxed);
        panic!("{what} failed its minimality check");
    }
}

fn session_for(soft: &[Clause], hard: &[Clause]) -> (SatSession, Vec<Selector>) {
    let mut s = SatSession::new(max_var(soft.iter().chain(hard)));
    for c in hard {
        s.add_hard(c);
    }
    let sels = soft.iter().map(|c| s.add_soft(c)).collect();
    (s, sels)
}

/// `true` iff `hard ∪ soft[ids]` is satisfiable; fresh session each call.
fn subset_sat(soft: &[Clause], hard: &[Clause], ids: impl IntoIterator<Item = usize>) -> bool {
    let mut s = SatSession::new(0);
    for c in hard {
        s.add_hard(c);
    }
    for i in ids {
        s.add_hard(&soft[i]);
    }
    s.solve(&[]).is_sat()
}

/// Single-element perturbation test for an MCS: removing it leaves the
/// formula satisfiable and putting back any one member makes it unsatisfiable.
pub fn check_mcs(soft: &[Clause], hard: &[Clause], mcs: &ClauseIndexSet) -> bool {
    let rest = || (0..soft.len()).filter(|&i| !mcs.contains(i));
    subset_sat(soft, hard, rest())
        && mcs
            .iter()
            .all(|c| !subset_sat(soft, hard, rest().chain(std::iter::once(c))))
}

/// Single-element perturbation test for a (partial) MUS.
pub fn check_mus(soft: &[Clause], hard: &[Clause], mus: &ClauseIndexSet) -> bool {
    !subset_sat(soft, hard, mus.iter())
        && mus
            .iter()
            .all(|drop| subset_sat(soft, hard, mus.iter().filter(|&i| i != drop)))
}

/// Incremental MCS extraction over a fixed hard/soft split.
///
/// Repeated calls share one SAT session, which is how the reconciliation
/// loop extracts a new MCS per iteration.
pub struct McsExtractor<'a> {
    soft: &'a [Clause],
    hard: &'a [Clause],
    session: SatSession,
    selectors: Vec<Selector>,
    checked_unsat: bool,
}

impl<'a> McsExtractor<'a> {
    pub fn new(soft: &'a [Clause], hard: &'a [Clause]) -> Self {
        let (session, selectors) = session_for(soft, hard);
        McsExtractor {
            soft,
            hard,
            session,
            selectors,
            checked_unsat: false,
        }
    }

    pub fn oracle_calls(&self) -> u64 {
        self.session.calls()
    }

    fn assume(&self, ids: impl IntoIterator<Item = usize>) -> Vec<Selector> {
        ids.into_iter().map(|i| self.selectors[i]).collect()
    }

    /// Satisfiability of `hard ∪ soft[seed]`.
    pub fn check(&mut self, seed: &ClauseIndexSet) -> Result<SolveResult, MinimalSetError> {
        if let Some(bad) = seed.iter().find(|&i| i >= self.soft.len()) {
            return Err(MinimalSetError::SeedOutOfRange(bad));
        }
        let sels = self.assume(seed.iter());
        Ok(self.session.solve_selectors(&sels))
    }

    /// Extract an MCS disjoint from `seed`.
    pub fn extract(&mut self, seed: &ClauseIndexSet) -> Result<MinimalSet, MinimalSetError> {
        match self.check(seed)? {
            SolveResult::Sat(model) => self.extract_from_model(seed, model),
            SolveResult::Unsat(_) => Err(MinimalSetError::SeedInconsistent),
        }
    }

    /// Extract an MCS given a model of `hard ∪ soft[seed]` already at hand.
    pub fn extract_from_model(
        &mut self,
        seed: &ClauseIndexSet,
        model: Model,
    ) -> Result<MinimalSet, MinimalSetError> {
        let n = self.soft.len();
        if !self.checked_unsat {
            let all = self.selectors.clone();
            if self.session.solve_selectors(&all).is_sat() {
                return Err(MinimalSetError::NothingToCorrect);
            }
            self.checked_unsat = true;
        }
        let mut kept = vec![false; n];
        for i in seed.iter() {
            kept[i] = true;
        }
        self.absorb(&model, &mut kept);
        let mut mcs = Vec::new();
        for i in 0..n {
            if kept[i] {
                continue;
            }
            let mut sels = self.assume((0..n).filter(|&j| kept[j]));
            sels.push(self.selectors[i]);
            match self.session.solve_selectors(&sels) {
                SolveResult::Sat(m) => {
                    kept[i] = true;
                    self.absorb(&m, &mut kept);
                }
                SolveResult::Unsat(_) => mcs.push(i),
            }
        }
        let ids = ClauseIndexSet::new(mcs);
        if cfg!(debug_assertions) {
            audit(check_mcs(self.soft, self.hard, &ids), "MCS");
        }
        Ok(MinimalSet {
            ids,
            kind: SetKind::Mcs,
        })
    }

    /// Keep every soft clause the model already satisfies.
    fn absorb(&self, model: &Model, kept: &mut [bool]) {
        for (i, c) in self.soft.iter().enumerate() {
            if !kept[i] && model.satisfies(c) {
                kept[i] = true;
            }
        }
    }
}

/// Extract one MCS of `hard ∪ soft` that avoids every clause of `seed`.
pub fn extract_mcs(
    soft: &[Clause],
    hard: &[Clause],
    seed: &ClauseIndexSet,
) -> Result<MinimalSet, MinimalSetError> {
    McsExtractor::new(soft, hard).extract(seed)
}

/// Deletion-based MUS extraction. With hard clauses present the result is a
/// partial MUS: minimal among soft subsets that are inconsistent with `hard`.
pub fn extract_mus(soft: &[Clause], hard: &[Clause]) -> Result<MinimalSet, MinimalSetError> {
    extract_mus_counted(soft, hard).map(|(set, _)| set)
}

/// As [`extract_mus`], also returning the number of oracle calls.
pub fn extract_mus_counted(
    soft: &[Clause],
    hard: &[Clause],
) -> Result<(MinimalSet, u64), MinimalSetError> {
    let (mut session, selectors) = session_for(soft, hard);
    if session.solve_selectors(&selectors).is_sat() {
        return Err(MinimalSetError::Satisfiable);
    }
    let mut active = vec![true; soft.len()];
    for i in 0..soft.len() {
        active[i] = false;
        let sels: Vec<Selector> = (0..soft.len())
            .filter(|&j| active[j])
            .map(|j| selectors[j])
            .collect();
        if session.solve_selectors(&sels).is_sat() {
            active[i] = true;
        }
    }
    let ids = ClauseIndexSet::new((0..soft.len()).filter(|&j| active[j]));
    if cfg!(debug_assertions) {
        audit(check_mus(soft, hard, &ids), "MUS");
    }
    Ok((
        MinimalSet {
            ids,
            kind: SetKind::Mus,
        },
        session.calls(),
    ))
}

/// Upper bound on the soft universe for exhaustive enumeration.
pub const MAX_ENUMERATION_UNIVERSE: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub sets: Vec<MinimalSet>,
    /// `false` when the cap cut the enumeration short.
    pub complete: bool,
}

/// Visit subsets of `0..n` as bitmasks in order of increasing cardinality,
/// then by increasing mask value.
fn subsets_by_size(n: usize) -> impl Iterator<Item = u32> {
    (0..=n).flat_map(move |k| (0u32..(1u32 << n)).filter(move |m| m.count_ones() as usize == k))
}

fn mask_to_set(mask: u32) -> ClauseIndexSet {
    ClauseIndexSet::new((0..32).filter(|i| mask >> i & 1 == 1))
}

fn enumerate(
    soft: &[Clause],
    hard: &[Clause],
    cap: usize,
    kind: SetKind,
) -> Result<Enumeration, MinimalSetError> {
    let n = soft.len();
    if n > MAX_ENUMERATION_UNIVERSE {
        return Err(MinimalSetError::UniverseTooLarge {
            size: n,
            limit: MAX_ENUMERATION_UNIVERSE,
        });
    }
    let (mut session, selectors) = session_for(soft, hard);
    let full = (1u32 << n) - 1;
    let mut found: Vec<u32> = Vec::new();
    for mask in subsets_by_size(n) {
        if found.iter().any(|&f| f & !mask == 0) {
            continue;
        }
        let active = match kind {
            SetKind::Mcs => full & !mask,
            SetKind::Mus => mask,
        };
        let sels: Vec<Selector> = (0..n)
            .filter(|i| active >> i & 1 == 1)
            .map(|i| selectors[i])
            .collect();
        let sat = session.solve_selectors(&sels).is_sat();
        // An MCS's removal restores satisfiability; an MUS is itself unsatisfiable.
        let hit = match kind {
            SetKind::Mcs => sat,
            SetKind::Mus => !sat,
        };
        if hit {
            if kind == SetKind::Mcs && mask == 0 {
                // Already satisfiable: no MCSes.
                return Ok(Enumeration {
                    sets: Vec::new(),
                    complete: true,
                });
            }
            if found.len() == cap {
                return Ok(Enumeration {
                    sets: to_sets(&found, kind),
                    complete: false,
                });
            }
            found.push(mask);
        }
    }
    Ok(Enumeration {
        sets: to_sets(&found, kind),
        complete: true,
    })
}

fn to_sets(masks: &[u32], kind: SetKind) -> Vec<MinimalSet> {
    masks
        .iter()
        .map(|&m| MinimalSet {
            ids: mask_to_set(m),
            kind,
        })
        .collect()
}

/// All MCSes of `hard ∪ soft` by subset scan, smallest first.
pub fn enumerate_all_mcses(
    soft: &[Clause],
    hard: &[Clause],
    cap: usize,
) -> Result<Enumeration, MinimalSetError> {
    enumerate(soft, hard, cap, SetKind::Mcs)
}

/// All (partial) MUSes of `hard ∪ soft` by subset scan, smallest first.
pub fn enumerate_all_muses(
    soft: &[Clause],
    hard: &[Clause],
    cap: usize,
) -> Result<Enumeration, MinimalSetError> {
    enumerate(soft, hard, cap, SetKind::Mus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(lits: &[i32]) -> Clause {
        Clause::from_dimacs(lits)
    }

    // a=1 b=2 c=3 d=4 f=6; soft universe is C1, C2, C4, C5 of the table example.
    fn table_soft() -> Vec<Clause> {
        vec![c(&[1, 2]), c(&[-2, 3]), c(&[-2, 4]), c(&[-4])]
    }

    fn table_hard() -> Vec<Clause> {
        vec![c(&[-3]), c(&[6]), c(&[-1])]
    }

    fn set(ids: &[usize]) -> ClauseIndexSet {
        ClauseIndexSet::new(ids.iter().copied())
    }

    fn sets(e: &Enumeration) -> Vec<ClauseIndexSet> {
        let mut v: Vec<_> = e.sets.iter().map(|s| s.ids.clone()).collect();
        v.sort();
        v
    }

    #[test]
    fn mcs_from_empty_seed_is_one_of_the_three() {
        let m = extract_mcs(&table_soft(), &table_hard(), &ClauseIndexSet::empty()).unwrap();
        let all = [set(&[0]), set(&[1, 2]), set(&[1, 3])];
        assert!(all.contains(&m.ids), "{}", m.ids);
        assert_eq!(m.kind, SetKind::Mcs);
    }

    #[test]
    fn mcs_respects_seed() {
        let m = extract_mcs(&table_soft(), &table_hard(), &set(&[1])).unwrap();
        assert_eq!(m.ids, set(&[0]));
    }

    #[test]
    fn symmetric_mcses() {
        let soft = vec![c(&[1]), c(&[-1])];
        let m = extract_mcs(&soft, &[], &ClauseIndexSet::empty()).unwrap();
        assert!(m.ids == set(&[0]) || m.ids == set(&[1]));
        assert!(check_mcs(&soft, &[], &m.ids));
    }

    #[test]
    fn mcs_errors() {
        let soft = vec![c(&[1]), c(&[-1])];
        assert_eq!(
            extract_mcs(&soft, &[c(&[-1])], &set(&[0])),
            Err(MinimalSetError::SeedInconsistent)
        );
        assert_eq!(
            extract_mcs(&[c(&[1])], &[], &ClauseIndexSet::empty()),
            Err(MinimalSetError::NothingToCorrect)
        );
        assert_eq!(
            extract_mcs(&soft, &[], &set(&[5])),
            Err(MinimalSetError::SeedOutOfRange(5))
        );
    }

    #[test]
    fn mus_of_table_return_line() {
        // D1, D2, C1, C2 soft with ¬a hard: f is excluded.
        let soft = vec![c(&[-3]), c(&[6]), c(&[1, 2]), c(&[-2, 3])];
        let m = extract_mus(&soft, &[c(&[-1])]).unwrap();
        assert_eq!(m.ids, set(&[0, 2, 3]));
        assert_eq!(m.kind, SetKind::Mus);
    }

    #[test]
    fn small_muses() {
        let m = extract_mus(&[c(&[1]), c(&[-1]), c(&[2])], &[]).unwrap();
        assert_eq!(m.ids, set(&[0, 1]));
        let m = extract_mus(&[c(&[1])], &[c(&[-1])]).unwrap();
        assert_eq!(m.ids, set(&[0]));
        assert_eq!(extract_mus(&[c(&[1])], &[]), Err(MinimalSetError::Satisfiable));
    }

    #[test]
    fn enumerates_table_mcses_and_muses() {
        let mcses = enumerate_all_mcses(&table_soft(), &table_hard(), usize::MAX).unwrap();
        assert!(mcses.complete);
        assert_eq!(sets(&mcses), vec![set(&[0]), set(&[1, 2]), set(&[1, 3])]);
        let muses = enumerate_all_muses(&table_soft(), &table_hard(), usize::MAX).unwrap();
        assert_eq!(sets(&muses), vec![set(&[0, 1]), set(&[0, 2, 3])]);
    }

    #[test]
    fn enumeration_edge_cases() {
        let sat = vec![c(&[1]), c(&[2])];
        assert!(enumerate_all_mcses(&sat, &[], 10).unwrap().sets.is_empty());
        assert!(enumerate_all_muses(&sat, &[], 10).unwrap().sets.is_empty());
        let two = vec![c(&[1]), c(&[-1])];
        assert_eq!(
            sets(&enumerate_all_mcses(&two, &[], 10).unwrap()),
            vec![set(&[0]), set(&[1])]
        );
        let four = vec![c(&[1]), c(&[-1]), c(&[2]), c(&[-2])];
        assert_eq!(
            sets(&enumerate_all_muses(&four, &[], 10).unwrap()),
            vec![set(&[0, 1]), set(&[2, 3])]
        );
        let capped = enumerate_all_muses(&four, &[], 1).unwrap();
        assert!(!capped.complete);
        assert_eq!(capped.sets.len(), 1);
        let big = vec![c(&[1]); 21];
        assert!(matches!(
            enumerate_all_mcses(&big, &[], 1),
            Err(MinimalSetError::UniverseTooLarge { .. })
        ));
    }

    #[test]
    fn extractor_reuse_yields_new_mcses() {
        let soft = table_soft();
        let hard = table_hard();
        let mut ex = McsExtractor::new(&soft, &hard);
        let first = ex.extract(&ClauseIndexSet::empty()).unwrap().ids;
        let seed = ClauseIndexSet::new(first.largest());
        let second = ex.extract(&seed).unwrap().ids;
        assert!(!second.intersects(&seed));
        assert_ne!(first, second);
        assert!(ex.oracle_calls() > 0);
    }

    fn arb_unsat_instance() -> impl Strategy<Value = (Vec<Clause>, Vec<Clause>)> {
        let clause = prop::collection::vec((1u32..=5, any::<bool>()), 1..3);
        (
            prop::collection::vec(clause.clone(), 2..10),
            prop::collection::vec(clause, 0..3),
        )
            .prop_filter_map("need consistent hard, inconsistent whole", |(s, h)| {
                let build = |v: Vec<Vec<(u32, bool)>>| -> Option<Vec<Clause>> {
                    v.into_iter()
                        .map(|ls| match Clause::normalize(ls.into_iter().map(|(v, p)| crate::formula::Literal::new(v, p))) {
                            crate::formula::Normalized::Clause(c) => Some(c),
                            _ => None,
                        })
                        .collect()
                };
                let soft = build(s)?;
                let hard = build(h)?;
                let hard_ok = crate::sat::is_satisfiable(&hard);
                let all_unsat = !crate::sat::is_satisfiable(soft.iter().chain(&hard));
                (hard_ok && all_unsat).then_some((soft, hard))
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn extracted_sets_are_minimal_and_enumerated((soft, hard) in arb_unsat_instance()) {
            let mus = extract_mus(&soft, &hard).unwrap();
            prop_assert!(check_mus(&soft, &hard, &mus.ids));
            let all_muses = enumerate_all_muses(&soft, &hard, usize::MAX).unwrap();
            prop_assert!(all_muses.sets.iter().any(|m| m.ids == mus.ids));

            let mcs = extract_mcs(&soft, &hard, &ClauseIndexSet::empty()).unwrap();
            prop_assert!(check_mcs(&soft, &hard, &mcs.ids));
            let all_mcses = enumerate_all_mcses(&soft, &hard, usize::MAX).unwrap();
            prop_assert!(all_mcses.sets.iter().any(|m| m.ids == mcs.ids));
        }

        #[test]
        fn partial_mus_extends_to_full_mus((soft, hard) in arb_unsat_instance()) {
            // With everything soft, some MUS of the whole formula contains the partial one.
            let partial = extract_mus(&soft, &hard).unwrap().ids;
            let all: Vec<Clause> = soft.iter().chain(&hard).cloned().collect();
            let full = enumerate_all_muses(&all, &[], usize::MAX).unwrap();
            prop_assert!(full.sets.iter().any(|m| partial.is_subset(&m.ids)));
        }

        #[test]
        fn seed_is_preserved((soft, hard) in arb_unsat_instance(), pick in any::<prop::sample::Index>()) {
            let seed = ClauseIndexSet::new([pick.index(soft.len())]);
            if let Ok(m) = extract_mcs(&soft, &hard, &seed) {
                prop_assert!(!m.ids.intersects(&seed));
            }
        }
    }
}
