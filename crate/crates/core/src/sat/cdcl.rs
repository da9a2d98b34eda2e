//! A conflict-driven clause-learning solver with assumption support.
//!
//! Two watched literals with blockers, first-UIP learning with local
//! minimization, VSIDS decisions with phase saving, Luby restarts and
//! activity-based learnt clause deletion. Assumptions occupy the first
//! decision levels; when one is refuted the responsible assumptions are
//! collected by walking the implication graph backwards.

use super::{Backend, BackendResult};
use crate::formula::Literal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Lit(u32);

impl Lit {
    fn new(var: usize, negated: bool) -> Lit {
        Lit(((var as u32) << 1) | negated as u32)
    }
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    fn negated(self) -> bool {
        self.0 & 1 == 1
    }
    fn idx(self) -> usize {
        self.0 as usize
    }
    fn from_external(l: Literal) -> Lit {
        Lit::new(l.var() as usize - 1, !l.is_positive())
    }
    fn to_external(self) -> Literal {
        Literal::new(self.var() as u32 + 1, !self.negated())
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Value {
    True,
    False,
    Unassigned,
}

type CRef = u32;

#[derive(Clone, Debug)]
struct StoredClause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Clone, Copy, Debug)]
struct Watcher {
    cref: CRef,
    blocker: Lit,
}

/// Binary max-heap over variables keyed by activity.
#[derive(Clone, Debug, Default)]
struct VarOrder {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl VarOrder {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n, None);
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v] = Some(i);
        self.sift_up(i, act);
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.sift_up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = Some(0);
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn better(a: usize, b: usize, act: &[f64]) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(v, self.heap[parent], act) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && Self::better(self.heap[right], self.heap[left], act) {
                right
            } else {
                left
            };
            if !Self::better(self.heap[child], v, act) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }
}

enum SearchOutcome {
    Sat,
    Unsat,
    Restart,
}

/// Counters exposed for diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CdclStats {
    pub solves: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
}

#[derive(Clone, Debug)]
pub struct CdclSolver {
    clauses: Vec<StoredClause>,
    learnts: Vec<CRef>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<Value>,
    level: Vec<u32>,
    reason: Vec<Option<CRef>>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    seen: Vec<bool>,
    order: VarOrder,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    var_inc: f64,
    cla_inc: f64,
    max_learnts: f64,
    ok: bool,
    model: Vec<bool>,
    conflict: Vec<Lit>,
    stats: CdclStats,
}

const VAR_DECAY: f64 = 0.95;
const CLA_DECAY: f64 = 0.999;
const RESTART_BASE: u64 = 100;

impl Default for CdclSolver {
    fn default() -> Self {
        Self::new()
    }
}

impl CdclSolver {
    pub fn new() -> Self {
        CdclSolver {
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            polarity: Vec::new(),
            activity: Vec::new(),
            seen: Vec::new(),
            order: VarOrder::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            var_inc: 1.0,
            cla_inc: 1.0,
            max_learnts: 0.0,
            ok: true,
            model: Vec::new(),
            conflict: Vec::new(),
            stats: CdclStats::default(),
        }
    }

    pub fn stats(&self) -> CdclStats {
        self.stats
    }

    fn ensure_vars(&mut self, n: usize) {
        while self.assigns.len() < n {
            let v = self.assigns.len();
            self.assigns.push(Value::Unassigned);
            self.level.push(0);
            self.reason.push(None);
            self.polarity.push(true);
            self.activity.push(0.0);
            self.seen.push(false);
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.order.grow(v + 1);
            self.order.insert(v, &self.activity);
        }
    }

    fn value(&self, l: Lit) -> Value {
        match self.assigns[l.var()] {
            Value::Unassigned => Value::Unassigned,
            Value::True if !l.negated() => Value::True,
            Value::False if l.negated() => Value::True,
            _ => Value::False,
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: Option<CRef>) {
        debug_assert_eq!(self.value(l), Value::Unassigned);
        let v = l.var();
        self.assigns[v] = if l.negated() { Value::False } else { Value::True };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.assigns[v] = Value::Unassigned;
            self.reason[v] = None;
            self.polarity[v] = l.negated();
            self.order.insert(v, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level);
        self.qhead = start;
    }

    fn attach(&mut self, cref: CRef) {
        let c = &self.clauses[cref as usize];
        let (a, b) = (c.lits[0], c.lits[1]);
        self.watches[a.idx()].push(Watcher { cref, blocker: b });
        self.watches[b.idx()].push(Watcher { cref, blocker: a });
    }

    fn add_clause_internal(&mut self, lits: &[Literal]) -> bool {
        if !self.ok {
            return false;
        }
        self.cancel_until(0);
        let mut ls: Vec<Lit> = lits.iter().map(|&l| Lit::from_external(l)).collect();
        if let Some(max) = ls.iter().map(|l| l.var()).max() {
            self.ensure_vars(max + 1);
        }
        ls.sort_unstable();
        ls.dedup();
        if ls.windows(2).any(|w| w[0] == !w[1]) {
            return true;
        }
        if ls.iter().any(|&l| self.value(l) == Value::True) {
            return true;
        }
        ls.retain(|&l| self.value(l) != Value::False);
        match ls.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(ls[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                let cref = self.clauses.len() as CRef;
                self.clauses.push(StoredClause {
                    lits: ls,
                    learnt: false,
                    deleted: false,
                    activity: 0.0,
                });
                self.attach(cref);
                true
            }
        }
    }

    /// Unit propagation; returns a conflicting clause if one is found.
    fn propagate(&mut self) -> Option<CRef> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.idx()]);
            let mut i = 0;
            let mut j = 0;
            'watchers: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == Value::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                let updated = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                if first != w.blocker && self.value(first) == Value::True {
                    ws[j] = updated;
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                for k in 2..len {
                    let lk = self.clauses[cref].lits[k];
                    if self.value(lk) != Value::False {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[lk.idx()].push(updated);
                        continue 'watchers;
                    }
                }
                ws[j] = updated;
                j += 1;
                if self.value(first) == Value::False {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.idx()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: CRef) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: CRef) -> (Vec<Lit>, usize) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let current = self.decision_level() as u32;
        loop {
            self.bump_clause(confl);
            let start = usize::from(p.is_some());
            let lits = self.clauses[confl as usize].lits.clone();
            for &q in &lits[start..] {
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            let lit = self.trail[index];
            self.seen[lit.var()] = false;
            path -= 1;
            p = Some(lit);
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var()].expect("implied literal without reason");
        }
        learnt[0] = !p.unwrap();

        // Local minimization: drop literals implied by other learnt literals.
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                if i == 0 {
                    return true;
                }
                match self.reason[l.var()] {
                    None => true,
                    Some(r) => self.clauses[r as usize].lits[1..]
                        .iter()
                        .any(|q| !self.seen[q.var()] && self.level[q.var()] > 0),
                }
            })
            .collect();
        for l in &learnt {
            self.seen[l.var()] = false;
        }
        let mut learnt: Vec<Lit> = learnt
            .into_iter()
            .zip(keep)
            .filter_map(|(l, k)| k.then_some(l))
            .collect();

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var()] > self.level[learnt[max_i].var()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var()] as usize
        };
        (learnt, bt)
    }

    /// Collect the assumptions responsible for the assumption `failed`
    /// being false. All decisions on the trail are assumptions here.
    fn analyze_final(&mut self, failed: Lit) {
        self.conflict.clear();
        self.conflict.push(failed);
        if self.decision_level() == 0 {
            return;
        }
        let p = failed;
        self.seen[p.var()] = true;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            if self.seen[v] {
                match self.reason[v] {
                    None => {
                        if self.level[v] > 0 {
                            self.conflict.push(l);
                        }
                    }
                    Some(r) => {
                        for &q in &self.clauses[r as usize].lits[1..] {
                            if self.level[q.var()] > 0 {
                                self.seen[q.var()] = true;
                            }
                        }
                    }
                }
                self.seen[v] = false;
            }
        }
        self.seen[p.var()] = false;
    }

    fn locked(&self, cref: CRef) -> bool {
        let c = &self.clauses[cref as usize];
        let l = c.lits[0];
        self.value(l) == Value::True && self.reason[l.var()] == Some(cref)
    }

    fn reduce_db(&mut self) {
        let mut learnts = std::mem::take(&mut self.learnts);
        learnts.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            ca.activity.total_cmp(&cb.activity).then(a.cmp(&b))
        });
        let half = learnts.len() / 2;
        let mut kept = Vec::with_capacity(learnts.len());
        for (i, cref) in learnts.into_iter().enumerate() {
            let removable = i < half && self.clauses[cref as usize].lits.len() > 2 && !self.locked(cref);
            if removable {
                let c = &mut self.clauses[cref as usize];
                c.deleted = true;
                c.lits = Vec::new();
            } else {
                kept.push(cref);
            }
        }
        self.learnts = kept;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.assigns[v] == Value::Unassigned {
                self.stats.decisions += 1;
                return Some(Lit::new(v, self.polarity[v]));
            }
        }
        None
    }

    fn search(&mut self, assumptions: &[Lit], conflict_budget: u64) -> SearchOutcome {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    self.conflict.clear();
                    return SearchOutcome::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let cref = self.clauses.len() as CRef;
                    self.clauses.push(StoredClause {
                        lits: learnt,
                        learnt: true,
                        deleted: false,
                        activity: 0.0,
                    });
                    self.learnts.push(cref);
                    self.attach(cref);
                    self.bump_clause(cref);
                    let first = self.clauses[cref as usize].lits[0];
                    self.enqueue(first, Some(cref));
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLA_DECAY;
                continue;
            }
            if conflicts >= conflict_budget {
                self.cancel_until(0);
                return SearchOutcome::Restart;
            }
            if self.learnts.len() as f64 >= self.max_learnts + self.trail.len() as f64 {
                self.reduce_db();
            }
            let mut next = None;
            while self.decision_level() < assumptions.len() {
                let a = assumptions[self.decision_level()];
                match self.value(a) {
                    Value::True => self.trail_lim.push(self.trail.len()),
                    Value::False => {
                        self.analyze_final(a);
                        return SearchOutcome::Unsat;
                    }
                    Value::Unassigned => {
                        next = Some(a);
                        break;
                    }
                }
            }
            let next = match next.or_else(|| self.pick_branch()) {
                Some(l) => l,
                None => return SearchOutcome::Sat,
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, None);
        }
    }

    fn solve_internal(&mut self, assumptions: &[Literal]) -> BackendResult {
        self.stats.solves += 1;
        self.model.clear();
        self.conflict.clear();
        if !self.ok {
            return BackendResult::Unsat(Vec::new());
        }
        if let Some(max) = assumptions.iter().map(|l| l.var() as usize).max() {
            self.ensure_vars(max);
        }
        let assumptions: Vec<Lit> = assumptions.iter().map(|&l| Lit::from_external(l)).collect();
        self.cancel_until(0);
        self.max_learnts = (self.clauses.len() as f64 / 3.0).max(2000.0);
        let mut restart = 0u32;
        let outcome = loop {
            let budget = luby(restart) * RESTART_BASE;
            match self.search(&assumptions, budget) {
                SearchOutcome::Restart => {
                    restart += 1;
                    self.stats.restarts += 1;
                    self.max_learnts *= 1.05;
                }
                other => break other,
            }
        };
        let result = match outcome {
            SearchOutcome::Sat => {
                self.model = self.assigns.iter().map(|&v| v == Value::True).collect();
                BackendResult::Sat
            }
            SearchOutcome::Unsat => {
                let mut core: Vec<Literal> = self.conflict.iter().map(|l| l.to_external()).collect();
                core.sort_unstable();
                core.dedup();
                BackendResult::Unsat(core)
            }
            SearchOutcome::Restart => unreachable!(),
        };
        self.cancel_until(0);
        result
    }
}

/// The Luby restart sequence 1 1 2 1 1 2 4 1 1 2 ...
fn luby(i: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i as u64 + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = i as u64;
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

impl Backend for CdclSolver {
    fn ensure_vars(&mut self, n: u32) {
        CdclSolver::ensure_vars(self, n as usize);
    }

    fn num_vars(&self) -> u32 {
        self.assigns.len() as u32
    }

    fn add_clause(&mut self, lits: &[Literal]) -> bool {
        self.add_clause_internal(lits)
    }

    fn solve(&mut self, assumptions: &[Literal]) -> BackendResult {
        self.solve_internal(assumptions)
    }

    fn model(&self) -> &[bool] {
        &self.model
    }
}
