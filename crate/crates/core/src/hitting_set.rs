//! Exact minimum-cardinality hitting sets.
//!
//! The optimum size is found by iterative deepening over a branch-and-bound
//! that picks the unhit set with fewest available elements and branches on
//! its elements in descending occurrence order. Nodes are pruned with a
//! lower bound from a greedy packing of pairwise-disjoint unhit sets. A
//! second pass fixes the lexicographically smallest optimum one element at
//! a time, using the same search as a feasibility test.

use thiserror::Error;

use crate::minimal::ClauseIndexSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HittingSetError {
    #[error("an empty set admits no hitting set")]
    EmptySet,
    #[error("element {element} is outside the universe of size {universe}")]
    OutOfUniverse { element: usize, universe: usize },
}

/// A growing collection of sets plus a retained lower bound on the optimum.
#[derive(Clone, Debug, Default)]
pub struct HittingSetInstance {
    universe: Option<usize>,
    sets: Vec<ClauseIndexSet>,
    /// Sets that contain another member; ignored by the search.
    subsumed: Vec<bool>,
    lower_bound: usize,
}

impl HittingSetInstance {
    pub fn new() -> Self {
        Self::default()
    }

    /// Restrict elements to `0..size`.
    pub fn with_universe(size: usize) -> Self {
        HittingSetInstance {
            universe: Some(size),
            ..Self::default()
        }
    }

    pub fn sets(&self) -> &[ClauseIndexSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn add_set(&mut self, set: ClauseIndexSet) -> Result<(), HittingSetError> {
        if set.is_empty() {
            return Err(HittingSetError::EmptySet);
        }
        if let (Some(size), Some(max)) = (self.universe, set.largest()) {
            if max >= size {
                return Err(HittingSetError::OutOfUniverse {
                    element: max,
                    universe: size,
                });
            }
        }
        let subsumed = self
            .sets
            .iter()
            .zip(&self.subsumed)
            .any(|(s, &sub)| !sub && s.is_subset(&set));
        if !subsumed {
            for (s, sub) in self.sets.iter().zip(self.subsumed.iter_mut()) {
                if !*sub && set.is_subset(s) {
                    *sub = true;
                }
            }
        }
        self.sets.push(set);
        self.subsumed.push(subsumed);
        Ok(())
    }

    /// Minimum hitting set; among optima the lexicographically smallest by
    /// sorted element sequence.
    pub fn min_hitting_set(&mut self) -> ClauseIndexSet {
        let active: Vec<&ClauseIndexSet> = self
            .sets
            .iter()
            .zip(&self.subsumed)
            .filter(|(_, &sub)| !sub)
            .map(|(s, _)| s)
            .collect();
        if active.is_empty() {
            return ClauseIndexSet::empty();
        }
        let mut search = Search::new(&active);
        let mut k = self.lower_bound.max(search.packing_bound());
        let best = loop {
            if let Some(sol) = search.feasible(k) {
                break sol;
            }
            k += 1;
        };
        self.lower_bound = k;
        let result = search.lexicographic_min(k, best);
        debug_assert!(self.sets.iter().all(|s| s.intersects(&result)));
        result
    }
}

/// Convenience wrapper over a fresh instance.
pub fn min_hitting_set(sets: &[ClauseIndexSet]) -> Result<ClauseIndexSet, HittingSetError> {
    let mut inst = HittingSetInstance::new();
    for s in sets {
        inst.add_set(s.clone())?;
    }
    Ok(inst.min_hitting_set())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Free,
    Chosen,
    Excluded,
}

/// Search state over compressed element indices.
struct Search {
    /// Original element id per compressed index, ascending.
    elements: Vec<usize>,
    sets: Vec<Vec<usize>>,
    occurs_in: Vec<Vec<usize>>,
    status: Vec<Status>,
    hit_count: Vec<usize>,
    chosen: Vec<usize>,
    mark: Vec<bool>,
}

impl Search {
    fn new(sets: &[&ClauseIndexSet]) -> Self {
        let mut elements: Vec<usize> = sets.iter().flat_map(|s| s.iter()).collect();
        elements.sort_unstable();
        elements.dedup();
        let compressed: Vec<Vec<usize>> = sets
            .iter()
            .map(|s| {
                s.iter()
                    .map(|e| elements.binary_search(&e).unwrap())
                    .collect()
            })
            .collect();
        let mut occurs_in = vec![Vec::new(); elements.len()];
        for (i, s) in compressed.iter().enumerate() {
            for &e in s {
                occurs_in[e].push(i);
            }
        }
        Search {
            status: vec![Status::Free; elements.len()],
            mark: vec![false; elements.len()],
            hit_count: vec![0; compressed.len()],
            chosen: Vec::new(),
            elements,
            sets: compressed,
            occurs_in,
        }
    }

    fn choose(&mut self, e: usize) {
        self.status[e] = Status::Chosen;
        self.chosen.push(e);
        for &s in &self.occurs_in[e] {
            self.hit_count[s] += 1;
        }
    }

    fn unchoose(&mut self, e: usize) {
        self.status[e] = Status::Free;
        self.chosen.pop();
        for &s in &self.occurs_in[e] {
            self.hit_count[s] -= 1;
        }
    }

    fn available(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.sets[s]
            .iter()
            .copied()
            .filter(|&e| self.status[e] == Status::Free)
    }

    /// Greedy packing of pairwise-disjoint unhit sets (over free elements),
    /// smallest first. Its size bounds the number of further elements needed.
    fn packing_bound(&mut self) -> usize {
        let mut unhit: Vec<(usize, usize)> = (0..self.sets.len())
            .filter(|&s| self.hit_count[s] == 0)
            .map(|s| (self.available(s).count(), s))
            .collect();
        unhit.sort_unstable();
        let mut count = 0;
        let mut touched = Vec::new();
        for &(size, s) in &unhit {
            if size == 0 {
                // Unhittable under current exclusions.
                for e in touched {
                    self.mark[e] = false;
                }
                return usize::MAX;
            }
            if self.available(s).any(|e| self.mark[e]) {
                continue;
            }
            count += 1;
            let members: Vec<usize> = self.available(s).collect();
            for e in members {
                self.mark[e] = true;
                touched.push(e);
            }
        }
        for e in touched {
            self.mark[e] = false;
        }
        count
    }

    /// Can the unhit sets be hit with at most `budget` more free elements?
    /// On success the chosen elements hold a witness.
    fn extend(&mut self, budget: usize) -> bool {
        let mut pick: Option<(usize, usize)> = None;
        for s in 0..self.sets.len() {
            if self.hit_count[s] > 0 {
                continue;
            }
            let n = self.available(s).count();
            if pick.is_none_or(|(best, _)| n < best) {
                pick = Some((n, s));
            }
        }
        let Some((n, s)) = pick else {
            return true;
        };
        if budget == 0 || n == 0 {
            return false;
        }
        let lb = self.packing_bound();
        if lb > budget {
            return false;
        }
        let mut branch: Vec<(usize, usize)> = self
            .available(s)
            .map(|e| {
                let occ = self.occurs_in[e]
                    .iter()
                    .filter(|&&t| self.hit_count[t] == 0)
                    .count();
                (occ, e)
            })
            .collect();
        branch.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut excluded = Vec::new();
        let mut found = false;
        for &(_, e) in &branch {
            self.choose(e);
            if self.extend(budget - 1) {
                found = true;
                break;
            }
            self.unchoose(e);
            self.status[e] = Status::Excluded;
            excluded.push(e);
        }
        for e in excluded {
            self.status[e] = Status::Free;
        }
        found
    }

    /// A hitting set of size at most `k` respecting current statuses, as
    /// compressed indices.
    fn feasible(&mut self, k: usize) -> Option<Vec<usize>> {
        let base = self.chosen.len();
        if base > k {
            return None;
        }
        if self.extend(k - base) {
            let sol = self.chosen.clone();
            while self.chosen.len() > base {
                let e = *self.chosen.last().unwrap();
                self.unchoose(e);
            }
            Some(sol)
        } else {
            None
        }
    }

    /// Lexicographically smallest hitting set of size `k`, given that `k` is
    /// the optimum and `witness` is one optimal solution.
    fn lexicographic_min(&mut self, k: usize, witness: Vec<usize>) -> ClauseIndexSet {
        let mut pool: Vec<Vec<usize>> = vec![{
            let mut w = witness;
            w.sort_unstable();
            w
        }];
        let mut fixed: Vec<usize> = Vec::new();
        let mut next = 0;
        while !(0..self.sets.len()).all(|s| self.hit_count[s] > 0) {
            let mut chosen = None;
            for e in next..self.elements.len() {
                if self.status[e] != Status::Free {
                    continue;
                }
                let useful = self.occurs_in[e].iter().any(|&s| self.hit_count[s] == 0);
                if !useful {
                    self.status[e] = Status::Excluded;
                    continue;
                }
                self.choose(e);
                // Everything below `e` that is not fixed is now excluded.
                let known = pool.iter().any(|p| {
                    fixed.iter().chain(std::iter::once(&e)).all(|x| p.contains(x))
                        && p.iter().all(|&x| x >= e || fixed.contains(&x))
                });
                let ok = known
                    || match self.feasible(k) {
                        Some(mut sol) => {
                            sol.sort_unstable();
                            pool.push(sol);
                            true
                        }
                        None => false,
                    };
                if ok {
                    chosen = Some(e);
                    break;
                }
                self.unchoose(e);
                self.status[e] = Status::Excluded;
            }
            let e = chosen.unwrap_or_else(|| panic!("optimum of size {k} not reconstructible"));
            fixed.push(e);
            next = e + 1;
        }
        ClauseIndexSet::new(fixed.iter().map(|&e| self.elements[e]))
    }
}
