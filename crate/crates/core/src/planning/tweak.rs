//! Seeded deletions that turn the agent's planning model into a plausible
//! human model.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ground::PlanningProblem;
use super::PlanningError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TweakParams {
    /// Scenario 4: preconditions removed per action.
    pub preconditions: usize,
    /// Scenario 4: effects removed per action.
    pub effects: usize,
    /// Scenario 6: initial-state atoms removed.
    pub init_atoms: usize,
}

impl Default for TweakParams {
    fn default() -> Self {
        TweakParams {
            preconditions: 2,
            effects: 2,
            init_atoms: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Deletion {
    Precondition { action: String, fluent: String },
    AddEffect { action: String, fluent: String },
    DelEffect { action: String, fluent: String },
    InitAtom { fluent: String },
    Action { action: String },
    /// The scenario wanted something from this action that it lacks.
    Skipped { action: String, reason: &'static str },
}

impl fmt::Display for Deletion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Deletion::Precondition { action, fluent } => write!(f, "precondition {action} {fluent}"),
            Deletion::AddEffect { action, fluent } => write!(f, "add-effect {action} {fluent}"),
            Deletion::DelEffect { action, fluent } => write!(f, "del-effect {action} {fluent}"),
            Deletion::InitAtom { fluent } => write!(f, "init {fluent}"),
            Deletion::Action { action } => write!(f, "action {action}"),
            Deletion::Skipped { action, reason } => write!(f, "skip {action} {reason}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TweakLog {
    pub scenario: u8,
    pub seed: u64,
    pub entries: Vec<Deletion>,
}

impl TweakLog {
    /// Number of entries that actually removed something.
    pub fn deletions(&self) -> usize {
        self.entries
            .iter()
            .filter(|d| !matches!(d, Deletion::Skipped { .. }))
            .count()
    }
}

impl fmt::Display for TweakLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {} seed {}", self.scenario, self.seed)?;
        for e in &self.entries {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Effect {
    Add(usize),
    Del(usize),
}

/// Apply planning scenario `scenario` (1 to 8) to a copy of `problem`.
pub fn tweak_model(
    problem: &PlanningProblem,
    scenario: u8,
    seed: u64,
    params: TweakParams,
) -> Result<(PlanningProblem, TweakLog), PlanningError> {
    if !(1..=8).contains(&scenario) {
        return Err(PlanningError::InvalidScenario(scenario));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = problem.clone();
    let mut log = TweakLog {
        scenario,
        seed,
        entries: Vec::new(),
    };
    let name = |f: usize| problem.fluents[f].to_string();

    if scenario == 8 {
        log.entries
            .extend(out.actions.drain(..).map(|a| Deletion::Action { action: a.id() }));
        return Ok((out, log));
    }
    if scenario == 6 {
        let picked: Vec<usize> = problem
            .init
            .choose_multiple(&mut rng, params.init_atoms)
            .copied()
            .collect();
        out.init.retain(|f| !picked.contains(f));
        let mut sorted = picked;
        sorted.sort_unstable();
        log.entries
            .extend(sorted.into_iter().map(|f| Deletion::InitAtom { fluent: name(f) }));
        return Ok((out, log));
    }

    let (pre_count, eff_count) = match scenario {
        1 => (Some(1), None),
        2 => (None, Some(1)),
        3 => (Some(1), Some(1)),
        4 => (Some(params.preconditions), Some(params.effects)),
        5 => (Some(usize::MAX), None),
        7 => (None, Some(usize::MAX)),
        _ => unreachable!(),
    };
    for a in &mut out.actions {
        let id = a.id();
        if let Some(k) = pre_count {
            if a.pre.is_empty() {
                log.entries.push(Deletion::Skipped {
                    action: id.clone(),
                    reason: "no-precondition",
                });
            } else {
                let mut picked: Vec<usize> = a.pre.choose_multiple(&mut rng, k).copied().collect();
                picked.sort_unstable();
                a.pre.retain(|f| !picked.contains(f));
                log.entries.extend(picked.into_iter().map(|f| Deletion::Precondition {
                    action: id.clone(),
                    fluent: name(f),
                }));
            }
        }
        if let Some(k) = eff_count {
            let effects: Vec<Effect> = a
                .add
                .iter()
                .map(|&f| Effect::Add(f))
                .chain(a.del.iter().map(|&f| Effect::Del(f)))
                .collect();
            if effects.is_empty() {
                log.entries.push(Deletion::Skipped {
                    action: id.clone(),
                    reason: "no-effect",
                });
                continue;
            }
            let picked: Vec<Effect> = effects.choose_multiple(&mut rng, k).copied().collect();
            for e in effects.iter().filter(|e| picked.contains(e)) {
                match *e {
                    Effect::Add(f) => {
                        a.add.retain(|&x| x != f);
                        log.entries.push(Deletion::AddEffect {
                            action: id.clone(),
                            fluent: name(f),
                        });
                    }
                    Effect::Del(f) => {
                        a.del.retain(|&x| x != f);
                        log.entries.push(Deletion::DelEffect {
                            action: id.clone(),
                            fluent: name(f),
                        });
                    }
                }
            }
        }
    }
    Ok((out, log))
}
