use std::collections::{BTreeSet, HashMap};
use std::fmt;

use log::debug;

use super::pddl::{AtomSchema, LiftedTask};
use super::PlanningError;

/// Ground atom, printed as `on(a,b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fluent {
    pub predicate: String,
    pub args: Vec<String>,
}

impl fmt::Display for Fluent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.predicate, self.args.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub name: String,
    pub args: Vec<String>,
    /// Sorted fluent indices.
    pub pre: Vec<usize>,
    pub add: Vec<usize>,
    pub del: Vec<usize>,
}

impl GroundAction {
    /// Identifier used in variable maps and deletion logs: `stack(a,b)`.
    pub fn id(&self) -> String {
        format!("{}({})", self.name, self.args.join(","))
    }
}

/// PDDL form, as used in plan files: `(stack a b)`.
impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanningProblem {
    pub fluents: Vec<Fluent>,
    pub actions: Vec<GroundAction>,
    /// Sorted fluent indices true initially.
    pub init: Vec<usize>,
    pub goal: Vec<usize>,
}

impl PlanningProblem {
    pub fn fluent_index(&self, f: &Fluent) -> Option<usize> {
        self.fluents.binary_search(f).ok()
    }

    pub fn action_by_id(&self, id: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.id() == id)
    }
}

pub const DEFAULT_GROUNDING_CAP: usize = 1_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundingStats {
    pub instantiations: usize,
    /// Instantiations dropped because an atom is both added and deleted.
    pub contradictory: usize,
}

fn instantiate(atom: &AtomSchema, binding: &HashMap<&str, &str>) -> Fluent {
    Fluent {
        predicate: atom.predicate.clone(),
        args: atom
            .args
            .iter()
            .map(|a| binding.get(a.as_str()).copied().unwrap_or(a).to_string())
            .collect(),
    }
}

/// All type-consistent instantiations of every action schema.
pub fn ground(task: &LiftedTask) -> Result<PlanningProblem, PlanningError> {
    ground_with_cap(task, DEFAULT_GROUNDING_CAP).map(|(p, _)| p)
}

/// name, arguments, pre, add, del
type RawAction = (String, Vec<String>, Vec<Fluent>, Vec<Fluent>, Vec<Fluent>);

pub fn ground_with_cap(
    task: &LiftedTask,
    cap: usize,
) -> Result<(PlanningProblem, GroundingStats), PlanningError> {
    let objects = task.objects();
    let domain = &task.domain;
    let mut stats = GroundingStats::default();
    let mut raw: Vec<RawAction> = Vec::new();
    for schema in &domain.actions {
        let candidates: Vec<Vec<&str>> = schema
            .parameters
            .iter()
            .map(|(_, t)| {
                objects
                    .iter()
                    .filter(|(_, ot)| domain.is_subtype(ot, t))
                    .map(|(o, _)| o.as_str())
                    .collect()
            })
            .collect();
        if candidates.iter().any(Vec::is_empty) {
            continue;
        }
        let mut idx = vec![0usize; candidates.len()];
        loop {
            stats.instantiations += 1;
            if stats.instantiations > cap {
                return Err(PlanningError::GroundingCapExceeded(cap));
            }
            let binding: HashMap<&str, &str> = schema
                .parameters
                .iter()
                .zip(&idx)
                .enumerate()
                .map(|(k, ((p, _), &i))| (p.as_str(), candidates[k][i]))
                .collect();
            let set = |atoms: &[AtomSchema]| -> Vec<Fluent> {
                let s: BTreeSet<Fluent> = atoms.iter().map(|a| instantiate(a, &binding)).collect();
                s.into_iter().collect()
            };
            let (pre, add, del) = (set(&schema.pre), set(&schema.add), set(&schema.del));
            if add.iter().any(|f| del.contains(f)) {
                stats.contradictory += 1;
            } else {
                let args = idx.iter().enumerate().map(|(k, &i)| candidates[k][i].to_string()).collect();
                raw.push((schema.name.clone(), args, pre, add, del));
            }
            // odometer over parameter bindings
            let mut advanced = false;
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < candidates[k].len() {
                    advanced = true;
                    break;
                }
                idx[k] = 0;
            }
            if !advanced {
                break;
            }
        }
    }
    let init: Vec<Fluent> = task
        .problem
        .init
        .iter()
        .map(|a| instantiate(a, &HashMap::new()))
        .collect();
    let goal: Vec<Fluent> = task
        .problem
        .goal
        .iter()
        .map(|a| instantiate(a, &HashMap::new()))
        .collect();
    let mut all: BTreeSet<Fluent> = init.iter().chain(&goal).cloned().collect();
    for (_, _, pre, add, del) in &raw {
        all.extend(pre.iter().chain(add).chain(del).cloned());
    }
    let fluents: Vec<Fluent> = all.into_iter().collect();
    let index = |f: &Fluent| fluents.binary_search(f).unwrap();
    let indices = |fs: &[Fluent]| -> Vec<usize> {
        let mut v: Vec<usize> = fs.iter().map(index).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let actions = raw
        .iter()
        .map(|(name, args, pre, add, del)| GroundAction {
            name: name.clone(),
            args: args.clone(),
            pre: indices(pre),
            add: indices(add),
            del: indices(del),
        })
        .collect();
    let problem = PlanningProblem {
        init: indices(&init),
        goal: indices(&goal),
        actions,
        fluents,
    };
    debug!(
        "grounded {} actions over {} fluents ({} contradictory instantiations dropped)",
        problem.actions.len(),
        problem.fluents.len(),
        stats.contradictory
    );
    Ok((problem, stats))
}
