use std::collections::{HashMap, VecDeque};

use super::ground::{GroundAction, PlanningProblem};
use super::PlanningError;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<GroundAction>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// One `(name arg ...)` per line.
pub fn write_plan(plan: &Plan) -> String {
    plan.steps.iter().map(|a| format!("{a}\n")).collect()
}

/// Read a plan file against the actions of `problem`. Blank lines and `;`
/// comments are skipped.
pub fn parse_plan(text: &str, problem: &PlanningProblem) -> Result<Plan, PlanningError> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split(';').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let inner = line
            .strip_prefix('(')
            .and_then(|l| l.strip_suffix(')'))
            .ok_or_else(|| PlanningError::Syntax {
                line: i + 1,
                message: format!("expected `(action args...)`, found `{line}`"),
            })?;
        let mut words = inner.split_whitespace().map(str::to_lowercase);
        let name = words.next().unwrap_or_default();
        let args: Vec<String> = words.collect();
        let id = format!("{name}({})", args.join(","));
        let idx = problem.action_by_id(&id).ok_or(PlanningError::UnknownAction(id))?;
        steps.push(problem.actions[idx].clone());
    }
    Ok(Plan { steps })
}

fn applicable(state: &[bool], a: &GroundAction) -> bool {
    a.pre.iter().all(|&p| state[p])
}

fn apply(state: &mut [bool], a: &GroundAction) {
    for &d in &a.del {
        state[d] = false;
    }
    for &e in &a.add {
        state[e] = true;
    }
}

fn initial_state(problem: &PlanningProblem) -> Vec<bool> {
    let mut s = vec![false; problem.fluents.len()];
    for &f in &problem.init {
        s[f] = true;
    }
    s
}

/// Simulate `plan` from the initial state; each step must be applicable and
/// the final state must contain the goal.
pub fn validate_plan(problem: &PlanningProblem, plan: &Plan) -> bool {
    let mut state = initial_state(problem);
    for step in &plan.steps {
        let Some(i) = problem.action_by_id(&step.id()) else {
            return false;
        };
        let a = &problem.actions[i];
        if !applicable(&state, a) {
            return false;
        }
        apply(&mut state, a);
    }
    problem.goal.iter().all(|&g| state[g])
}

pub const DEFAULT_STATE_CAP: usize = 100_000;

/// Shortest plan by breadth-first search over states.
pub fn optimal_plan_search(problem: &PlanningProblem, cap: usize) -> Result<Plan, PlanningError> {
    let start = initial_state(problem);
    let is_goal = |s: &[bool]| problem.goal.iter().all(|&g| s[g]);
    // state -> (parent state, action)
    let mut parent: HashMap<Vec<bool>, Option<(Vec<bool>, usize)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(state) = queue.pop_front() {
        if is_goal(&state) {
            let mut steps = Vec::new();
            let mut cur = state;
            while let Some(Some((prev, a))) = parent.get(&cur) {
                steps.push(problem.actions[*a].clone());
                cur = prev.clone();
            }
            steps.reverse();
            return Ok(Plan { steps });
        }
        for (i, a) in problem.actions.iter().enumerate() {
            if !applicable(&state, a) {
                continue;
            }
            let mut next = state.clone();
            apply(&mut next, a);
            if parent.contains_key(&next) {
                continue;
            }
            if parent.len() >= cap {
                return Err(PlanningError::StateCapExceeded(cap));
            }
            parent.insert(next.clone(), Some((state.clone(), i)));
            queue.push_back(next);
        }
    }
    Err(PlanningError::GoalUnreachable)
}

/// Number of states reachable from the initial state, up to `cap`.
pub fn reachable_states(problem: &PlanningProblem, cap: usize) -> Result<usize, PlanningError> {
    let start = initial_state(problem);
    let mut seen = std::collections::HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(state) = queue.pop_front() {
        for a in &problem.actions {
            if applicable(&state, a) {
                let mut next = state.clone();
                apply(&mut next, a);
                if seen.insert(next.clone()) {
                    if seen.len() > cap {
                        return Err(PlanningError::StateCapExceeded(cap));
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(seen.len())
}
