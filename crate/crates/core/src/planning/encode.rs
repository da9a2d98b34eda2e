//! Bounded planning as CNF with explanatory frame axioms and exactly one
//! action per step.
//!
//! Variables for horizon `n` with `F` fluents and `A` actions:
//! `f@t = 1 + t·F + f` for `t ≤ n`, then `a@t` in blocks of `A` per step,
//! then one goal aggregate per step when the goal has several fluents.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::formula::{Clause, CnfFormula, Literal, Pushed};
use crate::sat::{Model, SatSession, SolveResult};

use super::ground::PlanningProblem;
use super::search::Plan;
use super::PlanningError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarName {
    Fluent { fluent: usize, step: usize },
    Action { action: usize, step: usize },
    Goal { step: usize },
}

/// Variable numbering shared by every encoding of one reference problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarLayout {
    pub horizon: usize,
    pub fluent_names: Vec<String>,
    pub action_names: Vec<String>,
    pub goal: Vec<usize>,
    action_index: HashMap<String, usize>,
}

impl VarLayout {
    pub fn new(problem: &PlanningProblem, horizon: usize) -> Self {
        let action_names: Vec<String> = problem.actions.iter().map(|a| a.id()).collect();
        VarLayout {
            horizon,
            fluent_names: problem.fluents.iter().map(|f| f.to_string()).collect(),
            action_index: action_names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect(),
            action_names,
            goal: problem.goal.clone(),
        }
    }

    pub fn num_fluents(&self) -> usize {
        self.fluent_names.len()
    }

    pub fn num_actions(&self) -> usize {
        self.action_names.len()
    }

    pub fn has_goal_aggregates(&self) -> bool {
        self.goal.len() > 1
    }

    fn action_base(&self) -> usize {
        1 + (self.horizon + 1) * self.num_fluents()
    }

    fn goal_base(&self) -> usize {
        self.action_base() + self.horizon * self.num_actions()
    }

    pub fn num_vars(&self) -> u32 {
        let aggregates = if self.has_goal_aggregates() { self.horizon } else { 0 };
        (self.goal_base() + aggregates - 1) as u32
    }

    pub fn fluent_var(&self, fluent: usize, step: usize) -> u32 {
        debug_assert!(fluent < self.num_fluents() && step <= self.horizon);
        (1 + step * self.num_fluents() + fluent) as u32
    }

    pub fn action_var(&self, action: usize, step: usize) -> u32 {
        debug_assert!(action < self.num_actions() && step < self.horizon);
        (self.action_base() + step * self.num_actions() + action) as u32
    }

    /// Variable standing for "the goal holds at `step`".
    pub fn goal_var(&self, step: usize) -> u32 {
        if self.has_goal_aggregates() {
            (self.goal_base() + step) as u32
        } else {
            self.fluent_var(self.goal[0], step)
        }
    }

    pub fn action_index(&self, id: &str) -> Option<usize> {
        self.action_index.get(id).copied()
    }

    pub fn name_of(&self, var: u32) -> Option<VarName> {
        let v = var as usize;
        let (nf, na) = (self.num_fluents(), self.num_actions());
        if v == 0 {
            None
        } else if v < self.action_base() {
            Some(VarName::Fluent {
                fluent: (v - 1) % nf,
                step: (v - 1) / nf,
            })
        } else if v < self.goal_base() {
            let o = v - self.action_base();
            Some(VarName::Action {
                action: o % na,
                step: o / na,
            })
        } else if var <= self.num_vars() {
            Some(VarName::Goal {
                step: v - self.goal_base(),
            })
        } else {
            None
        }
    }

    pub fn describe_var(&self, var: u32) -> String {
        match self.name_of(var) {
            Some(VarName::Fluent { fluent, step }) => format!("{}@{step}", self.fluent_names[fluent]),
            Some(VarName::Action { action, step }) => format!("{}@{step}", self.action_names[action]),
            Some(VarName::Goal { step }) => format!("goal@{step}"),
            None => format!("x{var}"),
        }
    }

    pub fn describe_clause(&self, clause: &Clause) -> String {
        if clause.is_empty() {
            return "⊥".to_string();
        }
        let lits: Vec<String> = clause
            .lits()
            .iter()
            .map(|l| {
                let name = self.describe_var(l.var());
                if l.is_positive() {
                    name
                } else {
                    format!("¬{name}")
                }
            })
            .collect();
        lits.join(" ∨ ")
    }

    /// Sidecar text: one `<var> <name>@<t>` line per variable.
    pub fn write_var_map(&self) -> String {
        let mut out = String::new();
        for v in 1..=self.num_vars() {
            writeln!(out, "{v} {}", self.describe_var(v)).unwrap();
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClauseTag {
    Init,
    Goal,
    Precondition { action: usize, step: usize },
    AddEffect { action: usize, step: usize },
    DelEffect { action: usize, step: usize },
    /// A fluent becomes true only through one of its adders.
    FrameAdd { fluent: usize, step: usize },
    /// A fluent becomes false only through one of its deleters.
    FrameDel { fluent: usize, step: usize },
    AtLeastOne { step: usize },
    AtMostOne { step: usize },
    GoalDefinition { step: usize },
}

impl ClauseTag {
    /// Clauses describing what actions do, as opposed to init, goal and
    /// goal-aggregate definitions.
    pub fn is_action_dynamics(self) -> bool {
        !matches!(self, ClauseTag::Init | ClauseTag::Goal | ClauseTag::GoalDefinition { .. })
    }
}

#[derive(Clone, Debug)]
pub struct BoundedEncoding {
    pub layout: VarLayout,
    pub cnf: CnfFormula,
    /// Tag of each clause of `cnf`, by position.
    pub tags: Vec<ClauseTag>,
    pub include_goal: bool,
    goal_defined: bool,
}

impl BoundedEncoding {
    pub fn horizon(&self) -> usize {
        self.layout.horizon
    }

    fn push(&mut self, lits: impl IntoIterator<Item = Literal>, tag: ClauseTag) {
        if let Pushed::New(_) = self.cnf.push_lits(lits) {
            self.tags.push(tag);
        }
    }

    pub fn tag_of(&self, clause: &Clause) -> Option<ClauseTag> {
        self.cnf.find(clause).map(|id| self.tags[id.0])
    }

    /// Action indices (in layout order) of the plan encoded by `model`.
    pub fn decode_plan(&self, model: &Model) -> Vec<usize> {
        (0..self.horizon())
            .filter_map(|t| {
                (0..self.layout.num_actions()).find(|&a| model.value(self.layout.action_var(a, t)))
            })
            .collect()
    }
}

/// Encode `problem` at horizon `n` with its own variable layout.
pub fn encode_bounded(problem: &PlanningProblem, n: usize, include_goal: bool) -> BoundedEncoding {
    let layout = VarLayout::new(problem, n);
    encode_with_layout(problem, &layout, include_goal).expect("a problem fits its own layout")
}

/// Encode `problem` using the variables of `layout`, which must come from a
/// problem over the same fluents whose actions include those of `problem`.
pub fn encode_with_layout(
    problem: &PlanningProblem,
    layout: &VarLayout,
    include_goal: bool,
) -> Result<BoundedEncoding, PlanningError> {
    let names: Vec<String> = problem.fluents.iter().map(|f| f.to_string()).collect();
    if names != layout.fluent_names {
        return Err(PlanningError::LayoutMismatch);
    }
    let slots: Vec<usize> = problem
        .actions
        .iter()
        .map(|a| layout.action_index(&a.id()).ok_or_else(|| PlanningError::UnknownAction(a.id())))
        .collect::<Result<_, _>>()?;
    let n = layout.horizon;
    let nf = layout.num_fluents();
    let mut enc = BoundedEncoding {
        layout: layout.clone(),
        cnf: CnfFormula::new(layout.num_vars()),
        tags: Vec::new(),
        include_goal,
        goal_defined: false,
    };
    let fv = |f: usize, t: usize| layout.fluent_var(f, t);
    let av = |a: usize, t: usize| layout.action_var(slots[a], t);

    for f in 0..nf {
        let lit = Literal::new(fv(f, 0), problem.init.binary_search(&f).is_ok());
        enc.push([lit], ClauseTag::Init);
    }
    if include_goal {
        for &g in &problem.goal {
            enc.push([Literal::pos(fv(g, n))], ClauseTag::Goal);
        }
    }
    let mut adders = vec![Vec::new(); nf];
    let mut deleters = vec![Vec::new(); nf];
    for (i, a) in problem.actions.iter().enumerate() {
        for &f in &a.add {
            adders[f].push(i);
        }
        for &f in &a.del {
            deleters[f].push(i);
        }
    }
    for t in 0..n {
        for (i, a) in problem.actions.iter().enumerate() {
            let act = Literal::neg(av(i, t));
            let action = slots[i];
            for &p in &a.pre {
                enc.push([act, Literal::pos(fv(p, t))], ClauseTag::Precondition { action, step: t });
            }
            for &e in &a.add {
                enc.push([act, Literal::pos(fv(e, t + 1))], ClauseTag::AddEffect { action, step: t });
            }
            for &d in &a.del {
                enc.push([act, Literal::neg(fv(d, t + 1))], ClauseTag::DelEffect { action, step: t });
            }
        }
        for f in 0..nf {
            let mut up = vec![Literal::pos(fv(f, t)), Literal::neg(fv(f, t + 1))];
            up.extend(adders[f].iter().map(|&i| Literal::pos(av(i, t))));
            enc.push(up, ClauseTag::FrameAdd { fluent: f, step: t });
            let mut down = vec![Literal::neg(fv(f, t)), Literal::pos(fv(f, t + 1))];
            down.extend(deleters[f].iter().map(|&i| Literal::pos(av(i, t))));
            enc.push(down, ClauseTag::FrameDel { fluent: f, step: t });
        }
        let all: Vec<Literal> = (0..problem.actions.len()).map(|i| Literal::pos(av(i, t))).collect();
        enc.push(all, ClauseTag::AtLeastOne { step: t });
        for i in 0..problem.actions.len() {
            for j in i + 1..problem.actions.len() {
                enc.push(
                    [Literal::neg(av(i, t)), Literal::neg(av(j, t))],
                    ClauseTag::AtMostOne { step: t },
                );
            }
        }
    }
    Ok(enc)
}

/// The claim "no plan shorter than the horizon reaches the goal":
/// `⋀_{t<n} ¬g_t`. For goals with several fluents this first adds the
/// definitions `g_t ↔ ⋀ G@t` to `enc`.
pub fn optimality_query(enc: &mut BoundedEncoding) -> Result<CnfFormula, PlanningError> {
    let n = enc.horizon();
    if n == 0 {
        return Err(PlanningError::ZeroHorizon);
    }
    if enc.layout.goal.is_empty() {
        return Err(PlanningError::EmptyGoal);
    }
    let layout = enc.layout.clone();
    if layout.has_goal_aggregates() && !enc.goal_defined {
        for t in 0..n {
            let g = layout.goal_var(t);
            for &f in &layout.goal {
                enc.push(
                    [Literal::neg(g), Literal::pos(layout.fluent_var(f, t))],
                    ClauseTag::GoalDefinition { step: t },
                );
            }
            let mut back = vec![Literal::pos(g)];
            back.extend(layout.goal.iter().map(|&f| Literal::neg(layout.fluent_var(f, t))));
            enc.push(back, ClauseTag::GoalDefinition { step: t });
        }
        enc.goal_defined = true;
    }
    let mut phi = CnfFormula::new(layout.num_vars());
    for t in 0..n {
        phi.push(Clause::unit(Literal::neg(layout.goal_var(t))));
    }
    Ok(phi)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feasibility {
    pub feasible: bool,
    /// Action-dynamics clauses of the reference encoding that mention a plan
    /// step and are absent from the checked encoding.
    pub missing: Vec<Clause>,
}

/// Whether `plan` can be executed in `enc` and reach the goal at its horizon.
pub fn check_feasibility(
    enc: &BoundedEncoding,
    plan: &Plan,
    reference: Option<&BoundedEncoding>,
) -> Result<Feasibility, PlanningError> {
    let layout = &enc.layout;
    if plan.len() != layout.horizon {
        return Err(PlanningError::PlanLengthMismatch {
            plan: plan.len(),
            horizon: layout.horizon,
        });
    }
    let mut step_vars = Vec::with_capacity(plan.len());
    for (t, a) in plan.steps.iter().enumerate() {
        let idx = layout.action_index(&a.id()).ok_or_else(|| PlanningError::UnknownAction(a.id()))?;
        step_vars.push(layout.action_var(idx, t));
    }
    let mut assumptions: Vec<Literal> = step_vars.iter().map(|&v| Literal::pos(v)).collect();
    if !enc.include_goal {
        assumptions.extend(layout.goal.iter().map(|&g| Literal::pos(layout.fluent_var(g, layout.horizon))));
    }
    let mut session = SatSession::new(layout.num_vars());
    for c in enc.cnf.clauses() {
        session.add_hard(c);
    }
    let feasible = matches!(session.solve(&assumptions), SolveResult::Sat(_));
    let missing = match (feasible, reference) {
        (false, Some(r)) => r
            .cnf
            .clauses()
            .iter()
            .zip(&r.tags)
            .filter(|(c, tag)| {
                tag.is_action_dynamics()
                    && c.lits().iter().any(|l| step_vars.contains(&l.var()))
                    && !enc.cnf.contains(c)
            })
            .map(|(c, _)| c.clone())
            .collect(),
        _ => Vec::new(),
    };
    Ok(Feasibility { feasible, missing })
}
