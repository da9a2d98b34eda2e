//! Explaining why a plan is feasible and optimal to someone whose model of
//! the domain is a tweaked copy of the agent's.

use std::time::Duration;

use thiserror::Error;

use crate::formula::{Clause, CnfFormula, NegationError};
use crate::reconcile::{
    reconcile_with, verify_explanation, Explanation, Mode, ReconcileConfig, ReconcileError,
    ReconcileProblem, VerificationReport,
};

use super::encode::{check_feasibility, encode_with_layout, optimality_query, BoundedEncoding, Feasibility, VarLayout};
use super::ground::PlanningProblem;
use super::search::{optimal_plan_search, validate_plan, Plan, DEFAULT_STATE_CAP};
use super::tweak::{tweak_model, TweakLog, TweakParams};
use super::PlanningError;

#[derive(Clone, Debug)]
pub struct ExplainConfig {
    pub scenario: u8,
    pub seed: u64,
    pub params: TweakParams,
    pub mode: Mode,
    pub time_limit: Option<Duration>,
    pub state_cap: usize,
    /// Use this plan instead of searching for an optimal one.
    pub plan: Option<Plan>,
}

impl ExplainConfig {
    pub fn new(scenario: u8, seed: u64) -> Self {
        ExplainConfig {
            scenario,
            seed,
            params: TweakParams::default(),
            mode: Mode::Restricted,
            time_limit: None,
            state_cap: DEFAULT_STATE_CAP,
            plan: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error(transparent)]
    Planning(#[from] PlanningError),
    #[error(transparent)]
    Reconcile(#[from] ReconcileError),
    #[error(transparent)]
    Query(#[from] NegationError),
}

#[derive(Clone, Debug)]
pub struct PlanExplanation {
    pub plan: Plan,
    pub tweak_log: TweakLog,
    /// Agent encoding without goal units, with goal definitions.
    pub kb_a: BoundedEncoding,
    /// Human encoding after any feasibility repair.
    pub kb_h: BoundedEncoding,
    pub query: CnfFormula,
    /// Feasibility of the plan in the unrepaired human model.
    pub feasibility: Feasibility,
    /// Plan actions whose human definitions were replaced by the agent's.
    pub restored_actions: Vec<String>,
    /// Initial-state atoms put back when restoring actions was not enough.
    pub restored_init: Vec<String>,
    /// Clauses the repair added to the human encoding.
    pub repair_clauses: Vec<Clause>,
    pub feasible_after_repair: bool,
    pub explanation: Explanation,
    pub verification: VerificationReport,
}

impl PlanExplanation {
    pub fn layout(&self) -> &VarLayout {
        &self.kb_a.layout
    }

    pub fn horizon(&self) -> usize {
        self.plan.len()
    }
}

/// Give the human model the agent's definition of every action the plan uses.
fn restore_plan_actions(agent: &PlanningProblem, human: &PlanningProblem, plan: &Plan) -> (PlanningProblem, Vec<String>) {
    let mut repaired = human.clone();
    let mut restored = Vec::new();
    for step in &plan.steps {
        let id = step.id();
        let Some(ai) = agent.action_by_id(&id) else { continue };
        let reference = &agent.actions[ai];
        match repaired.action_by_id(&id) {
            Some(hi) if repaired.actions[hi] == *reference => {}
            Some(hi) => {
                repaired.actions[hi] = reference.clone();
                restored.push(id);
            }
            None => {
                // keep the agent's action order
                let pos = repaired
                    .actions
                    .iter()
                    .position(|a| agent.action_by_id(&a.id()).is_some_and(|j| j > ai))
                    .unwrap_or(repaired.actions.len());
                repaired.actions.insert(pos, reference.clone());
                restored.push(id);
            }
        }
    }
    (repaired, restored)
}

fn encode_pair(
    problem: &PlanningProblem,
    layout: &VarLayout,
) -> Result<(BoundedEncoding, CnfFormula), PlanningError> {
    let mut enc = encode_with_layout(problem, layout, false)?;
    let phi = optimality_query(&mut enc)?;
    Ok((enc, phi))
}

pub fn explain_plan(agent: &PlanningProblem, config: &ExplainConfig) -> Result<PlanExplanation, ExplainError> {
    let plan = match &config.plan {
        Some(p) => {
            if !validate_plan(agent, p) {
                return Err(PlanningError::InvalidPlan.into());
            }
            p.clone()
        }
        None => optimal_plan_search(agent, config.state_cap)?,
    };
    let n = plan.len();
    let layout = VarLayout::new(agent, n);
    let (human, tweak_log) = tweak_model(agent, config.scenario, config.seed, config.params)?;

    let (kb_a, query) = encode_pair(agent, &layout)?;
    let goal_a = encode_with_layout(agent, &layout, true)?;
    let goal_h = encode_with_layout(&human, &layout, true)?;
    let feasibility = check_feasibility(&goal_h, &plan, Some(&goal_a))?;

    let (kb_h, _) = encode_pair(&human, &layout)?;
    let mut restored_init = Vec::new();
    let (kb_h, restored_actions, repair_clauses, feasible_after_repair) = if feasibility.feasible {
        (kb_h, Vec::new(), Vec::new(), true)
    } else {
        let (mut repaired, restored) = restore_plan_actions(agent, &human, &plan);
        let mut goal_r = encode_with_layout(&repaired, &layout, true)?;
        let mut ok = check_feasibility(&goal_r, &plan, None)?.feasible;
        if !ok && repaired.init != agent.init {
            restored_init = agent
                .init
                .iter()
                .filter(|f| !repaired.init.contains(f))
                .map(|&f| agent.fluents[f].to_string())
                .collect();
            repaired.init = agent.init.clone();
            goal_r = encode_with_layout(&repaired, &layout, true)?;
            ok = check_feasibility(&goal_r, &plan, None)?.feasible;
        }
        let (kb_r, _) = encode_pair(&repaired, &layout)?;
        let added: Vec<Clause> = kb_r
            .cnf
            .clauses()
            .iter()
            .filter(|c| !kb_h.cnf.contains(c))
            .cloned()
            .collect();
        (kb_r, restored, added, ok)
    };

    let problem = ReconcileProblem::new(kb_a.cnf.clone(), kb_h.cnf.clone(), query.clone()).with_mode(config.mode);
    let rc = ReconcileConfig {
        time_limit: config.time_limit,
        ..ReconcileConfig::default()
    };
    let explanation = reconcile_with(&problem, &rc)?;
    let verification = verify_explanation(&explanation.reduced_kb_h(&kb_h.cnf), &explanation.support, &query)?;
    Ok(PlanExplanation {
        plan,
        tweak_log,
        kb_a,
        kb_h,
        query,
        feasibility,
        restored_actions,
        restored_init,
        repair_clauses,
        feasible_after_repair,
        explanation,
        verification,
    })
}
