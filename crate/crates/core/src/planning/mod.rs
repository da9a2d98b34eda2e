//! STRIPS planning front end: PDDL parsing, grounding, bounded SAT
//! encoding, optimal plans by search, and model tweaks.

pub mod encode;
pub mod explain;
pub mod ground;
pub mod pddl;
pub mod search;
pub mod tweak;

use thiserror::Error;

pub use encode::{
    check_feasibility, encode_bounded, encode_with_layout, optimality_query, BoundedEncoding,
    ClauseTag, Feasibility, VarLayout, VarName,
};
pub use explain::{explain_plan, ExplainConfig, ExplainError, PlanExplanation};
pub use ground::{
    ground, ground_with_cap, Fluent, GroundAction, GroundingStats, PlanningProblem, DEFAULT_GROUNDING_CAP,
};
pub use pddl::{parse_domain, parse_pddl, parse_problem, LiftedTask};
pub use search::{
    optimal_plan_search, parse_plan, reachable_states, validate_plan, write_plan, Plan,
    DEFAULT_STATE_CAP,
};
pub use tweak::{tweak_model, Deletion, TweakLog, TweakParams};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanningError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unsupported PDDL feature: {0}")]
    Unsupported(String),
    #[error("predicate {predicate} takes {expected} arguments, found {found}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("undefined predicate {0}")]
    UndefinedPredicate(String),
    #[error("undefined type {0}")]
    UndefinedType(String),
    #[error("undefined object {0}")]
    UndefinedObject(String),
    #[error("grounding exceeded {0} instantiations")]
    GroundingCapExceeded(usize),
    #[error("search exceeded {0} states")]
    StateCapExceeded(usize),
    #[error("the goal is unreachable")]
    GoalUnreachable,
    #[error("unknown action {0}")]
    UnknownAction(String),
    #[error("plan has {plan} steps but the horizon is {horizon}")]
    PlanLengthMismatch { plan: usize, horizon: usize },
    #[error("the given plan is not valid for the agent model")]
    InvalidPlan,
    #[error("problem fluents differ from the variable layout")]
    LayoutMismatch,
    #[error("planning scenarios are 1 to 8, got {0}")]
    InvalidScenario(u8),
    #[error("the goal is empty")]
    EmptyGoal,
    #[error("the optimality query needs a horizon of at least 1")]
    ZeroHorizon,
}

/// Bundled Blocksworld and toy instances.
pub mod data {
    pub const BLOCKS_DOMAIN: &str = include_str!("../../data/blocksworld/domain.pddl");
    pub const BLOCKS_SUSSMAN: &str = include_str!("../../data/blocksworld/sussman.pddl");
    pub const BLOCKS_TWO: &str = include_str!("../../data/blocksworld/two-blocks.pddl");
    pub const MOVE_DOMAIN: &str = include_str!("../../data/move/domain.pddl");
    pub const MOVE_LINE3: &str = include_str!("../../data/move/line3.pddl");
}
