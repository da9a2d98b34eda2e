pub mod backbone;
pub mod cli;
pub mod cnf_tweak;
pub mod formula;
pub mod generate;
pub mod hitting_set;
pub mod minimal;
pub mod planning;
pub mod reconcile;
pub mod sat;
