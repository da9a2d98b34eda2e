//! The worked reconciliation example: the agent knows
//! (a∨b)∧(¬b∨c)∧(¬c)∧(¬b∨d)∧(¬d), the human knows (¬c)∧(f), and the agent
//! claims `a`.
//!
//!     cargo run --example reconcile_table

use kbrecon::formula::{parse_dimacs, parse_query};
use kbrecon::reconcile::{reconcile_with, verify_explanation, write_text, ReconcileConfig, ReconcileProblem};

const KB_A: &str = include_str!("../data/table/kb_a.cnf");
const KB_H: &str = include_str!("../data/table/kb_h.cnf");
const QUERY: &str = include_str!("../data/table/query.txt");

fn main() {
    let kb_h = parse_dimacs(KB_H).unwrap();
    let query = parse_query(QUERY).unwrap();
    let problem = ReconcileProblem::new(parse_dimacs(KB_A).unwrap(), kb_h.clone(), query.clone());
    let config = ReconcileConfig {
        trace: true,
        ..ReconcileConfig::default()
    };
    let e = reconcile_with(&problem, &config).unwrap();
    for (i, it) in e.trace.iter().enumerate() {
        let seed: Vec<String> = it.seed.iter().map(|id| id.to_string()).collect();
        let mcs = it
            .mcs
            .as_ref()
            .map(|m| m.iter().map(|id| id.to_string()).collect::<Vec<_>>().join(","))
            .unwrap_or_default();
        println!(
            "iteration {}: seed {{{}}} entailed {} mcs {{{}}}",
            i + 1,
            seed.join(","),
            it.entailed,
            mcs
        );
    }
    let v = verify_explanation(&e.reduced_kb_h(&kb_h), &e.support, &query).unwrap();
    print!("{}", write_text(&e, Some(&v)));
}
