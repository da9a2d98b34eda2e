//! Explain a shortest Blocksworld plan to a human whose model lost some
//! action details.
//!
//!     cargo run --example plan_explanation -- [scenario 1-8] [seed]

use kbrecon::planning::data::{BLOCKS_DOMAIN, BLOCKS_SUSSMAN};
use kbrecon::planning::{explain_plan, ground, parse_pddl, write_plan, ExplainConfig};

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("numeric argument"));
    let scenario = args.next().unwrap_or(1) as u8;
    let seed = args.next().unwrap_or(1);
    let p = ground(&parse_pddl(BLOCKS_DOMAIN, BLOCKS_SUSSMAN).unwrap()).unwrap();
    let e = explain_plan(&p, &ExplainConfig::new(scenario, seed)).unwrap();
    print!("plan:\n{}", write_plan(&e.plan));
    print!("{}", e.tweak_log);
    if !e.feasibility.feasible {
        println!("infeasible for the human; restored {:?} {:?}", e.restored_actions, e.restored_init);
        for c in &e.repair_clauses {
            println!("  + {}", e.layout().describe_clause(c));
        }
    }
    println!("explanation:");
    for c in &e.explanation.update {
        println!("  {}", e.layout().describe_clause(c));
    }
    println!("verification: {}", e.verification);
}
