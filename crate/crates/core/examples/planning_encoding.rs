//! Ground a Blocksworld task, find a shortest plan by search, and probe the
//! bounded SAT encoding around that length.
//!
//!     cargo run --example planning_encoding

use kbrecon::planning::data::{BLOCKS_DOMAIN, BLOCKS_SUSSMAN};
use kbrecon::planning::{
    encode_bounded, ground_with_cap, optimal_plan_search, optimality_query, parse_pddl, reachable_states, write_plan,
    Plan, DEFAULT_GROUNDING_CAP, DEFAULT_STATE_CAP,
};
use kbrecon::sat::{SatSession, SolveResult};

fn main() {
    let task = parse_pddl(BLOCKS_DOMAIN, BLOCKS_SUSSMAN).unwrap();
    let (p, stats) = ground_with_cap(&task, DEFAULT_GROUNDING_CAP).unwrap();
    println!(
        "{} fluents, {} actions ({} contradictory instantiations dropped), {} reachable states",
        p.fluents.len(),
        p.actions.len(),
        stats.contradictory,
        reachable_states(&p, DEFAULT_STATE_CAP).unwrap()
    );
    let plan = optimal_plan_search(&p, DEFAULT_STATE_CAP).unwrap();
    print!("shortest plan:\n{}", write_plan(&plan));

    for n in plan.len() - 1..=plan.len() {
        let enc = encode_bounded(&p, n, true);
        let mut s = SatSession::new(enc.layout.num_vars());
        for c in enc.cnf.clauses() {
            s.add_hard(c);
        }
        match s.solve(&[]) {
            SolveResult::Sat(model) => {
                let steps = enc.decode_plan(&model).into_iter().map(|i| p.actions[i].clone()).collect();
                print!("horizon {n}: satisfiable, decoded plan\n{}", write_plan(&Plan { steps }));
            }
            SolveResult::Unsat(_) => println!("horizon {n}: unsatisfiable"),
        }
    }
    let mut enc = encode_bounded(&p, plan.len(), false);
    let phi = optimality_query(&mut enc).unwrap();
    println!("optimality query: {} literals over {} clauses", phi.len(), enc.cnf.len());
}
