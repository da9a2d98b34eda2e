//! A cardinality-minimal subset of a KB that entails a query.
//!
//!     cargo run --example smallest_support

use kbrecon::formula::CnfFormula;
use kbrecon::reconcile::smallest_support;

fn main() {
    // a→b, b→c, a, c∨d, d→c, ¬a∨c: the chain through b needs three clauses,
    // {a, ¬a∨c} and {c∨d, d→c} need two
    let kb = CnfFormula::from_dimacs_clauses(4, &[&[-1, 2], &[-2, 3], &[1], &[3, 4], &[-4, 3], &[-1, 3]]);
    let query = CnfFormula::from_dimacs_clauses(4, &[&[3]]);
    let e = smallest_support(&kb, &query).unwrap();
    println!("support of size {}:", e.support.len());
    for c in &e.support {
        println!("  {c}");
    }
    println!("{} iterations, {} oracle calls", e.stats.iterations, e.stats.oracle_calls);
}
