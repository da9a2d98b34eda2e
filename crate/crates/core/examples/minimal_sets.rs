//! MUSes, MCSes and the hitting-set duality between them on a small
//! unsatisfiable formula.
//!
//!     cargo run --example minimal_sets

use kbrecon::formula::CnfFormula;
use kbrecon::minimal::{enumerate_all_mcses, enumerate_all_muses, extract_mcs, extract_mus, ClauseIndexSet};

fn show(title: &str, sets: &[kbrecon::minimal::MinimalSet]) {
    let names: Vec<String> = sets.iter().map(|s| s.ids.to_string()).collect();
    println!("{title}: {}", names.join(" "));
}

fn main() {
    // 0: a   1: ¬a   2: b   3: ¬b∨¬a   4: ¬b
    let f = CnfFormula::from_dimacs_clauses(2, &[&[1], &[-1], &[2], &[-2, -1], &[-2]]);
    let soft = f.clauses();
    println!("one MUS: {}", extract_mus(soft, &[]).unwrap().ids);
    println!("one MCS: {}", extract_mcs(soft, &[], &ClauseIndexSet::empty()).unwrap().ids);
    let muses = enumerate_all_muses(soft, &[], usize::MAX).unwrap();
    let mcses = enumerate_all_mcses(soft, &[], usize::MAX).unwrap();
    show("all MUSes", &muses.sets);
    show("all MCSes", &mcses.sets);
    // every MUS meets every MCS
    for mus in &muses.sets {
        assert!(mcses.sets.iter().all(|mcs| mus.ids.intersects(&mcs.ids)));
    }
    println!("every MUS hits every MCS");
}
