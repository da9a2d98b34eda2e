//! Scenario 9 on a generated ~1000-clause KB with a 5-literal backbone query.
//!
//!     cargo run --release --example scale_trend -- [seed]

use std::time::Duration;

use kbrecon::backbone::{compute_backbone, sample_backbone};
use kbrecon::cnf_tweak::tweak_cnf;
use kbrecon::formula::{Clause, CnfFormula};
use kbrecon::generate::{planted_kb, PlantedShape};
use kbrecon::reconcile::{reconcile_with, verify_explanation, ReconcileConfig, ReconcileProblem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kb_a = planted_kb(&mut rng, PlantedShape::default());
    let bb = compute_backbone(&kb_a).expect("planted KB is satisfiable");
    let mut query = CnfFormula::new(kb_a.num_vars());
    for l in sample_backbone(&bb, 5, seed) {
        query.push(Clause::unit(l));
    }
    let (kb_h, log) = tweak_cnf(&kb_a, 9, seed).unwrap();
    println!(
        "kb_a {} clauses, backbone {}, kb_h {} clauses, {} removed",
        kb_a.len(),
        bb.len(),
        kb_h.len(),
        log.removed()
    );
    let problem = ReconcileProblem::new(kb_a, kb_h.clone(), query.clone());
    let e = reconcile_with(&problem, &ReconcileConfig::with_time_limit(Duration::from_secs(1500)))
        .expect("reconcile");
    let report = verify_explanation(&e.reduced_kb_h(&kb_h), &e.support, &query).unwrap();
    println!(
        "update {} support {} iterations {} mcs {} oracle calls {} in {:?}",
        e.update.len(),
        e.support.len(),
        e.stats.iterations,
        e.stats.mcs_count,
        e.stats.oracle_calls,
        e.stats.elapsed
    );
    println!("{report}");
}
