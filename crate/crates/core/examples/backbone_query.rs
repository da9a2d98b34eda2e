//! Backbone literals of a KB and a seeded query sampled from them.
//!
//!     cargo run --example backbone_query -- [k] [seed]

use kbrecon::backbone::{compute_backbone, sample_backbone};
use kbrecon::formula::write_literal_list;
use kbrecon::generate::{planted_kb, PlantedShape};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("numeric argument"));
    let k = args.next().unwrap_or(5) as usize;
    let seed = args.next().unwrap_or(1);
    let shape = PlantedShape {
        num_vars: 80,
        num_clauses: 250,
        chains: 4,
        chain_len: 5,
    };
    let kb = planted_kb(&mut ChaCha8Rng::seed_from_u64(seed), shape);
    let bb = compute_backbone(&kb).unwrap();
    println!("{} clauses, backbone of {} literals in {} SAT calls", kb.len(), bb.len(), bb.oracle_calls);
    print!("{}", write_literal_list(&sample_backbone(&bb, k, seed)));
}
