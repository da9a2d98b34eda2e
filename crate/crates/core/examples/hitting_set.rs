//! Exact minimum hitting sets, grown one set at a time as the
//! reconciliation loop does.
//!
//!     cargo run --example hitting_set

use kbrecon::hitting_set::HittingSetInstance;
use kbrecon::minimal::ClauseIndexSet;

fn main() {
    let mut hs = HittingSetInstance::with_universe(6);
    for set in [vec![0], vec![1, 3], vec![1, 4], vec![2, 5], vec![3, 4, 5]] {
        hs.add_set(ClauseIndexSet::new(set.clone())).unwrap();
        println!("after {:?}: minimum hitting set {}", set, hs.min_hitting_set());
    }
    println!("{:?}", hs.add_set(ClauseIndexSet::new([9])));
}
