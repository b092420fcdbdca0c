//! Separating consecutive levels of the difference hierarchy: for each
//! alternating chain, a partition one level up that is certified not to be
//! one level down.
//!
//!     cargo run --example noncollapse

use fine_hierarchy::hierarchy::{noncollapse_witness, NonCollapse, DEFAULT_SEARCH_BUDGET};
use fine_hierarchy::trees::IterTree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in 1..=4 {
        let small = IterTree::alternating_chain(0, n);
        let big = IterTree::alternating_chain(0, n + 1);
        match noncollapse_witness(&big, &small, 2, DEFAULT_SEARCH_BUDGET)? {
            NonCollapse::Witness(w) => {
                let x = &w.space;
                let values: Vec<String> = (0..x.len())
                    .map(|p| format!("{}={}", x.name(p), w.partition.value(p)))
                    .collect();
                println!("{big} vs {small}");
                println!("  partition: {}", values.join(" "));
                println!("  member search: {}", w.member_stats);
                println!("  refutation search: {}", w.refutation_stats);
            }
            NonCollapse::Unavailable(why) => println!("{big}: unavailable ({why})"),
        }
    }
    Ok(())
}
