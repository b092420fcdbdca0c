//! Deciding A ∈ Σ(X, T) by exhaustive witness search and classifying a
//! partition against a list of candidate trees.
//!
//!     cargo run --example membership_search

use std::sync::Arc;

use fine_hierarchy::families::KPartition;
use fine_hierarchy::hierarchy::{classify, search_witness, DEFAULT_SEARCH_BUDGET};
use fine_hierarchy::spaces::SpaceModel;
use fine_hierarchy::trees;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = Arc::new(SpaceModel::cylinder(2, 2)?);
    // 1 on the strings starting with 1, 0 elsewhere, except 11 which is 0.
    let a = KPartition::from_fn(x.clone(), 2, |p| {
        let s = x.string_of(p).unwrap();
        u32::from(s.first() == Some(&1) && s != [1, 1])
    })?;
    let t: trees::IterTree = "node(0; node(1; 0))".parse()?;
    let r = search_witness(&a, &t, DEFAULT_SEARCH_BUDGET);
    println!("A against {t}: {} ({})", r.status.name(), r.stats);
    if let Some(w) = r.status.witness() {
        println!("witness:\n{w}");
    }

    let candidates = trees::enumerate_trees(2, 1, 3)?;
    let c = classify(&a, &candidates, DEFAULT_SEARCH_BUDGET);
    for e in &c.entries {
        println!("{:<24} {}", e.tree.to_string(), e.result.status.name());
    }
    let minimal: Vec<String> = c.minimal_trees().iter().map(|t| t.to_string()).collect();
    println!("minimal levels: {}", minimal.join(", "));
    println!("monotonicity violations: {}", c.violations.len());
    Ok(())
}
