//! The h-preorder on iterated labeled trees: comparisons with witnesses,
//! duality, and the linearized ranks of alternating chains.
//!
//!     cargo run --example h_preorder

use fine_hierarchy::trees::{self, HComparator, IterTree};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cmp = HComparator::new();
    let t: IterTree = "node(0; 1, node(1; 0))".parse()?;
    let s: IterTree = "node(0; node(1; 0))".parse()?;
    println!("T = {t}\nS = {s}");
    println!("T <=h S: {}   S <=h T: {}", cmp.leq(&t, &s), cmp.leq(&s, &t));
    if let Some(w) = cmp.leq_with_witness(&t, &s) {
        for (from, to) in &w.map {
            println!("  node {from:?} -> {to:?}");
        }
    }
    println!("dual of T = {}", trees::dual(&t, 2)?);

    // Level-2 trees: labels are themselves trees.
    let l2: IterTree = "node(node(0; 1); node(1))".parse()?;
    println!("level of {l2} = {}", trees::iter_level(&l2));

    let chains: Vec<IterTree> = (1..=5)
        .flat_map(|n| [IterTree::alternating_chain(0, n), IterTree::alternating_chain(1, n)])
        .collect();
    for class in trees::linearize(&chains)? {
        let names: Vec<String> = class.members.iter().map(|&i| chains[i].to_string()).collect();
        println!("rank {}: {}", class.rank, names.join(" ~ "));
    }
    println!(
        "T_2(1) trees with <= 4 nodes: {}",
        trees::enumerate_trees(2, 1, 4)?.len()
    );
    Ok(())
}
