//! Extracting a tree-indexed family of open sets from a mind-change
//! machine, and checking it against the limit partition.
//!
//!     cargo run --example hausdorff_extract

use fine_hierarchy::hausdorff::{hausdorff_extract, limit_partition, max_mind_changes, GuessTable};
use fine_hierarchy::spaces::string_name;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Guess the number of 1s seen so far, capped at 2.
    let g = GuessTable::new(3, 2, 4, |s| s.iter().filter(|&&c| c == 1).count().min(2) as u32)?;
    let m = g.machine();
    let e = hausdorff_extract(&m)?;
    for (n, level) in e.r.levels.iter().enumerate() {
        let names: Vec<String> = level
            .iter()
            .map(|c| format!("{}:{}", string_name(&c.string), c.value))
            .collect();
        println!("R{n}: {}", names.join(" "));
    }
    println!("tree: {}", e.tree);
    println!("family:\n{}", e.family);
    let limit = limit_partition(&m)?;
    println!("matches limit on all points: {}", limit.same_values(&e.partition));
    println!("worst-case mind changes: {}", max_mind_changes(&g));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let random = GuessTable::random(2, 2, 6, &mut rng)?;
    let e = hausdorff_extract(&random.machine())?;
    println!(
        "\nrandom table: {} R-levels, {} mind changes, tree with {} nodes",
        e.r.len(),
        max_mind_changes(&random),
        e.tree.node_count()
    );
    Ok(())
}
