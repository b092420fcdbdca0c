//! T-families on the cylinder model: tilde components, the mind-change
//! evaluation, reduction, and a space where reduction is impossible.
//!
//!     cargo run --example families_reduce

use std::sync::Arc;

use fine_hierarchy::families::{format_path, parse_family, TFamily};
use fine_hierarchy::spaces::{parse_set, SpaceModel};
use fine_hierarchy::trees::IterTree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = Arc::new(SpaceModel::cylinder(2, 2)?);
    let shape: IterTree = "node(0; 1, 2)".parse()?;
    // Two overlapping cones: [.] covers everything, [0] a subtree.
    let f = TFamily::from_layer0(
        x.clone(),
        shape,
        3,
        [(vec![0], parse_set(&x, "{[0]}")?), (vec![1], parse_set(&x, "{[.]}")?)],
    )?;
    println!("input family:\n{f}");
    println!("reduced: {}", f.is_reduced());
    for p in f.paths() {
        println!("  tilde {} = {:?}", format_path(&p), f.tilde(&p)?);
    }
    match f.determine() {
        Ok(a) => println!("determines {:?}", a.values()),
        Err(u) => println!("determines nothing: {u:?}"),
    }

    let r = f.reduce_family()?;
    println!("\nreduct:\n{r}");
    println!(
        "reduced: {}, determines {:?}",
        r.is_reduced(),
        r.determine().map(|a| a.values().to_vec())
    );
    for pt in [0, 1, 2] {
        let ev = r.evaluate(pt);
        println!("  point {} -> {:?}", x.name(pt), ev.value());
    }

    // On a V-shaped poset two open sets sharing the top cannot be separated.
    let v = Arc::new(SpaceModel::poset(&["b", "c", "a"], &[(0, 2), (1, 2)])?);
    let g = parse_family(v, "node(0; 1, 2)\n0 => {b, a}\n1 => {c, a}\n")?;
    match g.reduce_family() {
        Ok(_) => println!("\nV-poset family reduced (unexpected)"),
        Err(e) => println!("\nV-poset family: {e}"),
    }
    Ok(())
}
