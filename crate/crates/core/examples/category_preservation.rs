//! The Baire-category image f[S] and preservation of levels along an open
//! continuous surjection.
//!
//!     cargo run --example category_preservation

use std::sync::Arc;

use fine_hierarchy::category::{category_image, check_baire, check_preservation, Sampling};
use fine_hierarchy::families::KPartition;
use fine_hierarchy::hierarchy::DEFAULT_SEARCH_BUDGET;
use fine_hierarchy::spaces::{format_set, parse_set, SpaceMap, SpaceModel};
use fine_hierarchy::trees::IterTree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A three-point chain collapsing its two upper points onto ⊤.
    let x = Arc::new(SpaceModel::linear(3));
    let y = Arc::new(SpaceModel::sierpinski());
    let f = SpaceMap::new(x.clone(), y.clone(), vec![0, 1, 1])?;
    println!("open map: {}, surjective: {}", f.is_open_map(), f.is_surjection());

    for text in ["{}", "{c0}", "{c1}", "{c2}", "{c1, c2}", "{c0, c1}"] {
        let s = parse_set(&x, text)?;
        println!(
            "S = {:<8} f(S) = {:<8} f[S] = {}",
            format_set(&x, s),
            format_set(&y, f.image(s)),
            format_set(&y, category_image(&f, s)?)
        );
    }
    let report = check_baire(&f, 0, Sampling::Exhaustive)?;
    println!(
        "Baire check: {} sets, passed = {}",
        report.sets_checked,
        report.passed()
    );

    let a = KPartition::new(y, 2, vec![0, 1])?;
    for t in ["0", "node(0; 1)", "node(1; 0)", "node(1; node(0; 1))"] {
        let t: IterTree = t.parse()?;
        let r = check_preservation(&f, &a, &t, DEFAULT_SEARCH_BUDGET)?;
        println!(
            "T = {:<22} A: {:<22} A∘f: {:<22} holds: {}",
            t.to_string(),
            r.codomain.name(),
            r.domain.name(),
            r.holds()
        );
    }
    Ok(())
}
