//! Cantor-normal-form arithmetic: parsing, sums, products, powers of ω.
//!
//!     cargo run --example ordinals

use fine_hierarchy::ordinals::{omega_pow, ord_add, ord_compare, ord_mul, Ordinal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a: Ordinal = "w^2*3 + w + 2".parse()?;
    let b: Ordinal = "w*2 + 1".parse()?;
    println!("a = {a}");
    println!("b = {b}");
    println!("a + b = {}", ord_add(&a, &b));
    println!("b + a = {}", ord_add(&b, &a));
    println!("a * b = {}", ord_mul(&a, &b));
    println!("b * a = {}", ord_mul(&b, &a));
    println!("compare(a, b) = {:?}", ord_compare(&a, &b));

    // Left summands are absorbed by larger right summands.
    let one = Ordinal::one();
    let w = Ordinal::omega();
    println!("1 + w = {}  (w + 1 = {})", ord_add(&one, &w), ord_add(&w, &one));

    // The tower w, w^w, w^w^w, ... climbs towards ε₀.
    let mut t = Ordinal::omega();
    for _ in 0..3 {
        println!("tower: {t}");
        t = omega_pow(&t);
    }
    Ok(())
}
