//! Class groups of imaginary quadratic fields from reduced binary forms.
//!
//! Usage: `cargo run --example class_group -- -84 -23 -3299`

use arith_bf::quadforms::{class_group, Discriminant};

fn main() {
    let args: Vec<i64> = std::env::args().skip(1).map(|a| a.parse().expect("integer discriminant")).collect();
    let discs = if args.is_empty() { vec![-23, -39, -84, -3299] } else { args };
    for d in discs {
        let disc = match Discriminant::new(d) {
            Ok(disc) => disc,
            Err(e) => {
                println!("{d}: {e}");
                continue;
            }
        };
        let cg = class_group(disc).expect("class group");
        println!("D = {d}: h = {}, Cl = {}", cg.class_number(), cg.structure);
        if cg.class_number() <= 8 {
            for &f in &cg.forms {
                println!("  {f}  order {}  dlog {:?}", cg.form_order(f), cg.dlog(&f).unwrap().coords());
            }
        }
        let g = cg.generators[0];
        let sq = cg.compose(g, g);
        assert_eq!(sq, cg.power(g, 2));
    }
}
