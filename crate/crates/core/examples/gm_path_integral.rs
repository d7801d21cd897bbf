//! Brute-force path integral for the multiplicative group over an imaginary
//! quadratic field, checked against its closed form.
//!
//! Usage: `cargo run --release --example gm_path_integral -- -39 2`

use arith_bf::bf_gm::{EnumerationOptions, FieldData, GmInstance, Mode};
use arith_bf::quadforms::Discriminant;

fn main() {
    let mut args = std::env::args().skip(1);
    let d: i64 = args.next().map_or(-23, |a| a.parse().unwrap());
    let n_max: u64 = args.next().map_or(12, |a| a.parse().unwrap());

    let field = FieldData::imaginary_quadratic(Discriminant::new(d).unwrap()).unwrap();
    println!("{}: Cl = {}, w = {}", field.label, field.cl, field.w);
    let opts = EnumerationOptions { jobs: 4, ..Default::default() };
    for n in 1..=n_max {
        let inst = GmInstance::new(field.clone(), n).unwrap();
        let r = inst.path_integral(Mode::Both, &opts).unwrap();
        println!(
            "n = {n:3}  pairs {:6}  brute {:4}  closed {:4} = {:?}  etale {}",
            r.pair_count,
            r.brute_force_value.unwrap(),
            r.closed_form_value,
            r.factors,
            inst.etale_count()
        );
    }
}
