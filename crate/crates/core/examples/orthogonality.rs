//! Character sums over Hom(G, Z/n): |Hom| on nG and zero elsewhere.

use arith_bf::abgroup::{eval_hom, InvariantFactors};
use arith_bf::cyclo::{phase_sum_as_integer, PhaseVector};

fn main() {
    let g = InvariantFactors::new(vec![2, 12]).unwrap();
    let n = 4;
    println!("G = {g}, n = {n}, |Hom(G, Z/{n})| = {}", g.hom_count(n));
    for x in g.elements().take(12) {
        let mut pv = PhaseVector::new(n);
        for phi in g.homs_to_cyclic(n) {
            pv.record(eval_hom(&phi, &x).unwrap(), 1);
        }
        println!(
            "x = {:?}  in nG: {:5}  sum = {}",
            x.coords(),
            g.in_multiple_subgroup(&x, n),
            phase_sum_as_integer(&pv).unwrap()
        );
    }
}
