//! Exact evaluation of sums of roots of unity.

use arith_bf::cyclo::{cyclotomic_polynomial, phase_sum_as_integer, phase_sum_float, PhaseVector};

fn main() {
    for n in [1, 2, 6, 12, 15] {
        println!("Phi_{n} = {:?}", cyclotomic_polynomial(n).coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>());
    }

    // 5 + 2ζ + 2ζ² with ζ a primitive cube root of unity
    let pv = PhaseVector::from_counts(3, &[5, 2, 2]);
    println!("{:?} -> {:?}, float {}", [5, 2, 2], phase_sum_as_integer(&pv), phase_sum_float(&pv));

    // 1 + ζ is not an integer
    let pv = PhaseVector::from_counts(6, &[1, 1, 0, 0, 0, 0]);
    println!("{:?} -> {:?}, float {}", [1, 1, 0, 0, 0, 0], phase_sum_as_integer(&pv), phase_sum_float(&pv));
}
