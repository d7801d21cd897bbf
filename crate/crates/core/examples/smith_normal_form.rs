//! Smith normal form and the group presented by a relation matrix.

use arith_bf::abgroup::{group_from_relations, smith_normal_form, IntMatrix};

fn main() {
    let m = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]], 2);
    let s = smith_normal_form(&m);
    println!("diag(S) = {:?}", s.diagonal());
    assert_eq!(s.u.mul(&m).mul(&s.v), s.s);

    // Z^3 / <(2,0,0), (0,4,2), (0,0,6)>
    let p = group_from_relations(&[vec![2, 0, 0], vec![0, 4, 2], vec![0, 0, 6]], 3);
    println!("torsion {}  free rank {}", p.torsion, p.free_rank);

    let g = p.torsion;
    for n in [2, 3, 4] {
        println!(
            "n = {n}: |G[n]| = {}  |G/nG| = {}  |nG[n^2]| = {}",
            g.torsion_subgroup(n).0.order(),
            g.quotient_mod_n(n).0.order(),
            g.n_times_torsion(n).order()
        );
    }
}
