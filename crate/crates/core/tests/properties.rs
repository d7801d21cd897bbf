use arith_bf::abgroup::{smith_normal_form, IntMatrix, InvariantFactors};
use arith_bf::cyclo::{phase_sum_as_integer, PhaseVector};
use arith_bf::quadforms::{reduce, QuadForm};
use proptest::prelude::*;

fn group() -> impl Strategy<Value = InvariantFactors> {
    prop::collection::vec(2u64..12, 0..4).prop_map(|v| InvariantFactors::from_cyclic_orders(&v))
}

proptest! {
    #[test]
    fn snf_recomposes(rows in prop::collection::vec(prop::collection::vec(-20i64..20, 3), 1..4)) {
        let m = IntMatrix::from_rows(&rows, 3);
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.s.clone());
        prop_assert_eq!(s.u.determinant().abs(), 1);
        prop_assert_eq!(s.v.determinant().abs(), 1);
        let d = s.diagonal();
        for w in d.windows(2) {
            prop_assert!(w[0] >= 0 && (w[0] == 0 && w[1] == 0 || w[0] != 0 && w[1] % w[0] == 0));
        }
    }

    #[test]
    fn torsion_and_quotient_have_equal_order(g in group(), n in 1u64..15) {
        prop_assert_eq!(g.torsion_subgroup(n).0.order(), g.quotient_mod_n(n).0.order());
        prop_assert_eq!(g.dual(n).order(), g.hom_count(n));
        prop_assert_eq!(g.homs_to_cyclic(n).count() as u128, g.hom_count(n));
    }

    #[test]
    fn element_orders_divide_exponent(g in group()) {
        let e = g.exponent();
        for x in g.elements().take(200) {
            prop_assert_eq!(e % g.element_order(&x), 0);
        }
    }

    #[test]
    fn reduction_is_idempotent(a in 1i64..200, b in -200i64..200, c in 1i64..200) {
        let f = QuadForm::new(a, b, c);
        prop_assume!(f.discriminant() < 0 && f.is_primitive());
        let r = reduce(f).unwrap();
        prop_assert!(r.is_reduced());
        prop_assert_eq!(r.discriminant(), f.discriminant());
        prop_assert_eq!(reduce(r).unwrap(), r);
    }

    #[test]
    fn phase_merge_commutes(n in 1u64..20, a in prop::collection::vec(0u64..1000, 20), b in prop::collection::vec(0u64..1000, 20)) {
        let x = PhaseVector::from_counts(n, &a[..n as usize]);
        let y = PhaseVector::from_counts(n, &b[..n as usize]);
        let mut xy = x.clone();
        xy.merge(&y);
        let mut yx = y.clone();
        yx.merge(&x);
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn spike_over_uniform_noise(n in 2u64..20, k in 0u64..20, c in 1u64..1000, base in 0u64..1000) {
        let mut counts = vec![base; n as usize];
        counts[(k % n) as usize] += c;
        let pv = PhaseVector::from_counts(n, &counts);
        // a single spike is integral only at phase zero, or at -1 when 2k = n
        let s = phase_sum_as_integer(&pv);
        if k % n == 0 {
            prop_assert_eq!(s, Some((c as i64).into()));
        } else if 2 * (k % n) == n {
            prop_assert_eq!(s, Some((-(c as i64)).into()));
        } else {
            prop_assert_eq!(s, None);
        }
    }
}
