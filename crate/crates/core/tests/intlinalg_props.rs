mod common;

use monodyn::intlinalg::{
    charpoly, hermite_normal_form, left_kernel_saturated, minpoly, smith_normal_form, IntMatrix, Lattice,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn small_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-6i64..=6, c), r)
            .prop_map(move |rows| IntMatrix::from_rows_with_cols(&rows, c).unwrap())
    })
}

fn generators(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=rows).prop_flat_map(move |r| {
        prop::collection::vec(prop::collection::vec(-6i64..=6, cols), r)
            .prop_map(move |rows| IntMatrix::from_rows_with_cols(&rows, cols).unwrap())
    })
}

fn square(max: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(-4i64..=4, n), n)
            .prop_map(move |rows| IntMatrix::from_rows_with_cols(&rows, n).unwrap())
    })
}

proptest! {
    #[test]
    fn hnf_identity(m in small_matrix(5, 5)) {
        let h = hermite_normal_form(&m);
        prop_assert_eq!(h.u.mul(&m), h.h.clone());
        prop_assert_eq!(h.u.det().abs(), BigInt::one());
        prop_assert_eq!(h.rank, m.rank());
        for (i, &p) in h.pivots.iter().enumerate() {
            prop_assert!(h.h[(i, p)].is_positive());
            for k in 0..i {
                prop_assert!(!h.h[(k, p)].is_negative() && h.h[(k, p)] < h.h[(i, p)]);
            }
            if i > 0 {
                prop_assert!(h.pivots[i - 1] < p);
            }
        }
        for i in h.rank..m.rows() {
            prop_assert!(h.h.row(i).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn snf_identity(m in small_matrix(4, 5)) {
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.d.clone());
        prop_assert_eq!(s.u.det().abs(), BigInt::one());
        prop_assert_eq!(s.v.det().abs(), BigInt::one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    prop_assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        let f = s.invariant_factors();
        for w in f.windows(2) {
            prop_assert!(!w[0].is_negative());
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
    }

    #[test]
    fn left_kernel_is_saturated(m in small_matrix(5, 3)) {
        let k = left_kernel_saturated(&m);
        prop_assert_eq!(k.rank() + m.rank(), m.rows());
        prop_assert!(k.basis().mul(&m).is_zero());
        prop_assert!(k.is_saturated());
    }

    #[test]
    fn minpoly_divides_charpoly(m in square(4)) {
        let mp = minpoly(&m);
        let cp = charpoly(&m);
        prop_assert!(mp.eval_matrix(&m).is_zero());
        prop_assert!(cp.eval_matrix(&m).is_zero());
        prop_assert!(cp.is_divisible_by(&mp));
        prop_assert!(mp.degree() >= 1);
        prop_assert_eq!(cp.degree(), m.rows());
    }

    #[test]
    fn sum_and_intersection_ranks(a in generators(3, 4), b in generators(3, 4)) {
        let la = Lattice::from_generators(4, &a);
        let lb = Lattice::from_generators(4, &b);
        let s = la.sum(&lb).unwrap();
        let i = la.intersection(&lb).unwrap();
        prop_assert_eq!(s.rank() + i.rank(), la.rank() + lb.rank());
        for r in i.basis_rows() {
            prop_assert!(la.contains(&r) && lb.contains(&r));
        }
        for r in la.basis_rows().into_iter().chain(lb.basis_rows()) {
            prop_assert!(s.contains(&r));
        }
    }
}
