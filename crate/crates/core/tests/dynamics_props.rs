mod common;

use monodyn::dynamics::{
    classify, decompose, dynamical_degree, find_invariant_fibration, matrix_order_mod, periodic_torsion_points,
    ClassifyConfig, Verdict,
};
use monodyn::exactnum::{char_eval, point_inv, point_mul};
use monodyn::intlinalg::minpoly;
use monodyn::oracle::finite_model_run;
use monodyn::torus::{monomial, AffineMonomialMap};
use monodyn::{IntPoly, KummerNumber};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use proptest::prelude::*;
use rand::Rng;

fn degree_one_map(seed: u64) -> AffineMonomialMap {
    let mut rng = common::rng(seed);
    let n = rng.gen_range(1..=3);
    let mut a = common::unipotent(&mut rng, n);
    if rng.gen_bool(0.3) {
        let mut p = monodyn::IntMatrix::zeros(n, n);
        for i in 0..n {
            p[(i, (i + 1) % n)] = if rng.gen_bool(0.5) { 1.into() } else { (-1).into() };
        }
        a = a.mul(&p);
    }
    common::affine(&mut rng, a)
}

fn expanding_map(seed: u64) -> AffineMonomialMap {
    let mut rng = common::rng(seed);
    loop {
        let n = rng.gen_range(1..=3);
        let a = common::nonsingular(&mut rng, n, 2);
        let phi = common::affine(&mut rng, a);
        if !dynamical_degree(&phi).is_one() {
            return phi;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn witnesses_are_sound(seed in any::<u64>()) {
        let phi = degree_one_map(seed);
        if let Some(w) = find_invariant_fibration(&phi, 360) {
            prop_assert!(w.verify(&phi));
            let psi = phi.iterate(w.ell);
            let mut rng = common::rng(seed ^ 1);
            for _ in 0..20 {
                let x = common::point(&mut rng, phi.dim());
                let lhs = char_eval(&psi.apply(&x).unwrap(), &w.b).unwrap();
                prop_assert_eq!(lhs, char_eval(&x, &w.b).unwrap());
            }
        }
    }

    #[test]
    fn decomposition_is_sound(seed in any::<u64>()) {
        let phi = expanding_map(seed);
        let d = decompose(&phi).unwrap();
        prop_assert!(d.lattices_disjoint());
        prop_assert_eq!(d.x1.dim() + d.x2.dim(), phi.dim());
        if d.x1.dim() > 0 {
            prop_assert_eq!(minpoly(&d.a1), IntPoly::linear(1).pow(d.r));
        }
        prop_assert_eq!(minpoly(&d.a2), d.q.clone());
        let (f1, f2) = (d.phi1(), d.phi2());
        let mut rng = common::rng(seed ^ 2);
        for _ in 0..20 {
            let s = common::point(&mut rng, d.x1.dim());
            let t = common::point(&mut rng, d.x2.dim());
            let lhs = d.psi.apply(&d.iota(&s, &t)).unwrap();
            prop_assert_eq!(lhs, d.iota(&f1.apply(&s).unwrap(), &f2.apply(&t).unwrap()));
        }
        prop_assert!(d.conjugated_phi2().gamma().iter().all(KummerNumber::is_one));
    }

    #[test]
    fn translation_conjugation(seed in any::<u64>()) {
        let phi = expanding_map(seed);
        let mut rng = common::rng(seed ^ 3);
        let beta = common::point(&mut rng, phi.dim());
        let conj = phi.conjugate_by_translation(&beta);
        let x = common::point(&mut rng, phi.dim());
        let expected = point_mul(&beta, &phi.apply(&point_mul(&x, &point_inv(&beta))).unwrap());
        prop_assert_eq!(conj.apply(&x).unwrap(), expected);
    }

    #[test]
    fn periodic_points_are_sound(seed in any::<u64>(), d in 1u64..=24) {
        let phi = expanding_map(seed);
        let a = phi.matrix().clone();
        let det = a.det().abs().to_u64().unwrap();
        prop_assume!(d.gcd(&det) == 1);
        let f = AffineMonomialMap::endomorphism(a.clone()).unwrap();
        let order = matrix_order_mod(&a, d);
        let run = finite_model_run(&f, d).unwrap();
        for p in periodic_torsion_points(&a, d, 200).unwrap() {
            prop_assert_eq!(monomial(&p.point, &common::pow_mod(&a, p.period, d)), p.point.clone());
            prop_assert_eq!(order % p.period, 0);
            prop_assert_eq!(run.period(&p.exponents), p.period);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn classifier_is_consistent(seed in any::<u64>(), expanding in any::<bool>()) {
        let phi = if expanding { expanding_map(seed) } else { degree_one_map(seed) };
        let cfg = ClassifyConfig { family_budget: 8, point_budget: 60, ..ClassifyConfig::default() };
        let r = classify(&phi, &cfg).unwrap();
        prop_assert_eq!(r.verdict == Verdict::Fibration, r.fibration.is_some());
        if let Some(w) = &r.fibration {
            prop_assert!(w.verify(&phi));
        }
        match r.verdict {
            Verdict::DegreeOneWild => {
                prop_assert!(r.dynamical_degree.is_one());
                prop_assert!(r.wildness.as_ref().is_some_and(|c| c.is_dense()));
            }
            Verdict::DegreeGtOneDenseInvariants => {
                prop_assert!(!r.dynamical_degree.is_one());
                let fam = r.invariant_family.as_ref().unwrap();
                prop_assert!(fam.cycles.iter().all(|c| c.verified));
            }
            Verdict::Fibration => {}
        }
    }
}
