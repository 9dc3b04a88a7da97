use heightlab::heights::{
    gram_from_points, lattice_height, neron_tate, neron_tate_local, normalize, weil_height, EPoint, EllipticCurve,
    GramForm, ProjectivePoint,
};
use heightlab::numlin::{rat, rat_int, BigRat, RatMatrix};
use num_bigint::BigInt;
use proptest::prelude::*;

const TOL: f64 = 1e-7;
// looser tolerance for identities that need several heights
const LOOSE: f64 = 1e-4;

fn corpus() -> Vec<(EllipticCurve, EPoint)> {
    vec![
        (EllipticCurve::from_ints([0, 0, 1, -1, 0]).unwrap(), EPoint::from_ints(0, 0)),
        (EllipticCurve::from_ints([0, 1, 1, 0, 0]).unwrap(), EPoint::from_ints(0, 0)),
        (EllipticCurve::from_ints([1, -1, 1, 0, 0]).unwrap(), EPoint::from_ints(0, 0)),
        (EllipticCurve::from_ints([0, -1, 1, -2, 2]).unwrap(), EPoint::from_ints(2, 1)),
        (EllipticCurve::from_ints([1, -1, 0, -1, 1]).unwrap(), EPoint::from_ints(0, 1)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weil_height_is_nonnegative(c in prop::collection::vec(-10_000i64..10_000, 2..=4)) {
        prop_assume!(c.iter().any(|&x| x != 0));
        let p = ProjectivePoint::from_i64(&c).unwrap();
        prop_assert!(!weil_height(&p, 96).value.is_negative());
    }

    #[test]
    fn normalize_is_idempotent(c in prop::collection::vec((-50i64..50, 1i64..20), 2..=3)) {
        let raw: Vec<BigRat> = c.iter().map(|&(n, d)| rat(n, d)).collect();
        prop_assume!(c.iter().any(|&(n, _)| n != 0));
        let p = normalize(&raw).unwrap();
        let again: Vec<BigRat> = p.coords().iter().cloned().map(rat_int).collect();
        prop_assert_eq!(normalize(&again).unwrap(), p);
    }

    #[test]
    fn lattice_height_is_quadratic(
        v in prop::collection::vec(-20i64..20, 3),
        m in -5i64..5,
    ) {
        let g = GramForm::rational(RatMatrix::from_ints(&[&[2, 1, 0], &[1, 2, 0], &[0, 0, 1]])).unwrap();
        let x: Vec<BigRat> = v.iter().map(|&a| rat_int(a)).collect();
        let mx: Vec<BigRat> = v.iter().map(|&a| rat_int(a * m)).collect();
        let h = lattice_height(&x, &g).unwrap().exact().unwrap().clone();
        let hm = lattice_height(&mx, &g).unwrap().exact().unwrap().clone();
        prop_assert_eq!(hm, h * rat_int(m * m));
    }
}

#[test]
fn multiplication_scales_quadratically() {
    for (e, p) in corpus().into_iter().take(3) {
        let h = neron_tate(&e, &p, LOOSE / 25.0).unwrap().value;
        for m in [2i64, 3, 5] {
            let hm = neron_tate(&e, &e.mul(m, &p), LOOSE).unwrap().value;
            assert!(hm.overlaps(&h.scale(&rat_int(m * m))), "m = {m}");
        }
    }
}

#[test]
fn parallelogram_law() {
    // rank two, independent generators
    let e = EllipticCurve::from_ints([0, 1, 1, -2, 0]).unwrap();
    let p = EPoint::from_ints(0, 0);
    let q = EPoint::from_ints(1, 0);
    let h = |x: &EPoint| neron_tate(&e, x, LOOSE).unwrap().value;
    let lhs = &h(&e.add(&p, &q)) + &h(&e.sub(&p, &q));
    let rhs = (&h(&p) + &h(&q)).scale(&rat_int(2));
    assert!(lhs.overlaps(&rhs));
}

#[test]
fn telescoping_and_local_backends_agree() {
    for (e, p) in corpus() {
        let a = neron_tate(&e, &p, TOL).unwrap().value;
        let b = neron_tate_local(&e, &p, TOL, &[]).unwrap().value;
        assert!((a.to_f64() - b.to_f64()).abs() < 1e-6, "{p}: {} vs {}", a.to_f64(), b.to_f64());
        assert!(a.overlaps(&b));
    }
}

#[test]
fn dependent_points_give_singular_gram() {
    for (e, p) in corpus().into_iter().take(3) {
        let g = gram_from_points(&e, &[p.clone(), e.mul(2, &p)], LOOSE).unwrap();
        assert!(g.minor_det(&[0, 1], 96).contains_zero());
    }
}

#[test]
fn cm_action_scales_heights() {
    // J^2 = -2 I with J^T G J = 2 G for G = diag(1, 2)
    let j = RatMatrix::from_ints(&[&[0, -2], &[1, 0]]);
    let g = GramForm::rational(RatMatrix::from_ints(&[&[1, 0], &[0, 2]])).unwrap().with_cm(j.clone()).unwrap();
    for v in [[1i64, 0], [3, -4], [7, 2]] {
        let x: Vec<BigRat> = v.iter().map(|&a| rat_int(a)).collect();
        let h = lattice_height(&x, &g).unwrap().exact().unwrap().clone();
        let hj = lattice_height(&j.mul_vec(&x), &g).unwrap().exact().unwrap().clone();
        assert_eq!(hj, h * rat_int(2));
    }
    let bad = GramForm::identity(2).with_cm(j);
    assert!(bad.is_err());
}

#[test]
fn canonical_height_sits_below_naive_plus_constant() {
    // hhat(P) <= h(x(P)) / 2 + C_E / 6 with the duplication constant
    for (e, p) in corpus() {
        let dup = heightlab::heights::Duplication::new(&e);
        let h = neron_tate(&e, &p, TOL).unwrap().value;
        let x = heightlab::heights::neron_tate::x_height(&EllipticCurve::scale_point(&p, &dup.scale), 96);
        let bound = x.scale(&rat(1, 2)).inflate(&(&dup.c_e / rat_int(BigInt::from(6))));
        assert!(h.lower() <= bound.upper());
    }
}
