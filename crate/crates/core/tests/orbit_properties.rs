use heightlab::dynsys::{DynSystem, LatticeSystem, P1Morphism, SystemPoint};
use heightlab::heights::{GramForm, ProjectivePoint};
use heightlab::numlin::{rat, RatMatrix};
use heightlab::orbits::{detect_preperiodic, orbit_intersection, preperiodic_by_history};
use proptest::prelude::*;

fn p1(x: &[i64]) -> SystemPoint {
    SystemPoint::P1(ProjectivePoint::from_i64(x).unwrap())
}

fn finite_lattice_map(m: [[i64; 2]; 2], t: [i64; 2]) -> DynSystem {
    // finite-order matrix: every orbit is periodic
    let a = RatMatrix::from_ints(&[&m[0], &m[1]]);
    DynSystem::Lattice(
        LatticeSystem::new(a, Some(vec![rat(t[0], 1), rat(t[1], 1)]), GramForm::identity(2)).unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn brent_agrees_with_history_on_p1(c in -2i64..=0, a in -3i64..=3, b in 1i64..=3) {
        let f = DynSystem::P1(P1Morphism::quadratic(c));
        let x = p1(&[a, b]);
        let steps = 12;
        let rec = detect_preperiodic(&f, &x, steps).unwrap();
        let oracle = preperiodic_by_history(&f, &x, steps).unwrap();
        match oracle {
            Some((tail, period)) => {
                prop_assert_eq!(rec.tail_length, Some(tail));
                prop_assert_eq!(rec.period, Some(period));
            }
            None => prop_assert!(!rec.is_preperiodic()),
        }
    }

    #[test]
    fn brent_agrees_with_history_on_finite_order_maps(
        which in 0usize..3,
        t in prop::array::uniform2(-3i64..=3),
        v in prop::array::uniform2(-5i64..=5),
    ) {
        let m = [[[0, -1], [1, 0]], [[0, -1], [1, 1]], [[-1, -1], [1, 0]]][which];
        let f = finite_lattice_map(m, t);
        let x = SystemPoint::Lattice(vec![rat(v[0], 1), rat(v[1], 1)]);
        let rec = detect_preperiodic(&f, &x, 200).unwrap();
        let oracle = preperiodic_by_history(&f, &x, 200).unwrap().unwrap();
        prop_assert_eq!((rec.tail_length.unwrap(), rec.period.unwrap()), oracle);
        let n = oracle.0 + oracle.1;
        let mut p = x.clone();
        for _ in 0..n {
            p = f.apply(&p).unwrap();
        }
        prop_assert_eq!(&p, &rec.points[oracle.0]);
    }
}

#[test]
fn intersection_pairs_reverify_from_scratch() {
    let f = DynSystem::P1(P1Morphism::quadratic(0));
    let cases = [(p1(&[2, 1]), p1(&[16, 1])), (p1(&[-1, 1]), p1(&[1, 1])), (p1(&[3, 2]), p1(&[81, 16]))];
    for (x, y) in cases {
        let r = orbit_intersection(&f, &x, &f, &y, 10).unwrap();
        assert!(!r.pairs.is_empty());
        for &(n, m) in &r.pairs {
            let mut a = x.clone();
            for _ in 0..n {
                a = f.apply(&a).unwrap();
            }
            let mut b = y.clone();
            for _ in 0..m {
                b = f.apply(&b).unwrap();
            }
            assert_eq!(a, b, "({n}, {m})");
        }
    }
}

#[test]
fn iterate_pairs_follow_the_exponent() {
    let f = P1Morphism::from_i64(&[1, 0, 3], &[-2, 1, 0]).unwrap();
    let f2 = f.compose(&f);
    let x = p1(&[2, 5]);
    let r = orbit_intersection(&DynSystem::P1(f), &x, &DynSystem::P1(f2), &x, 8).unwrap();
    assert!(!r.pairs.is_empty());
    for (n, m) in r.pairs {
        assert_eq!(n, 2 * m);
    }
}
