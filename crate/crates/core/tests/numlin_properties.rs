use heightlab::numlin::{rat, rat_int, root_enclosures, spectral_data, BallReal, BigRat, RatMatrix, RatPoly};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn matrix_strategy(max_dim: usize) -> impl Strategy<Value = RatMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(-3i64..=3, n), n).prop_map(|rows| {
            RatMatrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(rat_int).collect()).collect()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn characteristic_and_minimal_polynomials_annihilate(m in matrix_strategy(4)) {
        let cp = m.char_poly();
        let mp = m.min_poly();
        prop_assert!(m.eval_poly(&cp).is_zero());
        prop_assert!(m.eval_poly(&mp).is_zero());
        prop_assert!(mp.divides(&cp));
    }

    #[test]
    fn powers_raise_rho_and_keep_jordan(m in matrix_strategy(3), k in 2u64..=3) {
        let sd = spectral_data(&m, 128).unwrap();
        let sdk = spectral_data(&m.pow(k), 128).unwrap();
        prop_assert!(sdk.rho.overlaps(&sd.rho.powi(k as u32)));
        // the Jordan exponent is read off the dominant eigenvalues only
        if sd.rho.is_positive() {
            prop_assert_eq!(sd.jordan_exponent, sdk.jordan_exponent);
        }
    }

    #[test]
    fn block_diagonal_takes_lexicographic_max(a in matrix_strategy(2), b in matrix_strategy(2)) {
        let sa = spectral_data(&a, 128).unwrap();
        let sb = spectral_data(&b, 128).unwrap();
        let s = spectral_data(&RatMatrix::block_diag(&a, &b), 128).unwrap();
        let top = s.rho.clone();
        prop_assert!(top.overlaps(&sa.rho.max(&sb.rho)));
        let expected = if sa.rho.upper() < sb.rho.lower() {
            Some(sb.jordan_exponent)
        } else if sb.rho.upper() < sa.rho.lower() {
            Some(sa.jordan_exponent)
        } else if sa.rho_squared.is_some() && sa.rho_squared == sb.rho_squared {
            Some(sa.jordan_exponent.max(sb.jordan_exponent))
        } else {
            None
        };
        if let (Some(l), true) = (expected, top.is_positive()) {
            prop_assert_eq!(s.jordan_exponent, l);
        }
    }

    #[test]
    fn root_product_matches_constant_term(coeffs in prop::collection::vec(-6i64..=6, 2..=6)) {
        let p = RatPoly::from_ints(&coeffs);
        prop_assume!(p.degree().unwrap_or(0) >= 1);
        prop_assume!(p.gcd(&p.derivative()).deg() == 0);
        let roots = root_enclosures(&p, 128).unwrap();
        prop_assert_eq!(roots.len(), p.deg());
        let (mut re, mut im) = (1.0f64, 0.0f64);
        let (mut with_rad, mut without) = (1.0f64, 1.0f64);
        for z in &roots {
            let (a, b) = (to_f64(&z.re), to_f64(&z.im));
            let (nr, ni) = (re * a - im * b, re * b + im * a);
            re = nr;
            im = ni;
            let m = (a * a + b * b).sqrt();
            with_rad *= m + to_f64(&z.rad);
            without *= m;
        }
        let sign = if p.deg() % 2 == 0 { 1.0 } else { -1.0 };
        let expected = sign * to_f64(&(p.coeff(0) / p.lc()));
        let slack = (with_rad - without) + 1e-9 * (1.0 + expected.abs());
        prop_assert!((re - expected).abs() <= slack && im.abs() <= slack);
    }

    #[test]
    fn balls_contain_exact_results(
        a in (-1000i64..1000, 1i64..50),
        b in (-1000i64..1000, 1i64..50),
        ra in 0i64..4,
        rb in 0i64..4,
    ) {
        let qa = rat(a.0, a.1);
        let qb = rat(b.0, b.1);
        // perturb inside the radius
        let ea = rat(ra, 7 * a.1);
        let eb = rat(rb, 11 * b.1);
        let xa = BallReal::with_radius(&qa + &ea, ea.abs() * rat(2, 1), 64);
        let xb = BallReal::with_radius(&qb - &eb, eb.abs() * rat(2, 1), 64);
        prop_assert!((&xa + &xb).contains(&(&qa + &qb)));
        prop_assert!((&xa - &xb).contains(&(&qa - &qb)));
        prop_assert!((&xa * &xb).contains(&(&qa * &qb)));
        if !xb.contains_zero() {
            prop_assert!(xa.div(&xb).unwrap().contains(&(&qa / &qb)));
        }
        if qa.is_positive() && !xa.contains_zero() {
            let l = xa.ln().unwrap();
            prop_assert!(l.exp().contains(&qa) || l.exp().overlaps(&BallReal::exact(qa.clone(), 64)));
        }
        prop_assert!(xa.square().contains(&(&qa * &qa)));
    }
}

fn to_f64(q: &BigRat) -> f64 {
    use num_traits::ToPrimitive;
    if q.is_zero() {
        0.0
    } else {
        q.to_f64().unwrap()
    }
}
