//! Exact limits of `a_n` for affine lattice maps.
//!
//! Only the top Jordan level of the dominant factors survives the
//! normalization: with `U = N^j w` on those factors,
//! `a_n ~ Q(n - j) / ((j!)^2 rho^(2j))` where `Q(m) = h(A^m U) / rho^(2m)`.
//! When `Q` is provably periodic its max and min are the limsup and liminf.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::dynsys::lattice::LatticeSystem;
use crate::dynsys::system::{DynSystem, SystemPoint};
use crate::error::{Error, Result};
use crate::heights::gram::GramMatrix;
use crate::numlin::ball::{BallReal, BigRat, DEFAULT_PRECISION};
use crate::numlin::matrix::{dot, is_zero_vec, quad_form, span_basis, vec_sub, RatMatrix, RatVec};
use crate::numlin::poly::RatPoly;
use crate::numlin::spectral::{Certification, SpectralData};

use super::series::{height_series_with, Budget};
use super::{CanonicalEstimate, EstimateMode};

/// Longest period tried before falling back to the empirical estimate.
pub const MAX_PERIOD: u64 = 24;

/// Iterations behind the empirical fallback.
pub const EMPIRICAL_STEPS: usize = 60;

pub(crate) fn min_poly_of(sd: &SpectralData) -> RatPoly {
    sd.min_poly_factors
        .iter()
        .fold(RatPoly::one(), |acc, (p, m)| &acc * &p.pow(*m))
}

/// Polynomial `e` with `e(A)` the projection onto `ker part(A)` along the
/// complementary primary components; `part` must divide `minpoly` with a
/// coprime cofactor.
pub(crate) fn idempotent(part: &RatPoly, minpoly: &RatPoly) -> RatPoly {
    let rest = minpoly.exact_div(part).expect("part divides the minimal polynomial");
    if rest.is_constant() {
        return RatPoly::one();
    }
    let inv = rest
        .inverse_mod(part)
        .expect("primary components are coprime");
    (&rest * &inv).rem(minpoly)
}

/// The top-level vector `U` of `w` together with the Jordan exponent.
pub(crate) struct TopPart {
    pub u: RatVec,
    pub j: u32,
}

/// Dominant-factor reduction of `v` under `x -> A x + p`. `None` when the
/// translation resonates with a dominant eigenvalue.
pub(crate) fn top_part(a: &RatMatrix, p: &[BigRat], v: &[BigRat], sd: &SpectralData) -> Option<TopPart> {
    let minpoly = min_poly_of(sd);
    let j = sd.jordan_exponent;
    let dom = sd
        .dominant_factors
        .iter()
        .fold(RatPoly::one(), |acc, f| &acc * &f.factor.pow(f.multiplicity));
    let e_dom = idempotent(&dom, &minpoly);

    // fixed point of the dominant block
    let p_dom = a.eval_poly_on(&e_dom, p);
    let x = if is_zero_vec(&p_dom) {
        vec![BigRat::zero(); p.len()]
    } else {
        let one_minus_t = RatPoly::from_ints(&[1, -1]);
        let g = one_minus_t.inverse_mod(&dom)?;
        a.eval_poly_on(&g, &p_dom)
    };
    let w = vec_sub(&a.eval_poly_on(&e_dom, v), &x);

    let mut u = vec![BigRat::zero(); v.len()];
    for f in sd.dominant_factors.iter().filter(|f| f.multiplicity == j + 1) {
        let e_p = idempotent(&f.factor.pow(f.multiplicity), &minpoly);
        let w_p = a.eval_poly_on(&e_p, &w);
        let z = a.eval_poly_on(&f.factor.pow(j), &w_p);
        let r = f
            .factor
            .derivative()
            .pow(j)
            .inverse_mod(&f.factor)
            .expect("irreducible factors are separable");
        let u_p = a.eval_poly_on(&r, &z);
        for (acc, x) in u.iter_mut().zip(&u_p) {
            *acc += x;
        }
    }
    Some(TopPart { u, j })
}

fn factorial(j: u32) -> BigInt {
    (1..=j).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Krylov basis of `u` under `a`.
fn krylov(a: &RatMatrix, u: &[BigRat]) -> Vec<RatVec> {
    let mut vecs = vec![u.to_vec()];
    let mut cur = u.to_vec();
    loop {
        cur = a.mul_vec(&cur);
        let mut trial = vecs.clone();
        trial.push(cur.clone());
        if span_basis(&trial).len() == vecs.len() {
            return vecs;
        }
        vecs.push(cur.clone());
    }
}

/// Smallest `k <= MAX_PERIOD` with `(A^k)^T G A^k = r^k G` on the span.
fn period(a: &RatMatrix, g: &RatMatrix, r: &BigRat, span: &[RatVec]) -> Option<u64> {
    let base: Vec<Vec<BigRat>> = span
        .iter()
        .map(|b| span.iter().map(|c| dot(b, &g.mul_vec(c))).collect())
        .collect();
    let mut images = span.to_vec();
    let mut r_k = BigRat::one();
    for k in 1..=MAX_PERIOD {
        images = images.iter().map(|b| a.mul_vec(b)).collect();
        r_k *= r;
        let ok = images.iter().enumerate().all(|(i, bi)| {
            let gbi = g.mul_vec(bi);
            images
                .iter()
                .enumerate()
                .all(|(jj, bj)| dot(&gbi, bj) == &r_k * &base[i][jj])
        });
        if ok {
            return Some(k);
        }
    }
    None
}

/// `limsup` and `liminf` of `a_n`, exactly when the dominant structure allows.
pub fn lattice_canonical(s: &LatticeSystem, v: &[BigRat]) -> Result<CanonicalEstimate> {
    lattice_canonical_with(s, v, DEFAULT_PRECISION)
}

pub fn lattice_canonical_with(s: &LatticeSystem, v: &[BigRat], prec: u32) -> Result<CanonicalEstimate> {
    if v.len() != s.rank() {
        return Err(Error::DimensionMismatch {
            expected: s.rank(),
            got: v.len(),
        });
    }
    let sd = s.spectral(prec)?;
    if sd.certification == Certification::Heuristic {
        return Err(Error::HypothesisFailed(
            "spectral data is only heuristic".into(),
        ));
    }
    if !sd.rho.is_positive() {
        return Err(Error::HypothesisFailed("dynamical degree is zero".into()));
    }
    let a = s.matrix();
    let Some(top) = top_part(a, s.translation(), v, &sd) else {
        return empirical(s, v, prec, "translation resonates with a dominant eigenvalue");
    };
    if is_zero_vec(&top.u) {
        return Ok(CanonicalEstimate::exact_pair(BigRat::zero(), BigRat::zero(), prec));
    }
    let (Some(r), GramMatrix::Rational(g)) = (&sd.rho_squared, s.gram().gram()) else {
        return empirical(s, v, prec, "dominant modulus or Gram form is not rational");
    };
    let span = krylov(a, &top.u);
    let Some(k) = period(a, g, r, &span) else {
        return empirical(s, v, prec, "no exact period of the dominant term");
    };
    let mut values = Vec::with_capacity(k as usize);
    let mut cur = top.u.clone();
    let mut r_m = BigRat::one();
    for _ in 0..k {
        values.push(quad_form(g, &cur) / &r_m);
        cur = a.mul_vec(&cur);
        r_m *= r;
    }
    let fact = BigRat::from_integer(factorial(top.j));
    let norm = &fact * &fact * pow_rat(r, top.j);
    let sup = values.iter().max().unwrap() / &norm;
    let inf = values.iter().min().unwrap() / &norm;
    Ok(CanonicalEstimate::exact_pair(sup, inf, prec))
}

fn pow_rat(r: &BigRat, k: u32) -> BigRat {
    (0..k).fold(BigRat::one(), |acc, _| acc * r)
}

/// Range of `a_n` over the last third of a 60-step orbit.
fn empirical(s: &LatticeSystem, v: &[BigRat], prec: u32, why: &str) -> Result<CanonicalEstimate> {
    let sys = DynSystem::Lattice(s.clone());
    let series = height_series_with(
        &sys,
        &SystemPoint::Lattice(v.to_vec()),
        EMPIRICAL_STEPS,
        Budget::default(),
        prec,
    )?;
    let tail: Vec<&BallReal> = series
        .normalized()
        .filter(|(n, _)| *n >= 2 * EMPIRICAL_STEPS / 3)
        .map(|(_, a)| a)
        .collect();
    let (Some(first), rest) = (tail.first(), &tail[1.min(tail.len())..]) else {
        return Err(Error::HypothesisFailed("orbit too short for an estimate".into()));
    };
    let mut hi = (*first).clone();
    let mut lo = (*first).clone();
    for a in rest {
        hi = hi.max(a);
        lo = lo.min(a);
    }
    let spread = (&hi - &lo).abs();
    Ok(CanonicalEstimate {
        limsup_est: hi,
        liminf_est: lo,
        mode: EstimateMode::Empirical,
        error_bound: Some(spread),
        exact: None,
        flag: Some(why.to_string()),
    })
}
