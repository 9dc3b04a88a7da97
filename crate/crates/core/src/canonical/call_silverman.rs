//! Canonical heights of morphisms of `P^1` by telescoping.
//!
//! `|h(f Q) - d h(Q)| <= C_f` for all `Q`, so `d^-K h(f^K P)` is within
//! `C_f d^-K / (d - 1)` of `hhat(P)`. Large orbit points are never formed:
//! past a size threshold the increments `h(f Q) - d h(Q)` are split into an
//! archimedean part on the real orbit and `-log gcd` at the primes of the
//! resultant.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dynsys::p1::P1Morphism;
use crate::error::{Error, Result};
use crate::heights::local::{archimedean_sum, factor_with_hints, padic_valuations};
use crate::heights::neron_tate::{precision_for, tolerance_rat};
use crate::heights::projective::{weil_height, ProjectivePoint};
use crate::numlin::ball::{ln_bigint_abs, BallReal, BigRat, MAX_PRECISION};

use super::CanonicalEstimate;

/// `C_f / (d - 1)`: bounds `|hhat - h|` everywhere.
pub fn call_silverman_constant(f: &P1Morphism) -> BigRat {
    let d = BigRat::from_integer(BigInt::from(f.degree()));
    f.height_bound().constant_upper() / (d - BigRat::from_integer(1.into()))
}

pub fn call_silverman(f: &P1Morphism, p: &ProjectivePoint, tol: f64) -> Result<CanonicalEstimate> {
    call_silverman_with(f, p, tol, &[])
}

/// Orbit points are iterated exactly while they stay below this size; the
/// remaining steps use local contributions.
pub const EXACT_BITS: u64 = 2048;

/// As [`call_silverman`]; primes of the resultant above 10^6 must be
/// supplied in `prime_hints` when the orbit outgrows exact iteration.
pub fn call_silverman_with(
    f: &P1Morphism,
    p: &ProjectivePoint,
    tol: f64,
    prime_hints: &[BigInt],
) -> Result<CanonicalEstimate> {
    let tol_q = tolerance_rat(tol)?;
    if p.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: p.dim(),
        });
    }
    let d = BigInt::from(f.degree());
    let c0 = call_silverman_constant(f);
    let half = &tol_q / BigRat::from_integer(2.into());
    let mut steps = 0u32;
    let mut d_pow = BigInt::from(1);
    while &c0 / BigRat::from_integer(d_pow.clone()) > half {
        steps += 1;
        d_pow *= &d;
    }
    let tail = &c0 / BigRat::from_integer(d_pow.clone());
    let base_prec = precision_for(tol, 32);
    let zero = || CanonicalEstimate::certified(BallReal::zero(base_prec), BallReal::zero(base_prec));

    // exact phase, with cycle detection
    let mut seen = HashSet::new();
    let mut q = p.clone();
    let mut done = 0u32;
    while done < steps && q.size_bits() <= EXACT_BITS {
        if !seen.insert(q.clone()) {
            return Ok(zero());
        }
        q = f.apply(&q);
        done += 1;
    }
    if seen.contains(&q) {
        return Ok(zero());
    }
    let scale_done = BigRat::new(1.into(), d.pow(done));
    if done == steps {
        let h = weil_height(&q, base_prec).value;
        let value = h.scale(&scale_done).inflate(&tail);
        let error = BallReal::exact(value.rad().clone(), base_prec);
        return Ok(CanonicalEstimate::certified(value, error));
    }

    // local phase: d^-done [h(q) + sum_k d^-(k+1) (Phi_inf - log gcd_k)]
    let depth = steps - done;
    let (a, b) = (q.coords()[0].clone(), q.coords()[1].clone());
    let primes = factor_with_hints(&f.resultant().abs(), prime_hints)?;
    let mut prec = base_prec + 4 * depth;
    loop {
        let h0 = ln_bigint_abs(&a.abs().max(b.abs()), prec);
        if let Some(arch) = archimedean_sum(f.numerator(), f.denominator(), &a, &b, depth, prec) {
            let mut total = &h0 + &arch;
            for (r, e) in &primes {
                let vals = padic_valuations(f.numerator(), f.denominator(), &a, &b, r, *e, depth);
                let mut coeff = BigRat::zero();
                let mut w = BigRat::one();
                for v in vals {
                    w /= BigRat::from_integer(d.clone());
                    coeff += &w * BigRat::from_integer(v.into());
                }
                if !coeff.is_zero() {
                    total = &total - &ln_bigint_abs(r, prec).scale(&coeff);
                }
            }
            let value = total.scale(&scale_done);
            if value.rad() <= &half {
                let value = value.inflate(&tail);
                let error = BallReal::exact(value.rad().clone(), base_prec);
                return Ok(CanonicalEstimate::certified(value, error));
            }
        }
        if prec >= MAX_PRECISION {
            return Err(Error::PrecisionExhausted {
                bits: prec,
                reason: "archimedean orbit".into(),
            });
        }
        prec = (prec * 2).min(MAX_PRECISION);
    }
}
