//! Neron-Tate heights as a sum of local contributions.
//!
//! `Phi(Q)` splits into an archimedean part `log max(|phi|, |psi2|) - 4 log
//! max(|a|, |b|)`, evaluated on the real doubling orbit in ball arithmetic,
//! and `-v_p(gcd) log p` for each prime `p` dividing the resultant, evaluated
//! on the `p`-adic doubling orbit modulo a fixed power of `p`. No large
//! integers are formed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::heights::binary_form::BinaryForm;
use crate::heights::elliptic::{EPoint, EllipticCurve};
use crate::heights::neron_tate::{precision_for, tolerance_rat, Duplication};
use crate::heights::projective::HeightValue;
use crate::numlin::ball::{ln_bigint_abs, round_dyadic, BallReal, BigRat, MAX_PRECISION};

pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// Miller-Rabin with the first twelve prime bases (deterministic below 3.3e24).
pub fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if n < &two {
        return false;
    }
    let bases = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &bases {
        let p = BigInt::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'outer: for &a in &bases {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Prime factorization of `|n|` by trial division to 10^6, then the hints.
pub fn factor_with_hints(n: &BigInt, hints: &[BigInt]) -> Result<Vec<(BigInt, u32)>> {
    let mut m = n.abs();
    if m.is_zero() {
        return Err(Error::Invalid("cannot factor zero".into()));
    }
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let strip = |m: &mut BigInt, p: &BigInt, out: &mut Vec<(BigInt, u32)>| {
        let mut e = 0u32;
        while (&*m % p).is_zero() {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
    };
    let mut d = 2u64;
    while d <= TRIAL_DIVISION_LIMIT {
        let dd = BigInt::from(d);
        if &dd * &dd > m {
            break;
        }
        strip(&mut m, &dd, &mut out);
        d += if d == 2 { 1 } else { 2 };
    }
    if m.is_one() {
        return Ok(out);
    }
    let limit = BigInt::from(TRIAL_DIVISION_LIMIT);
    if &limit * &limit > m {
        out.push((m, 1));
        out.sort();
        return Ok(out);
    }
    for h in hints {
        if !is_probable_prime(h) {
            return Err(Error::BadHints(format!("{h} is not prime")));
        }
        strip(&mut m, h, &mut out);
    }
    if m.is_one() {
        out.sort();
        Ok(out)
    } else if is_probable_prime(&m) {
        out.push((m, 1));
        out.sort();
        Ok(out)
    } else {
        Err(Error::FactorizationNeeded(m.to_string()))
    }
}

/// Valuations `v_p(gcd(F, G))` along the first `depth` steps of the orbit of
/// `(a : b)` under `(F, G)`, where `e = v_p(Res(F, G))`.
pub(crate) fn padic_valuations(
    f: &BinaryForm,
    g: &BinaryForm,
    a: &BigInt,
    b: &BigInt,
    p: &BigInt,
    e: u32,
    depth: u32,
) -> Vec<u32> {
    let mut prec = (depth + 1) * e + 1;
    let mut modulus = p.pow(prec);
    let mut x = a.mod_floor(&modulus);
    let mut y = b.mod_floor(&modulus);
    let mut out = Vec::with_capacity(depth as usize);
    for _ in 0..depth {
        let fx = f.eval_mod(&x, &y, &modulus);
        let gy = g.eval_mod(&x, &y, &modulus);
        let val = |z: &BigInt| {
            let mut v = 0u32;
            let mut z = z.clone();
            while v < prec && !z.is_zero() && (&z % p).is_zero() {
                z /= p;
                v += 1;
            }
            if z.is_zero() {
                prec
            } else {
                v
            }
        };
        let v = val(&fx).min(val(&gy));
        debug_assert!(v <= e);
        let pv = p.pow(v);
        prec -= v;
        modulus = p.pow(prec);
        x = (fx / &pv).mod_floor(&modulus);
        y = (gy / &pv).mod_floor(&modulus);
        out.push(v);
    }
    out
}

/// `sum_k d^-(k+1) Phi_inf(x_k)` for `k < depth`, with `Phi_inf = log max(|F|,
/// |G|) - d log max(|a|, |b|)`, or `None` when the balls lose too much
/// precision.
pub(crate) fn archimedean_sum(
    f_form: &BinaryForm,
    g_form: &BinaryForm,
    a: &BigInt,
    b: &BigInt,
    depth: u32,
    prec: u32,
) -> Option<BallReal> {
    let m = a.abs().max(b.abs());
    let mut alpha = BallReal::exact(BigRat::new(a.clone(), m.clone()), prec);
    let mut beta = BallReal::exact(BigRat::new(b.clone(), m), prec);
    let mut total = BallReal::zero(prec);
    let d = BigRat::from_integer(f_form.degree().into());
    let mut weight = BigRat::one();
    let eps = BigRat::new(BigInt::one(), BigInt::one() << (prec as usize + 64));
    for _ in 0..depth {
        weight /= &d;
        let f = f_form.eval_ball(&alpha, &beta);
        let g = g_form.eval_ball(&alpha, &beta);
        let top = f.abs().max(&g.abs()).ln()?;
        let bottom = alpha.abs().max(&beta.abs()).ln()?;
        let phi_inf = &top - &bottom.scale(&d);
        total = &total + &phi_inf.scale(&weight);
        let s = f.mid().abs().max(g.mid().abs());
        if s.is_zero() {
            return None;
        }
        let inv = round_dyadic(&s.recip(), 32).0;
        alpha = flush_tiny(f.scale(&inv), &eps);
        beta = flush_tiny(g.scale(&inv), &eps);
    }
    Some(total)
}

/// Replaces a ball inside `[-eps, eps]` by `0 +- eps`. On escaping orbits one
/// coordinate shrinks doubly exponentially and its exact dyadic would double
/// in size every step.
fn flush_tiny(x: BallReal, eps: &BigRat) -> BallReal {
    if &(x.mid().abs() + x.rad()) <= eps {
        BallReal::with_radius(BigRat::zero(), eps.clone(), x.prec())
    } else {
        x
    }
}

/// Neron-Tate height from local contributions. Primes of the duplication
/// resultant above 10^6 must be supplied in `prime_hints`.
pub fn neron_tate_local(
    curve: &EllipticCurve,
    p: &EPoint,
    tol: f64,
    prime_hints: &[BigInt],
) -> Result<HeightValue> {
    let tol_q = tolerance_rat(tol)?;
    if !curve.contains(p) {
        return Err(Error::Invalid(format!("{p} is not on the curve")));
    }
    let dup = Duplication::new(curve);
    let base_prec = precision_for(tol, 0);
    if dup.is_torsion(p) {
        return Ok(HeightValue::zero(base_prec));
    }
    let primes = factor_with_hints(&dup.bound.resultant, prime_hints)?;
    let half = BigRat::new(BigInt::one(), BigInt::from(2));
    let depth = dup.depth_for(&(&tol_q * &half), 64);
    let (a, b) = dup.model_pair(p);

    let mut prec = base_prec + 4 * depth;
    loop {
        let h0 = ln_bigint_abs(&a.abs().max(b.abs()), prec);
        if let Some(arch) = archimedean_sum(&dup.phi, &dup.psi2, &a, &b, depth, prec) {
            let mut total = &h0 + &arch;
            for (q, e) in &primes {
                let vals = padic_valuations(&dup.phi, &dup.psi2, &a, &b, q, *e, depth);
                let mut coeff = BigRat::zero();
                let mut w = BigRat::one();
                for v in vals {
                    w /= BigRat::from_integer(4.into());
                    coeff += &w * BigRat::from_integer(v.into());
                }
                if !coeff.is_zero() {
                    total = &total - &ln_bigint_abs(q, prec).scale(&coeff);
                }
            }
            let value = total.scale(&half);
            if value.rad() <= &(&tol_q * &half) {
                return Ok(HeightValue::from_ball(value.inflate(&dup.tail(depth))));
            }
        }
        if prec >= MAX_PRECISION {
            return Err(Error::PrecisionExhausted {
                bits: prec,
                reason: "archimedean doubling orbit".into(),
            });
        }
        prec = (prec * 2).min(MAX_PRECISION);
    }
}

/// Number of primes dividing the duplication resultant, for diagnostics.
pub fn bad_prime_count(curve: &EllipticCurve) -> Option<usize> {
    let dup = Duplication::new(curve);
    factor_with_hints(&dup.bound.resultant, &[]).ok().map(|v| v.len())
}
