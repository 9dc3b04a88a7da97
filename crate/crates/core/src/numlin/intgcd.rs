//! Lehmer's gcd for large integers.
//!
//! `num-bigint`'s gcd is a binary algorithm that is quadratic with a poor
//! constant for operands of a few hundred thousand bits, which is exactly the
//! size reached when iterating surface automorphisms. Lehmer's method works
//! on the leading 63 bits and applies the accumulated 2x2 cofactor matrix to
//! the full numbers once per batch.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

const LEHMER_THRESHOLD: u64 = 256;

/// Greatest common divisor of two non-negative integers.
pub fn gcd_big(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = if a >= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    while b.bits() > LEHMER_THRESHOLD {
        let na = a.bits();
        if na - b.bits() > 32 {
            let r = &a % &b;
            a = b;
            b = r;
            continue;
        }
        let shift = na - 63;
        let mut x = (&a >> shift).to_i128().unwrap();
        let mut y = (&b >> shift).to_i128().unwrap();
        let (mut ca, mut cb, mut cc, mut cd): (i128, i128, i128, i128) = (1, 0, 0, 1);
        loop {
            if y + cc == 0 || y + cd == 0 {
                break;
            }
            let q = (x + ca) / (y + cc);
            if q != (x + cb) / (y + cd) {
                break;
            }
            let t = ca - q * cc;
            ca = cc;
            cc = t;
            let t = cb - q * cd;
            cb = cd;
            cd = t;
            let t = x - q * y;
            x = y;
            y = t;
        }
        if cb == 0 {
            let r = &a % &b;
            a = b;
            b = r;
        } else {
            let ai = BigInt::from_biguint(Sign::Plus, a);
            let bi = BigInt::from_biguint(Sign::Plus, b);
            let na = &ai * BigInt::from(ca) + &bi * BigInt::from(cb);
            let nb = &ai * BigInt::from(cc) + &bi * BigInt::from(cd);
            a = na.magnitude().clone();
            b = nb.magnitude().clone();
            if a < b {
                std::mem::swap(&mut a, &mut b);
            }
        }
    }
    a.gcd(&b)
}

/// Gcd of signed integers, always non-negative.
pub fn gcd_bigint(a: &BigInt, b: &BigInt) -> BigInt {
    BigInt::from_biguint(Sign::Plus, gcd_big(a.magnitude(), b.magnitude()))
}

/// Gcd of a list; zero for an empty or all-zero list.
pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    let mut g = BigUint::zero();
    for x in xs {
        if g == BigUint::from(1u32) {
            break;
        }
        g = gcd_big(&g, x.magnitude());
    }
    BigInt::from_biguint(Sign::Plus, g)
}
