//! Real ball arithmetic with rational midpoints.
//!
//! A [`BallReal`] is a pair `(mid, rad)` standing for the closed interval
//! `[mid - rad, mid + rad]`. Midpoints are exact rationals and stay exact for
//! as long as their size is reasonable; once a midpoint grows past the working
//! precision it is rounded to a dyadic and the rounding error is folded into
//! the radius. Every operation is outward-rounded: the exact result of the
//! operation applied to any members of the input balls lies in the output.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type BigRat = BigRational;

pub const DEFAULT_PRECISION: u32 = 128;
pub const MAX_PRECISION: u32 = 4096;

const RADIUS_BITS: u64 = 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallReal {
    mid: BigRat,
    rad: BigRat,
    prec: u32,
}

pub fn rat(n: i64, d: i64) -> BigRat {
    BigRat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> BigRat {
    BigRat::from_integer(n.into())
}

fn pow2(e: i64) -> BigRat {
    if e >= 0 {
        BigRat::from_integer(BigInt::one() << (e as usize))
    } else {
        BigRat::new(BigInt::one(), BigInt::one() << ((-e) as usize))
    }
}

fn rat_size(q: &BigRat) -> u64 {
    q.numer().bits() + q.denom().bits()
}

/// Rounds `q` to a dyadic with about `sig` significant bits. Returns the
/// rounded value and an upper bound on the absolute rounding error.
pub(crate) fn round_dyadic(q: &BigRat, sig: u64) -> (BigRat, BigRat) {
    if q.is_zero() {
        return (BigRat::zero(), BigRat::zero());
    }
    let e = q.numer().bits() as i64 - q.denom().bits() as i64;
    let shift = sig as i64 - e;
    let (n, d) = if shift >= 0 {
        (q.numer() << (shift as usize), q.denom().clone())
    } else {
        (q.numer().clone(), q.denom() << ((-shift) as usize))
    };
    let m = n.div_floor(&d);
    let ulp = pow2(-shift);
    (BigRat::from_integer(m) * &ulp, ulp)
}

/// Smallest dyadic with `RADIUS_BITS` significant bits that is `>= r`.
fn round_up(r: &BigRat) -> BigRat {
    if r.is_zero() || rat_size(r) <= 2 * RADIUS_BITS {
        return r.clone();
    }
    let e = r.numer().bits() as i64 - r.denom().bits() as i64;
    let shift = RADIUS_BITS as i64 - e;
    let (n, d) = if shift >= 0 {
        (r.numer() << (shift as usize), r.denom().clone())
    } else {
        (r.numer().clone(), r.denom() << ((-shift) as usize))
    };
    let m = n.div_ceil(&d);
    BigRat::from_integer(m) * pow2(-shift)
}

impl BallReal {
    pub fn exact(q: BigRat, prec: u32) -> Self {
        BallReal { mid: q, rad: BigRat::zero(), prec }.normalized()
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        Self::exact(BigRat::from_integer(n.into()), prec)
    }

    pub fn zero(prec: u32) -> Self {
        Self::exact(BigRat::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::exact(BigRat::one(), prec)
    }

    /// Builds a ball from a midpoint and a radius (the radius is rounded up).
    pub fn with_radius(mid: BigRat, rad: BigRat, prec: u32) -> Self {
        assert!(!rad.is_negative(), "negative radius");
        BallReal { mid, rad, prec }.normalized()
    }

    /// Smallest ball containing `[lo, hi]`.
    pub fn from_interval(lo: BigRat, hi: BigRat, prec: u32) -> Self {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let mid = (&lo + &hi) / rat_int(2);
        let rad = (&hi - &lo) / rat_int(2);
        Self::with_radius(mid, rad, prec)
    }

    pub fn mid(&self) -> &BigRat {
        &self.mid
    }

    pub fn rad(&self) -> &BigRat {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn lower(&self) -> BigRat {
        &self.mid - &self.rad
    }

    pub fn upper(&self) -> BigRat {
        &self.mid + &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains(&self, q: &BigRat) -> bool {
        (&self.mid - q).abs() <= self.rad
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }

    pub fn overlaps(&self, other: &BallReal) -> bool {
        (&self.mid - &other.mid).abs() <= &self.rad + &other.rad
    }

    /// True when `other` lies entirely inside `self`.
    pub fn encloses(&self, other: &BallReal) -> bool {
        self.lower() <= other.lower() && other.upper() <= self.upper()
    }

    pub fn is_positive(&self) -> bool {
        self.lower().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.upper().is_negative()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64().unwrap_or(f64::NAN)
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn with_prec(mut self, prec: u32) -> Self {
        self.prec = prec;
        self.normalized()
    }

    /// Widens the radius by `extra`.
    pub fn inflate(&self, extra: &BigRat) -> Self {
        Self::with_radius(self.mid.clone(), &self.rad + extra.abs(), self.prec)
    }

    fn normalized(mut self) -> Self {
        if rat_size(&self.mid) > 2 * self.prec as u64 + 64 {
            let (m, err) = round_dyadic(&self.mid, self.prec as u64 + 32);
            self.mid = m;
            self.rad += err;
        }
        self.rad = round_up(&self.rad);
        self
    }

    fn prec_with(&self, other: &BallReal) -> u32 {
        self.prec.max(other.prec)
    }

    pub fn abs(&self) -> BallReal {
        if self.mid.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn max(&self, other: &BallReal) -> BallReal {
        let lo = self.lower().max(other.lower());
        let hi = self.upper().max(other.upper());
        if self.lower() >= other.upper() {
            return self.clone();
        }
        if other.lower() >= self.upper() {
            return other.clone();
        }
        Self::from_interval(lo, hi, self.prec_with(other))
    }

    pub fn min(&self, other: &BallReal) -> BallReal {
        -(&(-self)).max(&(-other))
    }

    /// Smallest ball containing both inputs.
    pub fn hull(&self, other: &BallReal) -> BallReal {
        let lo = self.lower().min(other.lower());
        let hi = self.upper().max(other.upper());
        Self::from_interval(lo, hi, self.prec_with(other))
    }

    pub fn scale(&self, q: &BigRat) -> BallReal {
        Self::with_radius(&self.mid * q, &self.rad * q.abs(), self.prec)
    }

    /// Division; `None` when the divisor contains zero.
    pub fn div(&self, other: &BallReal) -> Option<BallReal> {
        if other.contains_zero() {
            return None;
        }
        let prec = self.prec_with(other);
        if other.is_exact() {
            return Some(Self::with_radius(
                &self.mid / &other.mid,
                &self.rad / other.mid.abs(),
                prec,
            ));
        }
        // |x/y - m1/m2| <= (r1 + |m1/m2| r2) / (|m2| - r2)
        let q = &self.mid / &other.mid;
        let denom = other.mid.abs() - &other.rad;
        let rad = (&self.rad + q.abs() * &other.rad) / denom;
        Some(Self::with_radius(q, rad, prec))
    }

    pub fn recip(&self) -> Option<BallReal> {
        BallReal::one(self.prec).div(self)
    }

    pub fn powi(&self, k: u32) -> BallReal {
        let mut acc = BallReal::one(self.prec);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn square(&self) -> BallReal {
        let a = self.abs();
        let lo = a.lower().max(BigRat::zero());
        let hi = a.upper();
        if self.contains_zero() {
            Self::from_interval(BigRat::zero(), &hi * &hi, self.prec)
        } else {
            Self::from_interval(&lo * &lo, &hi * &hi, self.prec)
        }
    }

    /// Natural logarithm; `None` unless the ball is strictly positive.
    pub fn ln(&self) -> Option<BallReal> {
        if !self.is_positive() {
            return None;
        }
        if self.is_exact() {
            return Some(ln_rat(&self.mid, self.prec));
        }
        let lo = ln_rat(&self.lower(), self.prec);
        let hi = ln_rat(&self.upper(), self.prec);
        Some(lo.hull(&hi))
    }

    pub fn exp(&self) -> BallReal {
        if self.is_exact() {
            return exp_rat(&self.mid, self.prec);
        }
        let lo = exp_rat(&self.lower(), self.prec);
        let hi = exp_rat(&self.upper(), self.prec);
        lo.hull(&hi)
    }

    /// Square root of the non-negative part of the ball.
    pub fn sqrt(&self) -> BallReal {
        let lo = self.lower().max(BigRat::zero());
        let hi = self.upper().max(BigRat::zero());
        if self.is_exact() {
            return sqrt_rat(&lo, self.prec);
        }
        sqrt_rat(&lo, self.prec).hull(&sqrt_rat(&hi, self.prec))
    }

    /// `self^(1/k)` for a positive ball.
    pub fn root(&self, k: u32) -> Option<BallReal> {
        let l = self.ln()?;
        Some(l.scale(&rat(1, k as i64)).exp())
    }

    /// Decimal rendering with `sig` significant digits of the midpoint.
    pub fn to_decimal(&self, sig: usize) -> String {
        decimal_string(&self.mid, sig)
    }
}

impl fmt::Display for BallReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", decimal_string(&self.mid, 20))
        } else {
            write!(
                f,
                "{} +/- {:.3e}",
                decimal_string(&self.mid, 20),
                self.rad_f64()
            )
        }
    }
}

/// Rounds a rational to `sig` significant decimal digits in scientific or
/// plain notation (plain when the exponent is small).
pub fn decimal_string(q: &BigRat, sig: usize) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let sig = sig.max(1);
    let neg = q.is_negative();
    let a = q.abs();
    // exponent estimate e with 10^e <= a < 10^(e+1)
    let approx = a.numer().bits() as f64 - a.denom().bits() as f64;
    let mut e = (approx * std::f64::consts::LOG10_2).floor() as i64 - 1;
    let ten = BigRat::from_integer(BigInt::from(10));
    let pow10 = |k: i64| -> BigRat {
        if k >= 0 {
            BigRat::from_integer(num_traits::pow(BigInt::from(10), k as usize))
        } else {
            BigRat::one() / BigRat::from_integer(num_traits::pow(BigInt::from(10), (-k) as usize))
        }
    };
    while pow10(e + 1) <= a {
        e += 1;
    }
    while pow10(e) > a {
        e -= 1;
    }
    let scaled = &a * pow10(sig as i64 - 1 - e);
    let mut digits = (scaled + rat(1, 2)).floor().to_integer();
    if BigRat::from_integer(digits.clone()) >= pow10(sig as i64) {
        digits /= BigInt::from(10);
        e += 1;
    }
    let _ = ten;
    let ds = digits.to_string();
    let body = if (-5..=15).contains(&e) {
        if e >= sig as i64 - 1 {
            let mut s = ds.clone();
            s.extend(std::iter::repeat('0').take((e - (sig as i64 - 1)) as usize));
            s
        } else if e >= 0 {
            let (int, frac) = ds.split_at((e + 1) as usize);
            let frac = frac.trim_end_matches('0');
            if frac.is_empty() {
                int.to_string()
            } else {
                format!("{int}.{frac}")
            }
        } else {
            let zeros = "0".repeat((-e - 1) as usize);
            format!("0.{zeros}{}", ds.trim_end_matches('0'))
        }
    } else {
        let (h, t) = ds.split_at(1);
        let t = t.trim_end_matches('0');
        if t.is_empty() {
            format!("{h}e{e}")
        } else {
            format!("{h}.{t}e{e}")
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

impl Add for &BallReal {
    type Output = BallReal;
    fn add(self, rhs: &BallReal) -> BallReal {
        BallReal::with_radius(
            &self.mid + &rhs.mid,
            &self.rad + &rhs.rad,
            self.prec_with(rhs),
        )
    }
}

impl Sub for &BallReal {
    type Output = BallReal;
    fn sub(self, rhs: &BallReal) -> BallReal {
        BallReal::with_radius(
            &self.mid - &rhs.mid,
            &self.rad + &rhs.rad,
            self.prec_with(rhs),
        )
    }
}

impl Mul for &BallReal {
    type Output = BallReal;
    fn mul(self, rhs: &BallReal) -> BallReal {
        let rad = self.mid.abs() * &rhs.rad + rhs.mid.abs() * &self.rad + &self.rad * &rhs.rad;
        BallReal::with_radius(&self.mid * &rhs.mid, rad, self.prec_with(rhs))
    }
}

impl Neg for &BallReal {
    type Output = BallReal;
    fn neg(self) -> BallReal {
        BallReal {
            mid: -&self.mid,
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }
}

impl Neg for BallReal {
    type Output = BallReal;
    fn neg(self) -> BallReal {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for BallReal {
            type Output = BallReal;
            fn $m(self, rhs: BallReal) -> BallReal {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&BallReal> for BallReal {
            type Output = BallReal;
            fn $m(self, rhs: &BallReal) -> BallReal {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

// ---------------------------------------------------------------------------
// Elementary functions on exact rationals, evaluated in fixed point with
// explicit error accounting.

fn guard_bits(prec: u32) -> usize {
    prec as usize + 48
}

fn fixed_to_ball(value: BigInt, ulps: u64, w: usize, prec: u32) -> BallReal {
    let scale = BigInt::one() << w;
    BallReal::with_radius(
        BigRat::new(value, scale.clone()),
        BigRat::new(BigInt::from(ulps), scale),
        prec,
    )
}

/// `atanh(z)` in fixed point for `0 <= z <= 1/3` given as `z_fix / 2^w`.
/// Returns the fixed-point sum and the number of ulps of error.
fn atanh_fixed(z_fix: &BigInt, w: usize) -> (BigInt, u64) {
    let z2 = (z_fix * z_fix) >> w;
    let mut term = z_fix.clone();
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !term.is_zero() {
        sum += &term / BigInt::from(2 * k + 1);
        term = (&term * &z2) >> w;
        k += 1;
    }
    // each step truncates once; the truncated power carries at most k ulps of
    // error, and the dropped tail is below one ulp.
    (sum, 4 * k + 16)
}

fn ln2_fixed(w: usize) -> (BigInt, u64) {
    let third = (BigInt::one() << w) / BigInt::from(3);
    let (s, err) = atanh_fixed(&third, w);
    (s << 1, 2 * err + 2)
}

/// `ln(2)` as a ball.
pub fn ln2(prec: u32) -> BallReal {
    let w = guard_bits(prec);
    let (v, e) = ln2_fixed(w);
    fixed_to_ball(v, e, w, prec)
}

/// Natural logarithm of a positive integer.
pub fn ln_biguint(n: &BigUint, prec: u32) -> BallReal {
    assert!(!n.is_zero(), "ln of zero");
    let w = guard_bits(prec);
    let bits = n.bits() as usize;
    if bits == 1 {
        return BallReal::zero(prec);
    }
    // n = y * 2^(bits-1) with y in [1, 2); y is represented by its top w+1 bits
    let (mant, extra_err) = if bits > w + 1 {
        let shift = bits - (w + 1);
        (n >> shift, true)
    } else {
        (n << (w + 1 - bits), false)
    };
    let mant = BigInt::from_biguint(Sign::Plus, mant);
    let one = BigInt::one() << w;
    // z = (y - 1)/(y + 1)
    let z_fix = ((&mant - &one) << w) / (&mant + &one);
    let (s, e1) = atanh_fixed(&z_fix, w);
    let (l2, e2) = ln2_fixed(w);
    let k = BigInt::from(bits - 1);
    let value = (s << 1) + &l2 * &k;
    let ulps = 2 * e1 + 4 + e2 * (bits as u64) + if extra_err { 4 } else { 0 };
    fixed_to_ball(value, ulps, w, prec)
}

pub fn ln_bigint_abs(n: &BigInt, prec: u32) -> BallReal {
    ln_biguint(n.magnitude(), prec)
}

/// Natural logarithm of a positive rational.
pub fn ln_rat(q: &BigRat, prec: u32) -> BallReal {
    assert!(q.is_positive(), "ln of non-positive rational");
    let a = ln_biguint(q.numer().magnitude(), prec);
    if q.denom().is_one() {
        return a;
    }
    let b = ln_biguint(q.denom().magnitude(), prec);
    &a - &b
}

/// `exp(q)` for a rational `q`.
pub fn exp_rat(q: &BigRat, prec: u32) -> BallReal {
    if q.is_zero() {
        return BallReal::one(prec);
    }
    let w = guard_bits(prec);
    let qf = q.to_f64().unwrap_or(0.0);
    assert!(qf.abs() < 1e15, "exp argument out of range");
    let k = (qf / std::f64::consts::LN_2).round() as i64;
    // r = q - k ln 2, as a fixed-point value with error
    let (l2, l2e) = ln2_fixed(w);
    let q_fix = (q * BigRat::from_integer(BigInt::one() << w)).floor().to_integer();
    let r_fix = &q_fix - &l2 * BigInt::from(k);
    let r_err = 1 + l2e * k.unsigned_abs();
    let one = BigInt::one() << w;
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut j: u64 = 1;
    loop {
        term = (&term * &r_fix >> w) / BigInt::from(j);
        if term.is_zero() {
            break;
        }
        sum += &term;
        j += 1;
    }
    // |r| < 0.4 so exp(r) < 1.5 and the derivative bound is the same.
    let ulps = 2 * (j + 8) + 2 * r_err;
    let base = fixed_to_ball(sum, ulps, w, prec);
    base.scale(&pow2(k))
}

/// Square root of a non-negative rational.
pub fn sqrt_rat(q: &BigRat, prec: u32) -> BallReal {
    assert!(!q.is_negative(), "sqrt of negative rational");
    if q.is_zero() {
        return BallReal::zero(prec);
    }
    let (nr, dr) = (q.numer().sqrt(), q.denom().sqrt());
    if &(&nr * &nr) == q.numer() && &(&dr * &dr) == q.denom() {
        return BallReal::exact(BigRat::new(nr, dr), prec);
    }
    let w = guard_bits(prec);
    let scaled = (q * BigRat::from_integer(BigInt::one() << (2 * w)))
        .floor()
        .to_integer();
    let s = scaled.sqrt();
    let lo = BigRat::new(s.clone(), BigInt::one() << w);
    let hi = BigRat::new(s + 1, BigInt::one() << w);
    BallReal::from_interval(lo, hi, prec)
}
