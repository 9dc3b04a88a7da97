//! Dense univariate polynomials over Q.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ball::{rat_int, BigRat};

/// Polynomial with rational coefficients in ascending degree order.
/// The coefficient vector never ends in a zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<BigRat>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| rat_int(x)).collect())
    }

    pub fn from_bigints(c: &[BigInt]) -> Self {
        Self::new(c.iter().map(|x| BigRat::from_integer(x.clone())).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(BigRat::one())
    }

    pub fn constant(c: BigRat) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `t`.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    /// `t - r`.
    pub fn linear_root(r: &BigRat) -> Self {
        Self::new(vec![-r.clone(), BigRat::one()])
    }

    pub fn monomial(c: BigRat, k: usize) -> Self {
        let mut v = vec![BigRat::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> BigRat {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn lc(&self) -> BigRat {
        self.coeffs.last().cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.lc();
        self.scale(&(BigRat::one() / lc))
    }

    pub fn scale(&self, c: &BigRat) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &BigRat) -> BigRat {
        let mut acc = BigRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat_int(i as i64))
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = RatPoly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `t^deg * p(1/t)`.
    pub fn reverse(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// `p(-t)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.deg();
        if self.coeffs.len() < d.coeffs.len() {
            return (RatPoly::zero(), self.clone());
        }
        let inv_lc = BigRat::one() / d.lc();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigRat::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv_lc;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (RatPoly::new(q), RatPoly::new(r))
    }

    pub fn rem(&self, d: &RatPoly) -> RatPoly {
        self.div_rem(d).1
    }

    /// Exact quotient when `d` divides `self`.
    pub fn exact_div(&self, d: &RatPoly) -> Option<RatPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &RatPoly) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let r = a.rem(&b).monic();
            a = b;
            b = r;
        }
        a
    }

    pub fn lcm(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let g = self.gcd(other);
        (self * other).exact_div(&g).expect("gcd divides").monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g`, `g` monic.
    pub fn xgcd(&self, other: &RatPoly) -> (RatPoly, RatPoly, RatPoly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (RatPoly::one(), RatPoly::zero());
        let (mut t0, mut t1) = (RatPoly::zero(), RatPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = BigRat::one() / r0.lc();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Inverse of `self` modulo `m`, if the two are coprime.
    pub fn inverse_mod(&self, m: &RatPoly) -> Option<RatPoly> {
        let (g, s, _) = self.rem(m).xgcd(m);
        (g.is_one_poly()).then(|| s.rem(m))
    }

    pub fn is_one_poly(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Composition `self(g(t))`.
    pub fn compose(&self, g: &RatPoly) -> RatPoly {
        let mut acc = RatPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &RatPoly::constant(c.clone());
        }
        acc
    }

    /// Rational content `c` and primitive integer polynomial `q` with
    /// `self = c * q` and a positive leading coefficient of `q`.
    pub fn primitive_part(&self) -> (BigRat, Vec<BigInt>) {
        if self.is_zero() {
            return (BigRat::zero(), vec![]);
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRat::from_integer(den.clone())).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        let prim: Vec<BigInt> = ints.iter().map(|c| c / &g).collect();
        (BigRat::new(g, den), prim)
    }

    /// Displays in the variable `var`.
    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if i == 0 {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a}*{mono}"));
            }
        }
        out
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("t"))
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

/// Squarefree decomposition (Yun). Returns `(q_i, m_i)` with the `q_i` monic,
/// squarefree, pairwise coprime and `m_i` strictly increasing, such that
/// `p = lc(p) * prod q_i^m_i`.
pub fn squarefree_decomposition(p: &RatPoly) -> Vec<(RatPoly, u32)> {
    assert!(!p.is_zero(), "squarefree decomposition of zero");
    let mut out = Vec::new();
    if p.deg() == 0 {
        return out;
    }
    let f = p.monic();
    let df = f.derivative();
    let a = f.gcd(&df);
    let mut b = f.exact_div(&a).unwrap();
    let mut c = df.exact_div(&a).unwrap();
    let mut d = &c - &b.derivative();
    let mut i = 1u32;
    while b.deg() > 0 {
        let g = b.gcd(&d);
        b = b.exact_div(&g).unwrap();
        c = d.exact_div(&g).unwrap();
        d = &c - &b.derivative();
        if g.deg() > 0 {
            out.push((g, i));
        }
        i += 1;
    }
    out
}
