//! Elliptic curves in long Weierstrass form over Q and their group law.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::heights::binary_form::BinaryForm;
use crate::numlin::ball::{decimal_string, BigRat};

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticCurve {
    a: [BigRat; 5],
    b2: BigRat,
    b4: BigRat,
    b6: BigRat,
    b8: BigRat,
    discriminant: BigRat,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EPoint {
    Infinity,
    Affine(BigRat, BigRat),
}

impl EPoint {
    pub fn affine(x: BigRat, y: BigRat) -> Self {
        EPoint::Affine(x, y)
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        EPoint::Affine(BigRat::from_integer(x.into()), BigRat::from_integer(y.into()))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, EPoint::Infinity)
    }

    pub fn x(&self) -> Option<&BigRat> {
        match self {
            EPoint::Infinity => None,
            EPoint::Affine(x, _) => Some(x),
        }
    }
}

impl fmt::Display for EPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EPoint::Infinity => f.write_str("O"),
            EPoint::Affine(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

impl EllipticCurve {
    pub fn new(a1: BigRat, a2: BigRat, a3: BigRat, a4: BigRat, a6: BigRat) -> Result<Self> {
        let b2 = &a1 * &a1 + BigRat::from_integer(4.into()) * &a2;
        let b4 = BigRat::from_integer(2.into()) * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + BigRat::from_integer(4.into()) * &a6;
        let b8 = &a1 * &a1 * &a6 + BigRat::from_integer(4.into()) * &a2 * &a6
            - &a1 * &a3 * &a4
            + &a2 * &a3 * &a3
            - &a4 * &a4;
        let n = |k: i64| BigRat::from_integer(k.into());
        let discriminant = -(&b2 * &b2 * &b8) - n(8) * &b4 * &b4 * &b4 - n(27) * &b6 * &b6
            + n(9) * &b2 * &b4 * &b6;
        if discriminant.is_zero() {
            return Err(Error::Invalid("singular Weierstrass equation".into()));
        }
        Ok(EllipticCurve {
            a: [a1, a2, a3, a4, a6],
            b2,
            b4,
            b6,
            b8,
            discriminant,
        })
    }

    pub fn from_ints(a: [i64; 5]) -> Result<Self> {
        let q = |k: i64| BigRat::from_integer(k.into());
        Self::new(q(a[0]), q(a[1]), q(a[2]), q(a[3]), q(a[4]))
    }

    /// Coefficients `[a1, a2, a3, a4, a6]`.
    pub fn coefficients(&self) -> &[BigRat; 5] {
        &self.a
    }

    pub fn discriminant(&self) -> &BigRat {
        &self.discriminant
    }

    pub fn b_invariants(&self) -> [&BigRat; 4] {
        [&self.b2, &self.b4, &self.b6, &self.b8]
    }

    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|c| c.is_integer())
    }

    pub fn contains(&self, p: &EPoint) -> bool {
        match p {
            EPoint::Infinity => true,
            EPoint::Affine(x, y) => {
                let [a1, a2, a3, a4, a6] = &self.a;
                let lhs = y * y + a1 * x * y + a3 * y;
                let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                lhs == rhs
            }
        }
    }

    /// Validated affine point.
    pub fn point(&self, x: BigRat, y: BigRat) -> Result<EPoint> {
        let p = EPoint::Affine(x, y);
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(Error::Invalid(format!("{p} is not on the curve")))
        }
    }

    pub fn neg(&self, p: &EPoint) -> EPoint {
        match p {
            EPoint::Infinity => EPoint::Infinity,
            EPoint::Affine(x, y) => {
                EPoint::Affine(x.clone(), -y - &self.a[0] * x - &self.a[2])
            }
        }
    }

    pub fn add(&self, p: &EPoint, q: &EPoint) -> EPoint {
        let [a1, a2, a3, a4, a6] = &self.a;
        let (x1, y1, x2, y2) = match (p, q) {
            (EPoint::Infinity, _) => return q.clone(),
            (_, EPoint::Infinity) => return p.clone(),
            (EPoint::Affine(x1, y1), EPoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let (lambda, nu) = if x1 != x2 {
            let dx = x2 - x1;
            ((y2 - y1) / &dx, (y1 * x2 - y2 * x1) / &dx)
        } else {
            let den = BigRat::from_integer(2.into()) * y1 + a1 * x1 + a3;
            if den.is_zero() || y1 != y2 {
                return EPoint::Infinity;
            }
            let three = BigRat::from_integer(3.into());
            let two = BigRat::from_integer(2.into());
            let num_l = &three * x1 * x1 + &two * a2 * x1 + a4 - a1 * y1;
            let num_n = -(x1 * x1 * x1) + a4 * x1 + &two * a6 - a3 * y1;
            (num_l / &den, num_n / &den)
        };
        let x3 = &lambda * &lambda + a1 * &lambda - a2 - x1 - x2;
        let y3 = -(&lambda + a1) * &x3 - nu - a3;
        EPoint::Affine(x3, y3)
    }

    pub fn sub(&self, p: &EPoint, q: &EPoint) -> EPoint {
        self.add(p, &self.neg(q))
    }

    pub fn double(&self, p: &EPoint) -> EPoint {
        self.add(p, p)
    }

    /// `m P` by double-and-add.
    pub fn mul(&self, m: i64, p: &EPoint) -> EPoint {
        let base = if m < 0 { self.neg(p) } else { p.clone() };
        let mut k = m.unsigned_abs();
        let mut acc = EPoint::Infinity;
        let mut run = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &run);
            }
            k >>= 1;
            if k > 0 {
                run = self.double(&run);
            }
        }
        acc
    }

    /// An integral model `x = u^2 x'`-scaled, with the scale `u`.
    pub fn integral_model(&self) -> (EllipticCurve, BigInt) {
        let mut u = BigInt::one();
        for c in &self.a {
            u = u.lcm(c.denom());
        }
        if u.is_one() {
            return (self.clone(), u);
        }
        let uq = BigRat::from_integer(u.clone());
        let pw = |k: u32| {
            let mut r = BigRat::one();
            for _ in 0..k {
                r *= &uq;
            }
            r
        };
        let [a1, a2, a3, a4, a6] = &self.a;
        let model = EllipticCurve::new(
            a1 * pw(1),
            a2 * pw(2),
            a3 * pw(3),
            a4 * pw(4),
            a6 * pw(6),
        )
        .expect("scaling preserves nonsingularity");
        (model, u)
    }

    /// Image of a point under the scaling `(x, y) -> (u^2 x, u^3 y)`.
    pub fn scale_point(p: &EPoint, u: &BigInt) -> EPoint {
        match p {
            EPoint::Infinity => EPoint::Infinity,
            EPoint::Affine(x, y) => {
                let u2 = BigRat::from_integer(u * u);
                let u3 = &u2 * BigRat::from_integer(u.clone());
                EPoint::Affine(x * u2, y * u3)
            }
        }
    }

    /// Duplication forms `(phi, psi2)` with `x(2P) = phi(x, 1) / psi2(x, 1)`.
    /// Integer coefficients require an integral curve.
    pub fn duplication_forms(&self) -> (BinaryForm, BinaryForm) {
        assert!(self.is_integral(), "duplication forms need an integral model");
        let z = |q: &BigRat| q.to_integer();
        let (b2, b4, b6, b8) = (z(&self.b2), z(&self.b4), z(&self.b6), z(&self.b8));
        let phi = BinaryForm::new(vec![
            -b8.clone(),
            -BigInt::from(2) * &b6,
            -b4.clone(),
            BigInt::zero(),
            BigInt::one(),
        ]);
        let psi2 = BinaryForm::new(vec![
            b6,
            BigInt::from(2) * b4,
            b2,
            BigInt::from(4),
            BigInt::zero(),
        ]);
        (phi, psi2)
    }
}

impl fmt::Display for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["a1", "a2", "a3", "a4", "a6"];
        let parts: Vec<String> = names
            .iter()
            .zip(self.a.iter())
            .map(|(n, c)| format!("{n}={c}"))
            .collect();
        write!(f, "[{}] disc={}", parts.join(", "), decimal_string(&self.discriminant, 20))
    }
}

/// Primitive `(a, b)` with `x = a/b`, `b > 0`; `(1, 0)` for the identity.
pub(crate) fn x_pair(p: &EPoint) -> (BigInt, BigInt) {
    match p {
        EPoint::Infinity => (BigInt::one(), BigInt::zero()),
        EPoint::Affine(x, _) => {
            let (n, d) = (x.numer().clone(), x.denom().clone());
            debug_assert!(d.is_positive());
            (n, d)
        }
    }
}
