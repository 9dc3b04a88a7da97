//! Integer binary forms, resultants and the height constant of a pair of forms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numlin::ball::{ln_bigint_abs, BallReal, BigRat};
use crate::numlin::intgcd::gcd_bigint;
use crate::numlin::matrix::{solve, RatMatrix};
use crate::numlin::poly::RatPoly;

/// `sum c[i] X^i Y^(d-i)`; the degree is `coeffs.len() - 1` even when the
/// top coefficient vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryForm {
    coeffs: Vec<BigInt>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "binary form needs a degree");
        BinaryForm { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Homogenizes `p` to degree `d`.
    pub fn from_poly(p: &RatPoly, d: usize) -> Option<Self> {
        if p.degree().is_some_and(|k| k > d) {
            return None;
        }
        let mut c = Vec::with_capacity(d + 1);
        for i in 0..=d {
            let q = p.coeff(i);
            if !q.is_integer() {
                return None;
            }
            c.push(q.to_integer());
        }
        Some(Self::new(c))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &BigInt {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Dehomogenization at `Y = 1`.
    pub fn to_poly(&self) -> RatPoly {
        RatPoly::from_bigints(&self.coeffs)
    }

    /// Sum of absolute values of the coefficients.
    pub fn norm1(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn content(&self) -> BigInt {
        crate::numlin::intgcd::gcd_all(self.coeffs.iter())
    }

    pub fn eval(&self, a: &BigInt, b: &BigInt) -> BigInt {
        let d = self.degree();
        let mut bpow = Vec::with_capacity(d + 1);
        bpow.push(BigInt::one());
        for i in 1..=d {
            let next = &bpow[i - 1] * b;
            bpow.push(next);
        }
        let mut acc = self.coeffs[d].clone();
        for i in (0..d).rev() {
            acc *= a;
            if !self.coeffs[i].is_zero() {
                acc += &self.coeffs[i] * &bpow[d - i];
            }
        }
        acc
    }

    pub fn eval_mod(&self, a: &BigInt, b: &BigInt, m: &BigInt) -> BigInt {
        let d = self.degree();
        let mut acc = self.coeffs[d].mod_floor(m);
        let mut bp = BigInt::one();
        let mut bpow = vec![BigInt::one()];
        for _ in 1..=d {
            bp = (&bp * b).mod_floor(m);
            bpow.push(bp.clone());
        }
        for i in (0..d).rev() {
            acc = (acc * a + &self.coeffs[i] * &bpow[d - i]).mod_floor(m);
        }
        acc
    }

    pub fn eval_ball(&self, a: &BallReal, b: &BallReal) -> BallReal {
        let d = self.degree();
        let prec = a.prec();
        let mut bpow = vec![BallReal::one(prec)];
        for i in 1..=d {
            let next = &bpow[i - 1] * b;
            bpow.push(next);
        }
        let mut acc = BallReal::exact(BigRat::from_integer(self.coeffs[d].clone()), prec);
        for i in (0..d).rev() {
            acc = &acc * a;
            if !self.coeffs[i].is_zero() {
                acc = &acc + &bpow[d - i].scale(&BigRat::from_integer(self.coeffs[i].clone()));
            }
        }
        acc
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut terms = Vec::new();
        for i in (0..=d).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let mut mono = Vec::new();
            match i {
                0 => {}
                1 => mono.push("X".to_string()),
                _ => mono.push(format!("X^{i}")),
            }
            match d - i {
                0 => {}
                1 => mono.push("Y".to_string()),
                e => mono.push(format!("Y^{e}")),
            }
            let body = mono.join("*");
            let mag = c.abs();
            let term = if body.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                body
            } else {
                format!("{mag}*{body}")
            };
            if terms.is_empty() {
                terms.push(if c.is_negative() { format!("-{term}") } else { term });
            } else {
                terms.push(if c.is_negative() { format!("- {term}") } else { format!("+ {term}") });
            }
        }
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" "))
        }
    }
}

/// Sylvester matrix acting on the coefficients of `(U, V)`, forms of degree
/// `e - 1` and `d - 1`, producing `U f + V g` in degree `d + e - 1`.
pub fn sylvester(f: &BinaryForm, g: &BinaryForm) -> RatMatrix {
    let (d, e) = (f.degree(), g.degree());
    let n = d + e;
    let mut rows = vec![vec![BigRat::zero(); n]; n];
    for j in 0..e {
        for (i, c) in f.coeffs.iter().enumerate() {
            rows[i + j][j] = BigRat::from_integer(c.clone());
        }
    }
    for j in 0..d {
        for (i, c) in g.coeffs.iter().enumerate() {
            rows[i + j][e + j] = BigRat::from_integer(c.clone());
        }
    }
    RatMatrix::from_rows(rows).unwrap()
}

/// Resultant of two binary forms, up to sign.
pub fn resultant(f: &BinaryForm, g: &BinaryForm) -> BigInt {
    sylvester(f, g).det().to_integer()
}

/// Data certifying `|h(F(P):G(P)) - d h(P)| <= C` on `P^1(Q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightBound {
    pub resultant: BigInt,
    /// `max(|F|_1, |G|_1)`; bounds the upper direction.
    pub coeff_norm: BigInt,
    /// Largest `|U|_1 + |V|_1` over the Bezout identities `U F + V G = R X^(2d-1)`
    /// and `U F + V G = R Y^(2d-1)`; bounds the lower direction.
    pub bezout_norm: BigInt,
}

impl HeightBound {
    /// `C = max(log coeff_norm, log bezout_norm)` as a ball.
    pub fn constant(&self, prec: u32) -> BallReal {
        ln_bigint_abs(&self.coeff_norm, prec).max(&ln_bigint_abs(&self.bezout_norm, prec))
    }

    /// Rational upper bound for `C`.
    pub fn constant_upper(&self) -> BigRat {
        self.constant(64).upper()
    }
}

/// Computes the height bound for a pair of forms of equal degree.
pub fn height_bound(f: &BinaryForm, g: &BinaryForm) -> Result<HeightBound> {
    let d = f.degree();
    if g.degree() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: g.degree(),
        });
    }
    let syl = sylvester(f, g);
    let r = syl.det().to_integer();
    if r.is_zero() {
        return Err(Error::NotAMorphism);
    }
    let n = 2 * d;
    let rows = syl.rows();
    let mut bezout_norm = BigInt::zero();
    for target in [n - 1, 0] {
        let mut rhs = vec![BigRat::zero(); n];
        rhs[target] = BigRat::from_integer(r.clone());
        let sol = solve(&rows, &rhs).ok_or(Error::NotAMorphism)?;
        let norm: BigInt = sol
            .iter()
            .map(|c| {
                debug_assert!(c.is_integer());
                c.to_integer().abs()
            })
            .sum();
        if norm > bezout_norm {
            bezout_norm = norm;
        }
    }
    Ok(HeightBound {
        resultant: r,
        coeff_norm: f.norm1().max(g.norm1()),
        bezout_norm,
    })
}

/// Image `(F(a,b) : G(a,b))` of a primitive pair, reduced to primitive form
/// with the first nonzero coordinate positive. The common factor divides the
/// resultant `r`, so it is found by gcds against `r` only.
pub fn primitive_image(
    f: &BinaryForm,
    g: &BinaryForm,
    a: &BigInt,
    b: &BigInt,
    r: &BigInt,
) -> (BigInt, BigInt) {
    let mut x = f.eval(a, b);
    let mut y = g.eval(a, b);
    let rr = r.abs();
    let g1 = gcd_bigint(&x.mod_floor(&rr), &rr);
    let common = if g1.is_one() {
        g1
    } else {
        gcd_bigint(&g1, &y.mod_floor(&g1))
    };
    if !common.is_one() {
        x /= &common;
        y /= &common;
    }
    if x.is_negative() || (x.is_zero() && y.is_negative()) {
        x = -x;
        y = -y;
    }
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_and_display() {
        let f = BinaryForm::from_i64(&[1, 0, -1]);
        assert_eq!(f.eval(&BigInt::from(3), &BigInt::from(2)), BigInt::from(4 - 9));
        assert_eq!(f.to_string(), "-X^2 + Y^2");
        assert_eq!(
            f.eval_mod(&BigInt::from(3), &BigInt::from(2), &BigInt::from(7)),
            BigInt::from(2)
        );
    }

    #[test]
    fn resultant_of_square_map() {
        let f = BinaryForm::from_i64(&[0, 0, 1]);
        let g = BinaryForm::from_i64(&[1, 0, 0]);
        assert_eq!(resultant(&f, &g).abs(), BigInt::one());
        let hb = height_bound(&f, &g).unwrap();
        assert!(hb.constant(64).contains(&BigRat::zero()));
    }

    #[test]
    fn resultant_matches_polynomial_formula() {
        // Res(X - 2Y, X - 5Y) = +-3.
        let f = BinaryForm::from_i64(&[-2, 1]);
        let g = BinaryForm::from_i64(&[-5, 1]);
        assert_eq!(resultant(&f, &g).abs(), BigInt::from(3));
        let shared = BinaryForm::from_i64(&[-2, 1, 0]);
        let other = BinaryForm::from_i64(&[-4, 0, 1]);
        assert!(height_bound(&shared, &other).is_err());
    }

    #[test]
    fn primitive_image_removes_common_factor() {
        // z -> z^2 - 1 at z = 3/1: (8 : 1).
        let f = BinaryForm::from_i64(&[-1, 0, 1]);
        let g = BinaryForm::from_i64(&[1, 0, 0]);
        let r = resultant(&f, &g);
        let (x, y) = primitive_image(&f, &g, &BigInt::from(3), &BigInt::from(1), &r);
        assert_eq!((x, y), (BigInt::from(8), BigInt::from(1)));
        // (X^2 + Y^2 : 2XY) at (1 : 1) has a common factor 2.
        let f = BinaryForm::from_i64(&[1, 0, 1]);
        let g = BinaryForm::from_i64(&[0, 2, 0]);
        let r = resultant(&f, &g);
        let (x, y) = primitive_image(&f, &g, &BigInt::from(1), &BigInt::from(1), &r);
        assert_eq!((x, y), (BigInt::from(1), BigInt::from(1)));
    }

    #[test]
    fn bound_brackets_actual_height_change() {
        let f = BinaryForm::from_i64(&[3, -1, 2]);
        let g = BinaryForm::from_i64(&[1, 1, -1]);
        let hb = height_bound(&f, &g).unwrap();
        let c = hb.constant_upper();
        let cf = crate::numlin::ball::BallReal::exact(c, 64).to_f64();
        for a in -30i64..=30 {
            for b in 1i64..=30 {
                if a.gcd(&b) != 1 {
                    continue;
                }
                let (x, y) =
                    primitive_image(&f, &g, &BigInt::from(a), &BigInt::from(b), &hb.resultant);
                let hx = ln_bigint_abs(&x.abs().max(y.abs()), 64).to_f64();
                let h = (a.abs().max(b) as f64).ln();
                assert!((hx - 2.0 * h).abs() <= cf + 1e-12);
            }
        }
    }
}
