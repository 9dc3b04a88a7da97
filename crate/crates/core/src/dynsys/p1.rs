//! Morphisms of the projective line given by coprime integer binary forms.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::heights::binary_form::{height_bound, primitive_image, BinaryForm, HeightBound};
use crate::heights::projective::ProjectivePoint;
use crate::numlin::intgcd::gcd_all;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1Morphism {
    numerator: BinaryForm,
    denominator: BinaryForm,
    bound: HeightBound,
}

/// Validates `(F : G)` as a morphism of degree at least two.
pub fn p1_validate(numerator: BinaryForm, denominator: BinaryForm) -> Result<P1Morphism> {
    let d = numerator.degree();
    if denominator.degree() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: denominator.degree(),
        });
    }
    if d < 2 {
        return Err(Error::DegreeTooSmall(d));
    }
    let bound = height_bound(&numerator, &denominator)?;
    Ok(P1Morphism {
        numerator,
        denominator,
        bound,
    })
}

/// Binary form product.
fn form_mul(a: &BinaryForm, b: &BinaryForm) -> BinaryForm {
    let mut c = vec![BigInt::zero(); a.degree() + b.degree() + 1];
    for (i, x) in a.coeffs().iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs().iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    BinaryForm::new(c)
}

fn form_add(a: &BinaryForm, b: &BinaryForm) -> BinaryForm {
    BinaryForm::new(a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x + y).collect())
}

/// `F(P, Q)` for forms `P, Q` of a common degree.
fn substitute(f: &BinaryForm, p: &BinaryForm, q: &BinaryForm) -> BinaryForm {
    let d = f.degree();
    let e = p.degree();
    let mut ppow = vec![BinaryForm::from_i64(&[1])];
    let mut qpow = vec![BinaryForm::from_i64(&[1])];
    for i in 1..=d {
        ppow.push(form_mul(&ppow[i - 1], p));
        qpow.push(form_mul(&qpow[i - 1], q));
    }
    let mut acc = BinaryForm::new(vec![BigInt::zero(); d * e + 1]);
    for (i, c) in f.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc = form_add(&acc, &form_mul(&ppow[i], &qpow[d - i]).scale(c));
    }
    acc
}

impl P1Morphism {
    pub fn from_i64(num: &[i64], den: &[i64]) -> Result<Self> {
        p1_validate(BinaryForm::from_i64(num), BinaryForm::from_i64(den))
    }

    /// `z -> z^2 + c` for integer `c`.
    pub fn quadratic(c: i64) -> Self {
        Self::from_i64(&[c, 0, 1], &[1, 0, 0]).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.numerator.degree()
    }

    pub fn numerator(&self) -> &BinaryForm {
        &self.numerator
    }

    pub fn denominator(&self) -> &BinaryForm {
        &self.denominator
    }

    pub fn resultant(&self) -> &BigInt {
        &self.bound.resultant
    }

    pub fn height_bound(&self) -> &HeightBound {
        &self.bound
    }

    /// Image of a primitive pair, as a primitive pair.
    pub fn apply_pair(&self, a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
        primitive_image(&self.numerator, &self.denominator, a, b, &self.bound.resultant)
    }

    pub fn apply(&self, p: &ProjectivePoint) -> ProjectivePoint {
        assert_eq!(p.dim(), 1, "P1Morphism acts on P^1");
        let c = p.coords();
        let (x, y) = self.apply_pair(&c[0], &c[1]);
        ProjectivePoint::from_integers(vec![x, y]).expect("resultant is nonzero")
    }

    pub fn iterate(&self, p: &ProjectivePoint, n: usize) -> ProjectivePoint {
        let mut q = p.clone();
        for _ in 0..n {
            q = self.apply(&q);
        }
        q
    }

    /// `self o other`.
    pub fn compose(&self, other: &P1Morphism) -> P1Morphism {
        let f = substitute(&self.numerator, &other.numerator, &other.denominator);
        let g = substitute(&self.denominator, &other.numerator, &other.denominator);
        let content = gcd_all(f.coeffs().iter().chain(g.coeffs().iter()));
        let (f, g) = if content.is_one() || content.is_zero() {
            (f, g)
        } else {
            let div = |h: &BinaryForm| {
                BinaryForm::new(h.coeffs().iter().map(|c| c / &content).collect())
            };
            (div(&f), div(&g))
        };
        p1_validate(f, g).expect("composition of morphisms is a morphism")
    }
}

impl fmt::Display for P1Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} : {})", self.numerator, self.denominator)
    }
}
