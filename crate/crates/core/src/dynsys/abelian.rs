//! Self-maps of `E^r` given by an integer matrix and a translation.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::heights::elliptic::{EPoint, EllipticCurve};
use crate::heights::gram::GramForm;
use crate::heights::neron_tate::neron_tate;
use crate::numlin::ball::{BallReal, BigRat};
use crate::numlin::matrix::RatMatrix;

use super::lattice::LatticeSystem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteAbelianSystem {
    curve: EllipticCurve,
    matrix: Vec<Vec<i64>>,
    translation: Vec<EPoint>,
}

impl ConcreteAbelianSystem {
    pub fn new(curve: EllipticCurve, matrix: Vec<Vec<i64>>, translation: Option<Vec<EPoint>>) -> Result<Self> {
        let r = matrix.len();
        if r == 0 || matrix.iter().any(|row| row.len() != r) {
            return Err(Error::Invalid("matrix must be square and nonempty".into()));
        }
        let translation = translation.unwrap_or_else(|| vec![EPoint::Infinity; r]);
        if translation.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: translation.len(),
            });
        }
        if let Some(p) = translation.iter().find(|p| !curve.contains(p)) {
            return Err(Error::Invalid(format!("translation {p} is not on the curve")));
        }
        Ok(ConcreteAbelianSystem {
            curve,
            matrix,
            translation,
        })
    }

    pub fn curve(&self) -> &EllipticCurve {
        &self.curve
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn int_matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn rat_matrix(&self) -> RatMatrix {
        let rows: Vec<&[i64]> = self.matrix.iter().map(|r| r.as_slice()).collect();
        RatMatrix::from_ints(&rows)
    }

    pub fn translation(&self) -> &[EPoint] {
        &self.translation
    }

    /// `x_i -> sum_j A_ij x_j + t_i`, by the exact group law.
    pub fn apply(&self, x: &[EPoint]) -> Result<Vec<EPoint>> {
        let r = self.rank();
        if x.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: x.len(),
            });
        }
        if let Some(p) = x.iter().find(|p| !self.curve.contains(p)) {
            return Err(Error::Invalid(format!("{p} is not on the curve")));
        }
        Ok((0..r)
            .map(|i| {
                let mut acc = self.translation[i].clone();
                for j in 0..r {
                    let m = self.matrix[i][j];
                    if m != 0 {
                        acc = self.curve.add(&acc, &self.curve.mul(m, &x[j]));
                    }
                }
                acc
            })
            .collect())
    }

    pub fn iterate(&self, x: &[EPoint], n: usize) -> Result<Vec<EPoint>> {
        let mut y = x.to_vec();
        for _ in 0..n {
            y = self.apply(&y)?;
        }
        Ok(y)
    }

    pub fn square(&self) -> Self {
        let r = self.rank();
        let mut m2 = vec![vec![0i64; r]; r];
        for i in 0..r {
            for j in 0..r {
                m2[i][j] = (0..r).map(|k| self.matrix[i][k] * self.matrix[k][j]).sum();
            }
        }
        let t2 = self.apply(&self.translation).expect("translation is on the curve");
        ConcreteAbelianSystem {
            curve: self.curve.clone(),
            matrix: m2,
            translation: t2,
        }
    }

    /// Coordinate-sum Neron-Tate height `sum_i hhat(x_i)`.
    pub fn height(&self, x: &[EPoint], tol: f64) -> Result<BallReal> {
        let per = tol / x.len().max(1) as f64;
        let mut acc: Option<BallReal> = None;
        for p in x {
            let h = neron_tate(&self.curve, p, per)?.value;
            acc = Some(match acc {
                None => h,
                Some(a) => &a + &h,
            });
        }
        Ok(acc.unwrap_or_else(|| BallReal::zero(96)))
    }

    /// The lattice shadow on the span of a single generator `g`: a point
    /// `(v_1 g, ..., v_r g)` has coordinates `v`. Translations must be
    /// multiples of `g`, given as `translation_coords`.
    pub fn shadow(&self, translation_coords: &[i64], gram: GramForm) -> Result<LatticeSystem> {
        let p: Vec<BigRat> = translation_coords
            .iter()
            .map(|&c| BigRat::from_integer(BigInt::from(c)))
            .collect();
        LatticeSystem::new(self.rat_matrix(), Some(p), gram)
    }

    /// `(v_1 g, ..., v_r g)`.
    pub fn from_coefficients(&self, g: &EPoint, v: &[BigRat]) -> Result<Vec<EPoint>> {
        v.iter()
            .map(|c| {
                if !c.is_integer() {
                    return Err(Error::Invalid("coefficients must be integers".into()));
                }
                let k = c
                    .to_integer()
                    .to_i64()
                    .ok_or_else(|| Error::Invalid("coefficient too large".into()))?;
                Ok(self.curve.mul(k, g))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::ball::rat;

    fn e37() -> EllipticCurve {
        EllipticCurve::from_ints([0, 0, 1, -1, 0]).unwrap()
    }

    #[test]
    fn coordinatewise_doubling() {
        let e = e37();
        let p = EPoint::from_ints(0, 0);
        let s = ConcreteAbelianSystem::new(e.clone(), vec![vec![2, 0], vec![0, 2]], None).unwrap();
        let img = s.apply(&[p.clone(), p.clone()]).unwrap();
        assert_eq!(img, vec![e.mul(2, &p), e.mul(2, &p)]);
    }

    #[test]
    fn commutes_with_lattice_shadow() {
        let e = e37();
        let g = EPoint::from_ints(0, 0);
        let t = vec![e.mul(1, &g), EPoint::Infinity];
        let s = ConcreteAbelianSystem::new(e, vec![vec![1, 1], vec![-1, 0]], Some(t)).unwrap();
        let shadow = s.shadow(&[1, 0], GramForm::identity(2)).unwrap();
        let v0 = vec![rat(1, 1), rat(-1, 1)];
        let mut x = s.from_coefficients(&g, &v0).unwrap();
        let mut v = v0;
        for _ in 0..4 {
            x = s.apply(&x).unwrap();
            v = shadow.apply(&v).unwrap();
            assert_eq!(x, s.from_coefficients(&g, &v).unwrap());
        }
    }

    #[test]
    fn square_is_double_application() {
        let e = e37();
        let g = EPoint::from_ints(0, 0);
        let s = ConcreteAbelianSystem::new(
            e.clone(),
            vec![vec![0, 1], vec![1, 1]],
            Some(vec![g.clone(), e.mul(-1, &g)]),
        )
        .unwrap();
        let x = vec![e.mul(2, &g), g.clone()];
        assert_eq!(s.square().apply(&x).unwrap(), s.iterate(&x, 2).unwrap());
    }
}
