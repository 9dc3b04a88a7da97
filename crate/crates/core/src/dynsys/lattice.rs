//! Affine maps `v -> A v + p` on a lattice carrying a Gram form.

use crate::error::{Error, Result};
use crate::heights::gram::GramForm;
use crate::numlin::ball::BigRat;
use crate::numlin::matrix::{is_zero_vec, vec_add, CMMatrix, RatMatrix, RatVec};
use crate::numlin::spectral::{spectral_data, SpectralData};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSystem {
    matrix: RatMatrix,
    cm: Option<CMMatrix>,
    translation: RatVec,
    gram: GramForm,
}

impl LatticeSystem {
    pub fn new(matrix: RatMatrix, translation: Option<RatVec>, gram: GramForm) -> Result<Self> {
        let n = matrix.dim();
        if gram.rank() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: gram.rank(),
            });
        }
        let translation = translation.unwrap_or_else(|| vec![BigRat::from_integer(0.into()); n]);
        if translation.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: translation.len(),
            });
        }
        Ok(LatticeSystem {
            matrix,
            cm: None,
            translation,
            gram,
        })
    }

    /// A `Z[omega]`-linear system of rank `r`, acting on `Q^(2r)` through the
    /// regular representation. The Gram form must be compatible with `omega`.
    pub fn new_cm(cm: CMMatrix, translation: Option<RatVec>, gram: GramForm) -> Result<Self> {
        let embedded = cm.embed();
        let gram = match gram.cm_action() {
            Some(_) => gram,
            None => gram.with_cm(CMMatrix::omega_action(cm.dim(), cm.cm_d))?,
        };
        let mut sys = Self::new(embedded, translation, gram)?;
        sys.cm = Some(cm);
        Ok(sys)
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn cm(&self) -> Option<&CMMatrix> {
        self.cm.as_ref()
    }

    pub fn cm_d(&self) -> Option<u64> {
        self.cm.as_ref().map(|c| c.cm_d)
    }

    pub fn translation(&self) -> &RatVec {
        &self.translation
    }

    pub fn has_translation(&self) -> bool {
        !is_zero_vec(&self.translation)
    }

    pub fn gram(&self) -> &GramForm {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.matrix.dim()
    }

    pub fn apply(&self, v: &[BigRat]) -> Result<RatVec> {
        if v.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: v.len(),
            });
        }
        Ok(vec_add(&self.matrix.mul_vec(v), &self.translation))
    }

    pub fn iterate(&self, v: &[BigRat], n: usize) -> Result<RatVec> {
        let mut w = v.to_vec();
        for _ in 0..n {
            w = self.apply(&w)?;
        }
        Ok(w)
    }

    /// `f o f`: matrix `A^2`, translation `A p + p`.
    pub fn square(&self) -> Self {
        let cm = self.cm.as_ref().map(|c| {
            // (R + w S)^2 = R^2 - d S^2 + w (R S + S R)
            let d = BigRat::from_integer(c.cm_d.into());
            let r2 = c.real_part.mul(&c.real_part);
            let s2 = c.omega_part.mul(&c.omega_part).scale(&d);
            let rs = c.real_part.mul(&c.omega_part).add(&c.omega_part.mul(&c.real_part));
            CMMatrix::new(r2.sub(&s2), rs, c.cm_d).unwrap()
        });
        LatticeSystem {
            matrix: self.matrix.mul(&self.matrix),
            cm,
            translation: vec_add(&self.matrix.mul_vec(&self.translation), &self.translation),
            gram: self.gram.clone(),
        }
    }

    /// Spectral data of `A` on `Q^rank` (embedded when CM).
    pub fn spectral(&self, prec: u32) -> Result<SpectralData> {
        spectral_data(&self.matrix, prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::ball::rat;

    fn v(xs: &[i64]) -> RatVec {
        xs.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn jordan_example_step() {
        let a = RatMatrix::from_ints(&[&[2, 3], &[0, 2]]);
        let s = LatticeSystem::new(a, None, GramForm::identity(2)).unwrap();
        assert_eq!(s.apply(&v(&[0, 1])).unwrap(), v(&[3, 2]));
        assert!(s.apply(&v(&[1])).is_err());
    }

    #[test]
    fn pure_translation() {
        let s = LatticeSystem::new(RatMatrix::identity(2), Some(v(&[1, 0])), GramForm::identity(2))
            .unwrap();
        assert_eq!(s.apply(&v(&[0, 0])).unwrap(), v(&[1, 0]));
        assert_eq!(s.iterate(&v(&[0, 0]), 5).unwrap(), v(&[5, 0]));
    }

    #[test]
    fn square_matches_double_application() {
        let a = RatMatrix::from_ints(&[&[1, 2], &[-1, 3]]);
        let s = LatticeSystem::new(a, Some(v(&[1, -2])), GramForm::identity(2)).unwrap();
        let s2 = s.square();
        let x = v(&[3, 5]);
        assert_eq!(s2.apply(&x).unwrap(), s.iterate(&x, 2).unwrap());
    }

    #[test]
    fn cm_system_squares_consistently() {
        let cm = CMMatrix::new(
            RatMatrix::from_ints(&[&[1]]),
            RatMatrix::from_ints(&[&[1]]),
            2,
        )
        .unwrap();
        let gram = GramForm::rational(RatMatrix::diag(&[rat(1, 1), rat(2, 1)])).unwrap();
        let s = LatticeSystem::new_cm(cm, None, gram).unwrap();
        assert_eq!(s.rank(), 2);
        let x = v(&[2, -1]);
        assert_eq!(s.square().apply(&x).unwrap(), s.iterate(&x, 2).unwrap());
        assert_eq!(s.square().matrix(), &s.square().cm().unwrap().embed());
    }
}
