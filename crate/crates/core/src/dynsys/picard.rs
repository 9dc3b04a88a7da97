//! A bare linear action on a Neron-Severi space, with an optional cone.

use crate::error::{Error, Result};
use crate::numlin::matrix::{RatMatrix, RatVec};
use crate::numlin::spectral::{spectral_data, SpectralData};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicardAction {
    matrix: RatMatrix,
    cone_generators: Option<Vec<RatVec>>,
    label: String,
}

impl PicardAction {
    pub fn new(matrix: RatMatrix, cone_generators: Option<Vec<RatVec>>, label: impl Into<String>) -> Result<Self> {
        let n = matrix.dim();
        if let Some(gens) = &cone_generators {
            if gens.is_empty() {
                return Err(Error::Invalid("cone needs at least one generator".into()));
            }
            if let Some(g) = gens.iter().find(|g| g.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: g.len(),
                });
            }
        }
        Ok(PicardAction {
            matrix,
            cone_generators,
            label: label.into(),
        })
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn cone_generators(&self) -> Option<&[RatVec]> {
        self.cone_generators.as_deref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn square(&self) -> Self {
        PicardAction {
            matrix: self.matrix.mul(&self.matrix),
            cone_generators: self.cone_generators.clone(),
            label: format!("{} squared", self.label),
        }
    }

    pub fn spectral(&self, prec: u32) -> Result<SpectralData> {
        spectral_data(&self.matrix, prec)
    }
}
