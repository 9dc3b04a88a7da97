//! Canonical-height estimators built on exact orbits: growth series,
//! telescoped heights for morphisms of `P^1`, exact dominant-term limits
//! and kernels for lattice systems, nef heights for Wehler surfaces.

pub mod arith_degree;
pub mod call_silverman;
pub mod lattice_limit;
pub mod series;
pub mod wehler_nef;
pub mod zf;

use std::fmt;

use crate::numlin::ball::{BallReal, BigRat};

pub use arith_degree::{arithmetic_degree_estimate, ArithmeticDegree};
pub use call_silverman::{call_silverman, call_silverman_constant, call_silverman_with};
pub use lattice_limit::lattice_canonical;
pub use series::{height_series, height_series_with, point_height, Budget, HeightSeries, SeriesRow, TruncationReason};
pub use wehler_nef::nef_canonical_wehler;
pub use zf::{zf_kernel, zf_membership, Membership, ZfKernel, ZfResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMode {
    ExactLattice,
    TelescopedCertified,
    Empirical,
}

impl EstimateMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimateMode::ExactLattice => "exact_lattice",
            EstimateMode::TelescopedCertified => "telescoped_certified",
            EstimateMode::Empirical => "empirical",
        }
    }
}

impl fmt::Display for EstimateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalEstimate {
    pub limsup_est: BallReal,
    pub liminf_est: BallReal,
    pub mode: EstimateMode,
    pub error_bound: Option<BallReal>,
    /// Exact `(limsup, liminf)` when both are rational.
    pub exact: Option<(BigRat, BigRat)>,
    /// Set when a fallback was taken.
    pub flag: Option<String>,
}

impl CanonicalEstimate {
    pub(crate) fn certified(value: BallReal, error: BallReal) -> Self {
        CanonicalEstimate {
            limsup_est: value.clone(),
            liminf_est: value,
            mode: EstimateMode::TelescopedCertified,
            error_bound: Some(error),
            exact: None,
            flag: None,
        }
    }

    pub(crate) fn exact_pair(sup: BigRat, inf: BigRat, prec: u32) -> Self {
        CanonicalEstimate {
            limsup_est: BallReal::exact(sup.clone(), prec),
            liminf_est: BallReal::exact(inf.clone(), prec),
            mode: EstimateMode::ExactLattice,
            error_bound: None,
            exact: Some((sup, inf)),
            flag: None,
        }
    }

    /// The limit when `limsup` and `liminf` coincide exactly.
    pub fn exact_value(&self) -> Option<&BigRat> {
        match &self.exact {
            Some((a, b)) if a == b => Some(a),
            _ => None,
        }
    }

    /// Whether the lower estimate is certified strictly positive.
    pub fn certified_positive(&self) -> bool {
        self.mode != EstimateMode::Empirical && self.liminf_est.is_positive()
    }
}
