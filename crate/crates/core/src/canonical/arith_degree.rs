//! Empirical arithmetic degree `h(f^n x)^(1/n)`, with `h` replaced by
//! `max(h, 1)` so that points of small height give 1.

use crate::dynsys::system::{DynSystem, SystemPoint};
use crate::error::{Error, Result};
use crate::numlin::ball::{BallReal, BigRat, DEFAULT_PRECISION};

use super::series::{orbit_prefix, point_height, Budget, TruncationReason};

#[derive(Clone, Debug, PartialEq)]
pub struct ArithmeticDegree {
    pub value: BallReal,
    pub n: usize,
    /// `(n, max(h_n, 1)^(1/n))` for every computed `n >= 1`.
    pub trend: Vec<(usize, f64)>,
    pub truncation_reason: TruncationReason,
}

fn root_of_height(h: &BallReal, n: usize) -> BallReal {
    let one = BallReal::one(h.prec());
    let clipped = h.max(&one);
    clipped
        .ln()
        .expect("clipped height is at least 1")
        .scale(&BigRat::new(1.into(), n.into()))
        .exp()
}

pub fn arithmetic_degree_estimate(system: &DynSystem, x: &SystemPoint, n_max: usize) -> Result<ArithmeticDegree> {
    if n_max < 4 {
        return Err(Error::Invalid("n_max must be at least 4".into()));
    }
    let (orbit, reason) = orbit_prefix(system, x, n_max, Budget::default())?;
    if orbit.len() < 2 {
        return Err(Error::HypothesisFailed("orbit stopped before the first step".into()));
    }
    let mut trend = Vec::with_capacity(orbit.len() - 1);
    let mut value = BallReal::one(DEFAULT_PRECISION);
    for (n, p) in orbit.iter().enumerate().skip(1) {
        let h = point_height(system, p, DEFAULT_PRECISION)?.value;
        value = root_of_height(&h, n);
        trend.push((n, value.to_f64()));
    }
    Ok(ArithmeticDegree {
        value,
        n: orbit.len() - 1,
        trend,
        truncation_reason: reason,
    })
}
