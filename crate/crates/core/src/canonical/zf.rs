//! The set of points with vanishing lower canonical height, for affine
//! lattice maps: a rational subspace through a fixed point.

use std::fmt;

use num_traits::One;

use crate::dynsys::lattice::LatticeSystem;
use crate::error::{Error, Result};
use crate::numlin::ball::{BigRat, DEFAULT_PRECISION};
use crate::numlin::matrix::{in_span, solve, span_basis, vec_sub, CMMatrix, RatMatrix, RatVec};
use crate::numlin::spectral::{spectral_data, Certification, Dominance};

use super::lattice_limit::lattice_canonical;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZfKernel {
    pub basis: Vec<RatVec>,
    pub certification: Certification,
}

/// `sum_p ker p(A)^k_p` with `k_p` the full multiplicity off the dominant
/// factors and the Jordan exponent on them.
pub fn zf_kernel(a: &RatMatrix) -> Result<ZfKernel> {
    let sd = spectral_data(a, DEFAULT_PRECISION)?;
    if sd.rho.upper() <= BigRat::one() {
        return Err(Error::HypothesisFailed(
            "the kernel needs a dominant eigenvalue of modulus above 1".into(),
        ));
    }
    let j = sd.jordan_exponent;
    let mut cert = sd.certification;
    for f in &sd.dominant_factors {
        if f.multiplicity != j + 1 {
            continue;
        }
        match f.dominance {
            Dominance::Mixed => {
                return Err(Error::MixedModulusFactor(f.factor.display_with("t")));
            }
            Dominance::FullNumeric => cert = cert.weakest(Certification::NumericCertified),
            Dominance::Full => {}
        }
    }
    let mut gens = Vec::new();
    for (p, m) in &sd.min_poly_factors {
        let dominant = sd.dominant_factors.iter().any(|f| &f.factor == p);
        let k = if dominant { j.min(*m) } else { *m };
        if k == 0 {
            continue;
        }
        gens.extend(a.eval_poly(&p.pow(k)).kernel());
    }
    let basis = span_basis(&gens);
    if basis.iter().any(|b| !in_span(&basis, &a.mul_vec(b))) {
        return Err(Error::Invalid("kernel is not invariant".into()));
    }
    Ok(ZfKernel {
        basis,
        certification: cert,
    })
}

/// As [`zf_kernel`] for a `Z[omega]`-linear matrix, on the embedded space.
pub fn zf_kernel_cm(a: &CMMatrix) -> Result<ZfKernel> {
    zf_kernel(&a.embed())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Yes,
    No,
    Undecided,
}

impl Membership {
    pub fn as_str(&self) -> &'static str {
        match self {
            Membership::Yes => "yes",
            Membership::No => "no",
            Membership::Undecided => "undecided",
        }
    }
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZfResult {
    pub member: Membership,
    pub certification: Certification,
    pub kernel_basis: Option<Vec<RatVec>>,
    pub fixed_point: Option<RatVec>,
    pub flag: Option<String>,
}

impl ZfResult {
    fn undecided(kernel_basis: Option<Vec<RatVec>>, fixed_point: Option<RatVec>, why: String) -> Self {
        ZfResult {
            member: Membership::Undecided,
            certification: Certification::Heuristic,
            kernel_basis,
            fixed_point,
            flag: Some(why),
        }
    }
}

/// Some `x` with `A x + p = x`.
pub fn fixed_point(s: &LatticeSystem) -> Option<RatVec> {
    let n = s.rank();
    let i_minus_a = RatMatrix::identity(n).sub(s.matrix());
    solve(&i_minus_a.rows(), s.translation())
}

pub fn zf_membership(s: &LatticeSystem, v: &[BigRat]) -> Result<ZfResult> {
    if v.len() != s.rank() {
        return Err(Error::DimensionMismatch {
            expected: s.rank(),
            got: v.len(),
        });
    }
    let Some(p0) = fixed_point(s) else {
        return Ok(ZfResult::undecided(None, None, Error::NoFixedPoint.to_string()));
    };
    let kernel = match zf_kernel(s.matrix()) {
        Ok(k) => k,
        Err(e @ Error::MixedModulusFactor(_)) => {
            return Ok(ZfResult::undecided(None, Some(p0), e.to_string()));
        }
        Err(e) => return Err(e),
    };
    if in_span(&kernel.basis, &vec_sub(v, &p0)) {
        return Ok(ZfResult {
            member: Membership::Yes,
            certification: kernel.certification,
            kernel_basis: Some(kernel.basis),
            fixed_point: Some(p0),
            flag: None,
        });
    }
    let est = lattice_canonical(s, v)?;
    if est.certified_positive() {
        return Ok(ZfResult {
            member: Membership::No,
            certification: kernel.certification,
            kernel_basis: Some(kernel.basis),
            fixed_point: Some(p0),
            flag: None,
        });
    }
    let why = est
        .flag
        .unwrap_or_else(|| "lower limit is not certified positive".to_string());
    Ok(ZfResult::undecided(Some(kernel.basis), Some(p0), why))
}
