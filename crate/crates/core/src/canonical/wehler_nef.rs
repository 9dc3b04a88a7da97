//! Nef canonical height `hhat+` on a Wehler surface, estimated along the
//! orbit as `delta^-n h_{D+}(f^n P)`. The error is an empirical geometric
//! fit of successive differences, inflated by a factor 4; it is not a proof.

use crate::dynsys::wehler::{intersection_form, Axis, WehlerPoint, WehlerSystem};
use crate::error::{Error, Result};
use crate::heights::projective::weil_height;
use crate::numlin::ball::{BallReal, BigRat, DEFAULT_PRECISION};
use crate::numlin::spectral::{perron_eigenvector, spectral_data, Cone};

use super::series::{Budget, TruncationReason};
use super::{CanonicalEstimate, EstimateMode};

/// Safety factor on the fitted tail.
pub const SAFETY: f64 = 4.0;

/// The expanding class `D+` in the basis `(D_x, D_y, D_z)`, coordinates
/// summing to 1, with the Picard spectral radius.
pub fn expanding_class(s: &WehlerSystem, prec: u32) -> Result<(Vec<BallReal>, BallReal)> {
    let m = s.picard_matrix();
    let sd = spectral_data(&m, prec)?;
    if sd.rho.upper() <= BigRat::from_integer(1.into()) {
        return Err(Error::HypothesisFailed(
            "the Picard action has spectral radius 1".into(),
        ));
    }
    let one = BigRat::from_integer(1.into());
    let cone = Cone::Positive {
        form: intersection_form(),
        reference: vec![one.clone(), one.clone(), one],
    };
    let pv = perron_eigenvector(&m.transpose(), &cone, prec)?;
    Ok((pv.vector, sd.rho))
}

/// `sum_i c_i h(x_i)`.
pub fn weighted_height(p: &WehlerPoint, class: &[BallReal], prec: u32) -> BallReal {
    let mut acc = BallReal::zero(prec);
    for (a, c) in Axis::ALL.iter().zip(class) {
        acc = &acc + &(c * &weil_height(p.coord(*a), prec).value);
    }
    acc
}

pub fn nef_canonical_wehler(s: &WehlerSystem, p: &WehlerPoint, n_max: usize) -> Result<CanonicalEstimate> {
    nef_canonical_wehler_with(s, p, n_max, Budget::default(), DEFAULT_PRECISION)
}

pub fn nef_canonical_wehler_with(
    s: &WehlerSystem,
    p: &WehlerPoint,
    n_max: usize,
    budget: Budget,
    prec: u32,
) -> Result<CanonicalEstimate> {
    if !s.form().contains(p) {
        return Err(Error::Invalid(format!("{p} is not on the surface")));
    }
    let (class, delta) = expanding_class(s, prec)?;
    let mut estimates = vec![weighted_height(p, &class, prec)];
    let mut reason = TruncationReason::Converged;
    let mut q = p.clone();
    let mut delta_n = BallReal::one(prec);
    for _ in 0..n_max {
        let next = match s.apply(&q) {
            Ok(x) => x,
            Err(Error::DegenerateFiber) => {
                reason = TruncationReason::DegenerateFiber;
                break;
            }
            Err(e) => return Err(e),
        };
        if next.size_bits() > budget.max_bits {
            reason = TruncationReason::Budget;
            break;
        }
        delta_n = &delta_n * &delta;
        let h = weighted_height(&next, &class, prec);
        estimates.push(h.div(&delta_n).expect("delta exceeds 1"));
        q = next;
    }
    let value = estimates.last().unwrap().clone();
    let diffs: Vec<f64> = estimates
        .windows(2)
        .map(|w| (w[1].to_f64() - w[0].to_f64()).abs())
        .collect();
    let err = match diffs.as_slice() {
        [] => value.to_f64().abs(),
        [d] => SAFETY * d,
        [.., a, b] => {
            let q = if *a > 0.0 { (b / a).min(0.9) } else { 0.9 };
            SAFETY * b * q / (1.0 - q)
        }
    };
    let err_q = BigRat::from_float(err).unwrap_or_else(|| BigRat::from_integer(0.into()));
    let ball = value.inflate(&err_q);
    Ok(CanonicalEstimate {
        limsup_est: ball.clone(),
        liminf_est: ball,
        mode: EstimateMode::Empirical,
        error_bound: Some(BallReal::exact(err_q, prec)),
        exact: None,
        flag: (reason != TruncationReason::Converged).then(|| reason.as_str().to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::wehler::seeded_instance;

    fn xyz() -> Vec<Axis> {
        vec![Axis::X, Axis::Y, Axis::Z]
    }

    #[test]
    fn expanding_class_is_an_eigenvector() {
        let (s, _) = seeded_instance(7, 2, xyz()).unwrap();
        let (c, rho) = expanding_class(&s, 128).unwrap();
        let m = s.picard_matrix().transpose();
        for i in 0..3 {
            let mut img = BallReal::zero(128);
            for j in 0..3 {
                img = &img + &c[j].scale(m.get(i, j));
            }
            assert!((img.to_f64() - rho.to_f64() * c[i].to_f64()).abs() < 1e-12);
        }
    }

    #[test]
    fn functional_equation_within_error() {
        let (s, pts) = seeded_instance(11, 3, xyz()).unwrap();
        let (_, delta) = expanding_class(&s, 128).unwrap();
        let p = &pts[0];
        let e = nef_canonical_wehler(&s, p, 4).unwrap();
        let fp = s.apply(p).unwrap();
        let ef = nef_canonical_wehler(&s, &fp, 3).unwrap();
        let lhs = ef.limsup_est.to_f64();
        let rhs = delta.to_f64() * e.limsup_est.to_f64();
        let tol = ef.error_bound.unwrap().to_f64() + delta.to_f64() * e.error_bound.unwrap().to_f64();
        assert!((lhs - rhs).abs() <= tol + 1e-9, "{lhs} vs {rhs} (tol {tol})");
    }

    #[test]
    fn single_step_is_wide() {
        let (s, pts) = seeded_instance(3, 2, xyz()).unwrap();
        let e = nef_canonical_wehler(&s, &pts[0], 1).unwrap();
        assert!(e.error_bound.unwrap().to_f64() > 0.0);
    }

    #[test]
    fn unipotent_word_is_rejected() {
        let (s, pts) = seeded_instance(3, 2, vec![Axis::X, Axis::Y]).unwrap();
        assert!(nef_canonical_wehler(&s, &pts[0], 3).is_err());
    }
}
