//! Preperiodic points of bounded height on `P^1(Q)`.
//!
//! A preperiodic point has `hhat = 0`, so only points whose certified
//! canonical-height ball reaches below the threshold are candidates; each
//! candidate is then confirmed by an exact cycle. Most points are ruled out
//! first by `hhat(P) >= (h(f^k P) - C) / d^k` on a short exact orbit.

use num_bigint::BigInt;

use crate::canonical::call_silverman::{call_silverman, call_silverman_constant};
use crate::dynsys::p1::P1Morphism;
use crate::dynsys::system::{DynSystem, SystemPoint};
use crate::error::{Error, Result};
use crate::heights::neron_tate::tolerance_rat;
use crate::heights::projective::{enumerate_p1_points, weil_height, ProjectivePoint};
use crate::numlin::ball::BigRat;

use super::preperiodic::detect_preperiodic;

/// Step limit for confirming a candidate.
pub const CONFIRM_STEPS: usize = 256;

const PREFILTER_STEPS: usize = 8;
const PREFILTER_BITS: u64 = 1 << 14;

/// True when a short exact orbit already certifies `hhat(P) > theta`.
fn certainly_above(f: &P1Morphism, p: &ProjectivePoint, c: &BigRat, theta: &BigRat) -> bool {
    let d = BigRat::from_integer(BigInt::from(f.degree()));
    let mut q = p.clone();
    let mut dk = BigRat::from_integer(1.into());
    for _ in 0..=PREFILTER_STEPS {
        let lower = (weil_height(&q, 64).value.lower() - c) / &dk;
        if &lower > theta {
            return true;
        }
        if q.size_bits() > PREFILTER_BITS {
            return false;
        }
        q = f.apply(&q);
        dk *= &d;
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NorthcottReport {
    pub bound: u64,
    pub scanned: usize,
    pub candidates: usize,
    /// Preperiodic points with their `(tail, period)`.
    pub confirmed: Vec<(ProjectivePoint, usize, usize)>,
    /// Candidates of small height without a confirmed cycle.
    pub anomalies: Vec<ProjectivePoint>,
}

impl NorthcottReport {
    pub fn points(&self) -> Vec<&ProjectivePoint> {
        self.confirmed.iter().map(|(p, _, _)| p).collect()
    }
}

pub fn northcott_scan(f: &P1Morphism, bound: u64, tol: f64) -> Result<NorthcottReport> {
    if bound < 1 {
        return Err(Error::Invalid("height bound must be at least 1".into()));
    }
    let theta = tolerance_rat(tol)?;
    let system = DynSystem::P1(f.clone());
    let points = enumerate_p1_points(bound)?;
    let mut report = NorthcottReport {
        bound,
        scanned: points.len(),
        candidates: 0,
        confirmed: vec![],
        anomalies: vec![],
    };
    let c = call_silverman_constant(f);
    for p in points {
        if certainly_above(f, &p, &c, &theta) {
            continue;
        }
        let est = call_silverman(f, &p, tol)?;
        if est.limsup_est.lower() > theta {
            continue;
        }
        report.candidates += 1;
        let rec = detect_preperiodic(&system, &SystemPoint::P1(p.clone()), CONFIRM_STEPS)?;
        match (rec.tail_length, rec.period) {
            (Some(t), Some(k)) => report.confirmed.push((p, t, k)),
            _ => report.anomalies.push(p),
        }
    }
    Ok(report)
}
