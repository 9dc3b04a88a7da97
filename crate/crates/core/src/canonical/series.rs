//! Normalized growth series `a_n = h(f^n x) / (delta^n n^l)` along exact orbits.

use std::fmt;

use num_bigint::BigInt;

use crate::dynsys::system::{system_spectral, DynSystem, SystemPoint};
use crate::dynsys::wehler::{Axis, WehlerPoint};
use crate::error::{Error, Result};
use crate::heights::elliptic::EPoint;
use crate::heights::gram::lattice_height;
use crate::heights::neron_tate::{neron_tate_with_depth, MAX_DOUBLING_DEPTH};
use crate::heights::projective::{weil_height, HeightValue};
use crate::numlin::ball::{BallReal, BigRat, DEFAULT_PRECISION};

/// Default height budget: one million decimal digits, in bits.
pub const DEFAULT_BUDGET_BITS: u64 = 3_321_929;

/// Cooperative size limit checked once per orbit step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_bits: u64,
}

impl Budget {
    pub fn digits(d: u64) -> Self {
        Budget {
            max_bits: (d as f64 * std::f64::consts::LOG2_10).ceil() as u64,
        }
    }

    pub fn allows(&self, p: &SystemPoint) -> bool {
        point_size_bits(p) <= self.max_bits
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_bits: DEFAULT_BUDGET_BITS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TruncationReason {
    Budget,
    DegenerateFiber,
    Converged,
}

impl TruncationReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            TruncationReason::Budget => "budget",
            TruncationReason::DegenerateFiber => "degenerate_fiber",
            TruncationReason::Converged => "converged",
        }
    }
}

impl fmt::Display for TruncationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesRow {
    pub n: usize,
    pub h: HeightValue,
    /// `None` for the `n = 0` row.
    pub a: Option<BallReal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightSeries {
    pub delta: BallReal,
    pub l: u32,
    pub rows: Vec<SeriesRow>,
    pub truncation_reason: TruncationReason,
}

impl HeightSeries {
    /// Normalized values for `n >= 1`.
    pub fn normalized(&self) -> impl Iterator<Item = (usize, &BallReal)> {
        self.rows.iter().filter_map(|r| r.a.as_ref().map(|a| (r.n, a)))
    }

    pub fn last_n(&self) -> usize {
        self.rows.last().map(|r| r.n).unwrap_or(0)
    }

    /// `a_n` as an exact rational when the row has zero radius.
    pub fn exact_a(&self, n: usize) -> Option<BigRat> {
        let a = self.rows.iter().find(|r| r.n == n)?.a.as_ref()?;
        a.is_exact().then(|| a.mid().clone())
    }
}

/// Size of the largest coordinate numerator or denominator, in bits.
pub fn point_size_bits(p: &SystemPoint) -> u64 {
    fn rat_bits(q: &BigRat) -> u64 {
        q.numer().bits().max(q.denom().bits())
    }
    match p {
        SystemPoint::P1(x) => x.size_bits(),
        SystemPoint::Lattice(v) => v.iter().map(rat_bits).max().unwrap_or(0),
        SystemPoint::Abelian(ps) => ps
            .iter()
            .map(|q| match q {
                EPoint::Infinity => 0,
                EPoint::Affine(x, y) => rat_bits(x).max(rat_bits(y)),
            })
            .max()
            .unwrap_or(0),
        SystemPoint::Wehler(w) => w.size_bits(),
        SystemPoint::Pair(a, b) => point_size_bits(a).max(point_size_bits(b)),
    }
}

/// `h(x) + h(y) + h(z)`: the height for the class `D_1 + D_2 + D_3`.
pub fn wehler_height(p: &WehlerPoint, prec: u32) -> HeightValue {
    let mut core = BigInt::from(1);
    let mut acc = BallReal::zero(prec);
    for a in Axis::ALL {
        let h = weil_height(p.coord(a), prec);
        core *= h.exact_core.as_ref().expect("Weil heights carry their core");
        acc = &acc + &h.value;
    }
    HeightValue {
        value: acc,
        exact_core: Some(core),
    }
}

/// Neron-Tate depth so that a point of `bits` bits doubles to at most about
/// four million bits.
fn abelian_depth(bits: u64) -> u32 {
    let mut depth = 0;
    let mut size = bits.max(64);
    while depth < MAX_DOUBLING_DEPTH && size * 4 <= 1 << 22 {
        size *= 4;
        depth += 1;
    }
    depth
}

/// The height used for a point of the given system.
pub fn point_height(system: &DynSystem, p: &SystemPoint, prec: u32) -> Result<HeightValue> {
    match (system, p) {
        (DynSystem::P1(_), SystemPoint::P1(x)) => Ok(weil_height(x, prec)),
        (DynSystem::Lattice(s), SystemPoint::Lattice(v)) => {
            let h = lattice_height(v, s.gram())?;
            Ok(HeightValue::from_ball(h.to_ball(prec)))
        }
        (DynSystem::Abelian(s), SystemPoint::Abelian(xs)) => {
            let tol = 1e-9 / xs.len().max(1) as f64;
            let mut acc = BallReal::zero(prec);
            for x in xs {
                let depth = abelian_depth(point_size_bits(&SystemPoint::Abelian(vec![x.clone()])));
                let h = neron_tate_with_depth(s.curve(), x, tol, depth)?;
                acc = &acc + &h.value;
            }
            Ok(HeightValue::from_ball(acc))
        }
        (DynSystem::Wehler(_), SystemPoint::Wehler(w)) => Ok(wehler_height(w, prec)),
        (DynSystem::Product(f, g), SystemPoint::Pair(x, y)) => {
            let hx = point_height(f, x, prec)?;
            let hy = point_height(g, y, prec)?;
            Ok(HeightValue::from_ball(&hx.value + &hy.value))
        }
        (DynSystem::Picard(_), _) => Err(Error::Invalid("a bare Picard action has no points".into())),
        _ => Err(Error::Invalid(format!(
            "point does not belong to a {} system",
            system.kind()
        ))),
    }
}

/// Iterates `f` from `x`, at most `n_max` steps. Stops early on budget or a
/// degenerate fiber; the reason is returned with the orbit.
pub fn orbit_prefix(
    system: &DynSystem,
    x: &SystemPoint,
    n_max: usize,
    budget: Budget,
) -> Result<(Vec<SystemPoint>, TruncationReason)> {
    let mut pts = vec![x.clone()];
    let mut cur = x.clone();
    for _ in 0..n_max {
        match system.apply(&cur) {
            Ok(next) => {
                if !budget.allows(&next) {
                    return Ok((pts, TruncationReason::Budget));
                }
                pts.push(next.clone());
                cur = next;
            }
            Err(Error::DegenerateFiber) => return Ok((pts, TruncationReason::DegenerateFiber)),
            Err(e) => return Err(e),
        }
    }
    Ok((pts, TruncationReason::Converged))
}

/// `a_n = h_n / (delta^n n^l)`; `None` when `delta` encloses zero.
pub fn normalize_height(h: &BallReal, delta: &BallReal, n: usize, l: u32) -> Option<BallReal> {
    let n_l = BigRat::from_integer(BigInt::from(n).pow(l));
    let denom = delta.powi(n as u32).scale(&n_l);
    h.div(&denom)
}

/// The normalized height series with `delta` and `l` from the system.
pub fn height_series(system: &DynSystem, x: &SystemPoint, n_max: usize) -> Result<HeightSeries> {
    height_series_with(system, x, n_max, Budget::default(), DEFAULT_PRECISION)
}

pub fn height_series_with(
    system: &DynSystem,
    x: &SystemPoint,
    n_max: usize,
    budget: Budget,
    prec: u32,
) -> Result<HeightSeries> {
    if n_max < 1 {
        return Err(Error::Invalid("n_max must be at least 1".into()));
    }
    let report = system_spectral(system, prec)?;
    let delta = match &report.delta_exact {
        Some(d) => BallReal::exact(d.clone(), prec),
        None => report.delta.clone(),
    };
    if !delta.is_positive() {
        return Err(Error::HypothesisFailed("dynamical degree must be positive".into()));
    }
    let (orbit, reason) = orbit_prefix(system, x, n_max, budget)?;
    let mut rows = Vec::with_capacity(orbit.len());
    for (n, p) in orbit.iter().enumerate() {
        let h = point_height(system, p, prec)?;
        let a = if n == 0 {
            None
        } else {
            normalize_height(&h.value, &delta, n, report.l)
        };
        rows.push(SeriesRow { n, h, a });
    }
    Ok(HeightSeries {
        delta,
        l: report.l,
        rows,
        truncation_reason: reason,
    })
}

/// `sqrt(h_n) / delta^n` for `n >= 1`.
pub fn decay_profile(series: &HeightSeries) -> Vec<(usize, f64)> {
    let d = series.delta.to_f64();
    series
        .rows
        .iter()
        .skip(1)
        .map(|r| {
            let h = r.h.value.to_f64().max(0.0);
            (r.n, h.sqrt() / d.powi(r.n as i32))
        })
        .collect()
}
