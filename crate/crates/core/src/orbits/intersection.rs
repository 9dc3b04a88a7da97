//! Pairs `(n, m)` with `f^n(x) = g^m(y)`, their largest gap, and a cover by
//! progressions `{(k t + i, k t + j) : t >= 0}`.

use std::collections::{BTreeSet, HashMap};

use crate::canonical::series::{orbit_prefix, Budget, TruncationReason};
use crate::dynsys::system::{system_spectral, DynSystem, SystemPoint};
use crate::error::{Error, Result};
use crate::numlin::ball::BigRat;

/// `(k, i, j)`: the pairs `(k t + i, k t + j)`.
pub type Progression = (usize, usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionReport {
    pub n_max: usize,
    pub pairs: Vec<(usize, usize)>,
    pub max_gap: Option<usize>,
    pub ap_decomposition: Vec<Progression>,
    pub residual_pairs: Vec<(usize, usize)>,
    /// Last computed index on each side.
    pub computed: (usize, usize),
    pub truncation: (TruncationReason, TruncationReason),
}

impl IntersectionReport {
    pub fn truncated(&self) -> bool {
        self.truncation.0 != TruncationReason::Converged || self.truncation.1 != TruncationReason::Converged
    }
}

fn progression_members(ap: Progression, limits: (usize, usize)) -> Vec<(usize, usize)> {
    let (k, i, j) = ap;
    let mut out = vec![];
    let (mut a, mut b) = (i, j);
    while a <= limits.0 && b <= limits.1 {
        out.push((a, b));
        if k == 0 {
            break;
        }
        a += k;
        b += k;
    }
    out
}

/// Greedy cover, smallest step first. A progression must have at least two
/// members in range, all of them pairs; anything left is residual.
fn decompose(pairs: &BTreeSet<(usize, usize)>, limits: (usize, usize)) -> (Vec<Progression>, Vec<(usize, usize)>) {
    let mut uncovered: BTreeSet<(usize, usize)> = pairs.clone();
    let mut aps = vec![];
    let span = limits.0.max(limits.1);
    for k in 1..=span {
        let starts: Vec<(usize, usize)> = uncovered.iter().copied().collect();
        for (i, j) in starts {
            if !uncovered.contains(&(i, j)) {
                continue;
            }
            let members = progression_members((k, i, j), limits);
            if members.len() < 2 || !members.iter().all(|p| pairs.contains(p)) {
                continue;
            }
            for p in &members {
                uncovered.remove(p);
            }
            aps.push((k, i, j));
        }
    }
    (aps, uncovered.into_iter().collect())
}

pub fn orbit_intersection(
    f: &DynSystem,
    x: &SystemPoint,
    g: &DynSystem,
    y: &SystemPoint,
    n_max: usize,
) -> Result<IntersectionReport> {
    orbit_intersection_with(f, x, g, y, n_max, Budget::default())
}

pub fn orbit_intersection_with(
    f: &DynSystem,
    x: &SystemPoint,
    g: &DynSystem,
    y: &SystemPoint,
    n_max: usize,
    budget: Budget,
) -> Result<IntersectionReport> {
    if n_max < 1 {
        return Err(Error::Invalid("N must be at least 1".into()));
    }
    let (fx, rf) = orbit_prefix(f, x, n_max, budget)?;
    let (gy, rg) = orbit_prefix(g, y, n_max, budget)?;
    // HashMap lookups confirm hash hits by full equality
    let mut index: HashMap<&SystemPoint, Vec<usize>> = HashMap::new();
    for (m, p) in gy.iter().enumerate() {
        index.entry(p).or_default().push(m);
    }
    let mut pairs = BTreeSet::new();
    for (n, p) in fx.iter().enumerate() {
        if let Some(ms) = index.get(p) {
            for &m in ms {
                pairs.insert((n, m));
            }
        }
    }
    let limits = (fx.len() - 1, gy.len() - 1);
    let (aps, residual) = decompose(&pairs, limits);
    let max_gap = pairs.iter().map(|&(n, m)| n.abs_diff(m)).max();
    Ok(IntersectionReport {
        n_max,
        pairs: pairs.into_iter().collect(),
        max_gap,
        ap_decomposition: aps,
        residual_pairs: residual,
        computed: limits,
        truncation: (rf, rg),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapBound {
    pub holds: bool,
    /// The stabilized largest gap; `None` when the orbits never meet.
    pub bound: Option<usize>,
    /// `(N, max_gap)` along the schedule.
    pub schedule: Vec<(usize, Option<usize>)>,
}

/// Checks `delta_f = delta_g > 1` and `l_f = l_g`, then the largest gap at
/// `N/4`, `N/2` and `N`.
pub fn gap_bound_check(
    f: &DynSystem,
    x: &SystemPoint,
    g: &DynSystem,
    y: &SystemPoint,
    n_max: usize,
) -> Result<GapBound> {
    let rf = system_spectral(f, 128)?;
    let rg = system_spectral(g, 128)?;
    let same_delta = match (&rf.delta_exact, &rg.delta_exact) {
        (Some(a), Some(b)) => a == b,
        _ => rf.delta.overlaps(&rg.delta),
    };
    if !same_delta {
        return Err(Error::HypothesisFailed(format!(
            "dynamical degrees differ: {} vs {}",
            rf.delta, rg.delta
        )));
    }
    if rf.l != rg.l {
        return Err(Error::HypothesisFailed(format!(
            "growth exponents differ: {} vs {}",
            rf.l, rg.l
        )));
    }
    if rf.delta.upper() <= BigRat::from_integer(1.into()) {
        return Err(Error::HypothesisFailed("dynamical degree is not above 1".into()));
    }
    let mut schedule = vec![];
    for n in [n_max / 4, n_max / 2, n_max] {
        if n == 0 || schedule.iter().any(|(m, _)| *m == n) {
            continue;
        }
        let r = orbit_intersection(f, x, g, y, n)?;
        schedule.push((n, r.max_gap));
    }
    let last = schedule.last().map(|s| s.1).unwrap_or(None);
    let stable = schedule.len() < 2 || schedule[schedule.len() - 2].1 == last;
    Ok(GapBound {
        holds: stable,
        bound: last,
        schedule,
    })
}
