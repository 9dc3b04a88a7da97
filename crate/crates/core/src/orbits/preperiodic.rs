//! Preperiodicity by Brent's cycle detection on exact points.

use std::collections::HashMap;

use crate::canonical::series::{Budget, TruncationReason};
use crate::dynsys::system::{DynSystem, SystemPoint};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    /// `x, f(x), ...`; when a cycle is found, through index `tail + period`.
    pub points: Vec<SystemPoint>,
    pub tail_length: Option<usize>,
    pub period: Option<usize>,
    pub truncated: bool,
    pub truncation_reason: Option<TruncationReason>,
}

impl OrbitRecord {
    pub fn is_preperiodic(&self) -> bool {
        self.period.is_some()
    }
}

/// Lazily extended orbit with a step limit and a size budget.
struct Orbit<'a> {
    system: &'a DynSystem,
    points: Vec<SystemPoint>,
    max_steps: usize,
    budget: Budget,
    stopped: Option<TruncationReason>,
}

impl<'a> Orbit<'a> {
    fn get(&mut self, i: usize) -> Result<Option<&SystemPoint>> {
        while self.points.len() <= i {
            if self.stopped.is_some() || self.points.len() > self.max_steps {
                return Ok(None);
            }
            let last = self.points.last().unwrap();
            match self.system.apply(last) {
                Ok(next) => {
                    if !self.budget.allows(&next) {
                        self.stopped = Some(TruncationReason::Budget);
                        return Ok(None);
                    }
                    self.points.push(next);
                }
                Err(Error::DegenerateFiber) => {
                    self.stopped = Some(TruncationReason::DegenerateFiber);
                    return Ok(None);
                }
                Err(e) => return Err(e),
            }
        }
        Ok(Some(&self.points[i]))
    }

    fn truncated(self) -> OrbitRecord {
        OrbitRecord {
            points: self.points,
            tail_length: None,
            period: None,
            truncated: true,
            truncation_reason: self.stopped,
        }
    }
}

pub fn detect_preperiodic(system: &DynSystem, x: &SystemPoint, max_steps: usize) -> Result<OrbitRecord> {
    detect_preperiodic_with(system, x, max_steps, Budget::default())
}

/// At most `max_steps` applications of `f`.
pub fn detect_preperiodic_with(
    system: &DynSystem,
    x: &SystemPoint,
    max_steps: usize,
    budget: Budget,
) -> Result<OrbitRecord> {
    if max_steps < 1 {
        return Err(Error::Invalid("max_steps must be at least 1".into()));
    }
    let mut orbit = Orbit {
        system,
        points: vec![x.clone()],
        max_steps,
        budget,
        stopped: None,
    };
    // period
    let (mut power, mut lam) = (1usize, 1usize);
    let mut tortoise = 0usize;
    let mut hare = 1usize;
    loop {
        let Some(h) = orbit.get(hare)?.cloned() else {
            return Ok(finish_by_history(orbit));
        };
        if orbit.points[tortoise] == h {
            break;
        }
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare += 1;
        lam += 1;
    }
    // tail: first index mu with x_mu = x_(mu + lam)
    let mut mu = 0usize;
    while orbit.points[mu] != orbit.points[mu + lam] {
        mu += 1;
    }
    orbit.points.truncate(mu + lam + 1);
    // replay
    for k in mu..=mu + lam {
        if k + lam < orbit.points.len() && orbit.points[k] != orbit.points[k + lam] {
            return Err(Error::Invalid("cycle replay failed".into()));
        }
    }
    Ok(OrbitRecord {
        points: orbit.points,
        tail_length: Some(mu),
        period: Some(lam),
        truncated: false,
        truncation_reason: None,
    })
}

/// Brent may stop short of a cycle that fits within the step limit; the
/// stored prefix is then searched directly.
fn finish_by_history(orbit: Orbit<'_>) -> OrbitRecord {
    let mut seen: HashMap<&SystemPoint, usize> = HashMap::new();
    let mut hit = None;
    for (i, p) in orbit.points.iter().enumerate() {
        if let Some(&j) = seen.get(p) {
            hit = Some((j, i - j));
            break;
        }
        seen.insert(p, i);
    }
    match hit {
        Some((mu, lam)) => {
            let mut points = orbit.points;
            points.truncate(mu + lam + 1);
            OrbitRecord {
                points,
                tail_length: Some(mu),
                period: Some(lam),
                truncated: false,
                truncation_reason: None,
            }
        }
        None => orbit.truncated(),
    }
}

/// Oracle: `(tail, period)` by remembering every point.
pub fn preperiodic_by_history(system: &DynSystem, x: &SystemPoint, max_steps: usize) -> Result<Option<(usize, usize)>> {
    let mut seen: HashMap<SystemPoint, usize> = HashMap::new();
    let mut cur = x.clone();
    for i in 0..=max_steps {
        if let Some(&j) = seen.get(&cur) {
            return Ok(Some((j, i - j)));
        }
        seen.insert(cur.clone(), i);
        if i == max_steps {
            break;
        }
        cur = match system.apply(&cur) {
            Ok(p) => p,
            Err(Error::DegenerateFiber) => return Ok(None),
            Err(e) => return Err(e),
        };
    }
    Ok(None)
}
