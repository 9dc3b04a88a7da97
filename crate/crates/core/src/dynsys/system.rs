//! A sum type over the supported systems, componentwise products, and the
//! dynamical degree and growth exponent each family carries.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::heights::elliptic::EPoint;
use crate::heights::projective::ProjectivePoint;
use crate::numlin::ball::{BallReal, BigRat};
use crate::numlin::matrix::RatVec;
use crate::numlin::spectral::{spectral_data, Certification, SpectralData};

use super::abelian::ConcreteAbelianSystem;
use super::lattice::LatticeSystem;
use super::p1::P1Morphism;
use super::picard::PicardAction;
use super::wehler::{WehlerPoint, WehlerSystem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DynSystem {
    P1(P1Morphism),
    Lattice(LatticeSystem),
    Abelian(ConcreteAbelianSystem),
    Wehler(WehlerSystem),
    Picard(PicardAction),
    Product(Box<DynSystem>, Box<DynSystem>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SystemPoint {
    P1(ProjectivePoint),
    Lattice(RatVec),
    Abelian(Vec<EPoint>),
    Wehler(WehlerPoint),
    Pair(Box<SystemPoint>, Box<SystemPoint>),
}

impl fmt::Display for SystemPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemPoint::P1(p) => write!(f, "({p})"),
            SystemPoint::Lattice(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
            SystemPoint::Abelian(ps) => {
                let parts: Vec<String> = ps.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
            SystemPoint::Wehler(p) => write!(f, "{p}"),
            SystemPoint::Pair(a, b) => write!(f, "<{a}; {b}>"),
        }
    }
}

/// Whether a reported growth exponent is the exact `l_f` or only a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthKind {
    Exact,
    UpperBound,
}

impl GrowthKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GrowthKind::Exact => "exact",
            GrowthKind::UpperBound => "upper_bound",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeReport {
    pub delta: BallReal,
    /// `delta` as an exact rational when known.
    pub delta_exact: Option<BigRat>,
    pub l: u32,
    pub l_kind: GrowthKind,
    pub tag: &'static str,
    pub certification: Certification,
    pub spectral: Option<SpectralData>,
    pub components: Vec<DegreeReport>,
}

impl DegreeReport {
    /// Compares `(delta, l)` lexicographically. `None` when the degrees
    /// cannot be separated or identified.
    pub fn compare(&self, other: &DegreeReport) -> Option<Ordering> {
        let by_delta = match (&self.delta_exact, &other.delta_exact) {
            (Some(a), Some(b)) => a.cmp(b),
            _ => {
                if self.delta.upper() < other.delta.lower() {
                    Ordering::Less
                } else if other.delta.upper() < self.delta.lower() {
                    Ordering::Greater
                } else {
                    return None;
                }
            }
        };
        Some(by_delta.then(self.l.cmp(&other.l)))
    }
}

fn exact_rho(sd: &SpectralData) -> Option<BigRat> {
    if sd.rho.is_exact() {
        Some(sd.rho.mid().clone())
    } else {
        None
    }
}

fn matrix_square_report(sd: SpectralData) -> DegreeReport {
    DegreeReport {
        delta: sd.rho.square(),
        delta_exact: sd.rho_squared.clone(),
        l: 2 * sd.jordan_exponent,
        l_kind: GrowthKind::Exact,
        tag: "abelian_isogeny",
        certification: sd.certification,
        spectral: Some(sd),
        components: vec![],
    }
}

/// `(delta_f, l_f)` with the family it is derived from.
pub fn system_spectral(s: &DynSystem, prec: u32) -> Result<DegreeReport> {
    match s {
        DynSystem::P1(f) => {
            let d = BigRat::from_integer(BigInt::from(f.degree()));
            Ok(DegreeReport {
                delta: BallReal::exact(d.clone(), prec),
                delta_exact: Some(d),
                l: 0,
                l_kind: GrowthKind::Exact,
                tag: "polarized",
                certification: Certification::Exact,
                spectral: None,
                components: vec![],
            })
        }
        DynSystem::Lattice(l) => Ok(matrix_square_report(l.spectral(prec)?)),
        DynSystem::Abelian(a) => Ok(matrix_square_report(spectral_data(&a.rat_matrix(), prec)?)),
        DynSystem::Wehler(w) => {
            let sd = spectral_data(&w.picard_matrix(), prec)?;
            let hyperbolic = sd.rho.lower() > BigRat::from_integer(1.into());
            let (l, l_kind) = if hyperbolic {
                (0, GrowthKind::Exact)
            } else {
                (sd.jordan_exponent, GrowthKind::UpperBound)
            };
            Ok(DegreeReport {
                delta: sd.rho.clone(),
                delta_exact: exact_rho(&sd),
                l,
                l_kind,
                tag: "surface_automorphism",
                certification: sd.certification,
                spectral: Some(sd),
                components: vec![],
            })
        }
        DynSystem::Picard(p) => {
            let sd = p.spectral(prec)?;
            Ok(DegreeReport {
                delta: sd.rho.clone(),
                delta_exact: exact_rho(&sd),
                l: sd.jordan_exponent,
                l_kind: GrowthKind::UpperBound,
                tag: "picard_upper_bound",
                certification: sd.certification,
                spectral: Some(sd),
                components: vec![],
            })
        }
        DynSystem::Product(a, b) => {
            let ra = system_spectral(a, prec)?;
            let rb = system_spectral(b, prec)?;
            let (winner, cert) = match ra.compare(&rb) {
                Some(Ordering::Less) => (&rb, Certification::Exact),
                Some(_) => (&ra, Certification::Exact),
                None => {
                    // Overlapping, not provably equal: report the larger l.
                    if ra.l >= rb.l {
                        (&ra, Certification::Heuristic)
                    } else {
                        (&rb, Certification::Heuristic)
                    }
                }
            };
            let certification = cert
                .weakest(ra.certification)
                .weakest(rb.certification);
            Ok(DegreeReport {
                delta: winner.delta.clone(),
                delta_exact: winner.delta_exact.clone(),
                l: winner.l,
                l_kind: winner.l_kind,
                tag: "product",
                certification,
                spectral: None,
                components: vec![ra.clone(), rb.clone()],
            })
        }
    }
}

impl DynSystem {
    pub fn kind(&self) -> &'static str {
        match self {
            DynSystem::P1(_) => "p1",
            DynSystem::Lattice(_) => "lattice",
            DynSystem::Abelian(_) => "abelian",
            DynSystem::Wehler(_) => "wehler",
            DynSystem::Picard(_) => "picard",
            DynSystem::Product(..) => "product",
        }
    }

    pub fn product(a: DynSystem, b: DynSystem) -> DynSystem {
        DynSystem::Product(Box::new(a), Box::new(b))
    }

    pub fn apply(&self, p: &SystemPoint) -> Result<SystemPoint> {
        match (self, p) {
            (DynSystem::P1(f), SystemPoint::P1(x)) => Ok(SystemPoint::P1(f.apply(x))),
            (DynSystem::Lattice(l), SystemPoint::Lattice(v)) => Ok(SystemPoint::Lattice(l.apply(v)?)),
            (DynSystem::Abelian(a), SystemPoint::Abelian(x)) => Ok(SystemPoint::Abelian(a.apply(x)?)),
            (DynSystem::Wehler(w), SystemPoint::Wehler(x)) => Ok(SystemPoint::Wehler(w.apply(x)?)),
            (DynSystem::Product(f, g), SystemPoint::Pair(x, y)) => Ok(SystemPoint::Pair(
                Box::new(f.apply(x)?),
                Box::new(g.apply(y)?),
            )),
            (DynSystem::Picard(_), _) => Err(Error::Invalid(
                "a bare Picard action has no points".into(),
            )),
            _ => Err(Error::Invalid(format!(
                "point does not belong to a {} system",
                self.kind()
            ))),
        }
    }

    /// `f o f`.
    pub fn square(&self) -> DynSystem {
        match self {
            DynSystem::P1(f) => DynSystem::P1(f.compose(f)),
            DynSystem::Lattice(l) => DynSystem::Lattice(l.square()),
            DynSystem::Abelian(a) => DynSystem::Abelian(a.square()),
            DynSystem::Wehler(w) => DynSystem::Wehler(w.square()),
            DynSystem::Picard(p) => DynSystem::Picard(p.square()),
            DynSystem::Product(a, b) => DynSystem::product(a.square(), b.square()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::gram::GramForm;
    use crate::numlin::ball::rat;
    use crate::numlin::matrix::RatMatrix;

    fn example_lattice() -> DynSystem {
        let a = RatMatrix::from_ints(&[&[2, 3], &[0, 2]]);
        DynSystem::Lattice(LatticeSystem::new(a, None, GramForm::identity(2)).unwrap())
    }

    #[test]
    fn lattice_example_has_degree_four() {
        let r = system_spectral(&example_lattice(), 128).unwrap();
        assert!(r.delta.contains(&rat(4, 1)));
        assert_eq!(r.delta_exact, Some(rat(4, 1)));
        assert_eq!(r.l, 2);
        assert_eq!(r.tag, "abelian_isogeny");
    }

    #[test]
    fn squaring_map_is_polarized() {
        let r = system_spectral(&DynSystem::P1(P1Morphism::quadratic(0)), 64).unwrap();
        assert_eq!((r.delta_exact, r.l), (Some(rat(2, 1)), 0));
    }

    #[test]
    fn product_takes_lexicographic_max() {
        let s = DynSystem::product(DynSystem::P1(P1Morphism::quadratic(0)), example_lattice());
        let r = system_spectral(&s, 128).unwrap();
        assert_eq!((r.delta_exact.clone(), r.l), (Some(rat(4, 1)), 2));
        assert_eq!(r.components.len(), 2);
        // Equal degrees: larger l wins.
        let diag = RatMatrix::from_ints(&[&[2, 0], &[0, 2]]);
        let flat = DynSystem::Lattice(LatticeSystem::new(diag, None, GramForm::identity(2)).unwrap());
        let r = system_spectral(&DynSystem::product(flat, example_lattice()), 128).unwrap();
        assert_eq!(r.l, 2);
    }

    #[test]
    fn squares_square_the_degree() {
        for s in [
            example_lattice(),
            DynSystem::P1(P1Morphism::quadratic(-1)),
            DynSystem::product(DynSystem::P1(P1Morphism::quadratic(0)), example_lattice()),
        ] {
            let r = system_spectral(&s, 128).unwrap();
            let r2 = system_spectral(&s.square(), 128).unwrap();
            assert!(r2.delta.overlaps(&r.delta.square()));
            assert_eq!(r.l, r2.l);
        }
    }

    #[test]
    fn product_points_move_componentwise() {
        let s = DynSystem::product(DynSystem::P1(P1Morphism::quadratic(0)), example_lattice());
        let p = SystemPoint::Pair(
            Box::new(SystemPoint::P1(ProjectivePoint::from_i64(&[2, 1]).unwrap())),
            Box::new(SystemPoint::Lattice(vec![rat(0, 1), rat(1, 1)])),
        );
        let q = s.apply(&p).unwrap();
        assert_eq!(
            q,
            SystemPoint::Pair(
                Box::new(SystemPoint::P1(ProjectivePoint::from_i64(&[4, 1]).unwrap())),
                Box::new(SystemPoint::Lattice(vec![rat(3, 1), rat(2, 1)])),
            )
        );
        assert!(s.apply(&SystemPoint::Lattice(vec![])).is_err());
    }
}
