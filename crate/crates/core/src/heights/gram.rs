//! Gram forms on lattices of points and the heights they induce.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::heights::elliptic::{EPoint, EllipticCurve};
use crate::heights::neron_tate::neron_tate;
use crate::numlin::ball::{BallReal, BigRat, DEFAULT_PRECISION};
use crate::numlin::matrix::{quad_form, RatMatrix};
use crate::numlin::spectral::inertia;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GramMatrix {
    Rational(RatMatrix),
    Ball(Vec<Vec<BallReal>>),
}

/// A symmetric positive semidefinite form, optionally compatible with a
/// complex multiplication `J` (`J^2 = -d I`, `J^T G J = d G`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramForm {
    rank: usize,
    gram: GramMatrix,
    cm_action: Option<RatMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeHeight {
    Exact(BigRat),
    Ball(BallReal),
}

impl LatticeHeight {
    pub fn to_ball(&self, prec: u32) -> BallReal {
        match self {
            LatticeHeight::Exact(q) => BallReal::exact(q.clone(), prec),
            LatticeHeight::Ball(b) => b.clone(),
        }
    }

    pub fn exact(&self) -> Option<&BigRat> {
        match self {
            LatticeHeight::Exact(q) => Some(q),
            LatticeHeight::Ball(_) => None,
        }
    }
}

impl GramForm {
    pub fn rational(g: RatMatrix) -> Result<Self> {
        if !g.is_symmetric() {
            return Err(Error::Invalid("gram matrix is not symmetric".into()));
        }
        if inertia(&g).1 > 0 {
            return Err(Error::Invalid("gram matrix is not positive semidefinite".into()));
        }
        Ok(GramForm {
            rank: g.dim(),
            gram: GramMatrix::Rational(g),
            cm_action: None,
        })
    }

    pub fn identity(r: usize) -> Self {
        Self::rational(RatMatrix::identity(r)).unwrap()
    }

    /// Attaches a CM action after checking `J^2 = -d I` and `J^T G J = d G`.
    pub fn with_cm(self, j: RatMatrix) -> Result<Self> {
        let g = match &self.gram {
            GramMatrix::Rational(g) => g,
            GramMatrix::Ball(_) => {
                return Err(Error::Invalid("CM action needs a rational gram matrix".into()))
            }
        };
        if j.dim() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: j.dim(),
            });
        }
        let d = cm_degree(&j)?;
        if j.transpose().mul(g).mul(&j) != g.scale(&d) {
            return Err(Error::Invalid("gram form is not compatible with J".into()));
        }
        Ok(GramForm {
            cm_action: Some(j),
            ..self
        })
    }

    /// Symmetric ball matrix; symmetry is enforced by averaging.
    pub fn from_balls(mut m: Vec<Vec<BallReal>>) -> Result<Self> {
        let r = m.len();
        if m.iter().any(|row| row.len() != r) {
            return Err(Error::Invalid("gram matrix is not square".into()));
        }
        let half = BigRat::new(1.into(), 2.into());
        for i in 0..r {
            for j in (i + 1)..r {
                let avg = (&m[i][j] + &m[j][i]).scale(&half);
                m[i][j] = avg.clone();
                m[j][i] = avg;
            }
        }
        Ok(GramForm {
            rank: r,
            gram: GramMatrix::Ball(m),
            cm_action: None,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn cm_action(&self) -> Option<&RatMatrix> {
        self.cm_action.as_ref()
    }

    pub fn rational_matrix(&self) -> Option<&RatMatrix> {
        match &self.gram {
            GramMatrix::Rational(g) => Some(g),
            GramMatrix::Ball(_) => None,
        }
    }

    pub fn entry(&self, i: usize, j: usize, prec: u32) -> BallReal {
        match &self.gram {
            GramMatrix::Rational(g) => BallReal::exact(g.get(i, j).clone(), prec),
            GramMatrix::Ball(m) => m[i][j].clone(),
        }
    }

    /// Ball enclosure of the determinant of the principal minor on `idx`.
    pub fn minor_det(&self, idx: &[usize], prec: u32) -> BallReal {
        let m: Vec<Vec<BallReal>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| self.entry(i, j, prec)).collect())
            .collect();
        ball_det(&m, prec)
    }
}

/// `d` with `J^2 = -d I`, `d > 0`.
pub fn cm_degree(j: &RatMatrix) -> Result<BigRat> {
    let sq = j.mul(j);
    let n = j.dim();
    if n == 0 {
        return Err(Error::Invalid("empty CM action".into()));
    }
    let d = -sq.get(0, 0).clone();
    if d <= BigRat::zero() || sq != RatMatrix::identity(n).scale(&(-d.clone())) {
        return Err(Error::Invalid("J^2 is not a negative scalar".into()));
    }
    Ok(d)
}

/// Cofactor expansion in ball arithmetic; intended for small matrices.
pub fn ball_det(m: &[Vec<BallReal>], prec: u32) -> BallReal {
    let n = m.len();
    match n {
        0 => BallReal::one(prec),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = BallReal::zero(prec);
            for c in 0..n {
                let minor: Vec<Vec<BallReal>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != c)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][c] * &ball_det(&minor, prec);
                acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// `v^T G v`, exact for rational forms.
pub fn lattice_height(v: &[BigRat], g: &GramForm) -> Result<LatticeHeight> {
    if v.len() != g.rank {
        return Err(Error::DimensionMismatch {
            expected: g.rank,
            got: v.len(),
        });
    }
    match &g.gram {
        GramMatrix::Rational(m) => Ok(LatticeHeight::Exact(quad_form(m, v))),
        GramMatrix::Ball(m) => {
            let prec = m
                .first()
                .and_then(|r| r.first())
                .map(|b| b.prec())
                .unwrap_or(DEFAULT_PRECISION);
            let mut acc = BallReal::zero(prec);
            for (i, vi) in v.iter().enumerate() {
                for (j, vj) in v.iter().enumerate() {
                    acc = &acc + &m[i][j].scale(&(vi * vj));
                }
            }
            Ok(LatticeHeight::Ball(acc))
        }
    }
}

/// `<P, Q> = (hhat(P + Q) - hhat(P) - hhat(Q)) / 2`.
pub fn nt_pairing(curve: &EllipticCurve, p: &EPoint, q: &EPoint, tol: f64) -> Result<BallReal> {
    let hp = neron_tate(curve, p, tol)?.value;
    if p == q {
        return Ok(hp);
    }
    let hq = neron_tate(curve, q, tol)?.value;
    let hs = neron_tate(curve, &curve.add(p, q), tol)?.value;
    Ok((&(&hs - &hp) - &hq).scale(&BigRat::new(1.into(), 2.into())))
}

/// Pairwise Neron-Tate pairings as a ball Gram form.
pub fn gram_from_points(curve: &EllipticCurve, points: &[EPoint], tol: f64) -> Result<GramForm> {
    let n = points.len();
    let diag: Vec<BallReal> = points
        .iter()
        .map(|p| neron_tate(curve, p, tol).map(|h| h.value))
        .collect::<Result<_>>()?;
    let prec = diag.first().map(|b| b.prec()).unwrap_or(DEFAULT_PRECISION);
    let half = BigRat::new(1.into(), 2.into());
    let mut m = vec![vec![BallReal::zero(prec); n]; n];
    for i in 0..n {
        m[i][i] = diag[i].clone();
        for j in (i + 1)..n {
            let hs = neron_tate(curve, &curve.add(&points[i], &points[j]), tol)?.value;
            let pair = (&(&hs - &diag[i]) - &diag[j]).scale(&half);
            m[i][j] = pair.clone();
            m[j][i] = pair;
        }
    }
    GramForm::from_balls(m)
}
