//! Dense square matrices over Q, the CM embedding, and exact linear algebra
//! helpers for rectangular systems.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ball::{rat_int, BigRat};
use super::poly::RatPoly;
use crate::error::{Error, Result};

pub type RatVec = Vec<BigRat>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    n: usize,
    data: Vec<BigRat>,
}

impl RatMatrix {
    pub fn zero(n: usize) -> Self {
        RatMatrix {
            n,
            data: vec![BigRat::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = BigRat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRat>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Invalid("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            data.extend(r);
        }
        Ok(RatMatrix { n, data })
    }

    /// Panics on ragged input; intended for literals.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat_int(x)).collect())
                .collect(),
        )
        .expect("square integer matrix")
    }

    pub fn diag(entries: &[BigRat]) -> Self {
        let n = entries.len();
        let mut m = Self::zero(n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRat {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRat) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRat] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<BigRat>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> RatVec {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_integer(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.data[j * self.n + i] = self.get(i, j).clone();
            }
        }
        m
    }

    pub fn trace(&self) -> BigRat {
        (0..self.n).fold(BigRat::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        RatMatrix {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        RatMatrix {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &BigRat) -> Self {
        RatMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let n = self.n;
        let mut m = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        m.data[i * n + j] += a * b;
                    }
                }
            }
        }
        m
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn mul_vec(&self, v: &[BigRat]) -> RatVec {
        assert_eq!(v.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), v)).collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigRat]) -> RatVec {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|j| (0..self.n).fold(BigRat::zero(), |acc, i| acc + &v[i] * self.get(i, j)))
            .collect()
    }

    /// `p(M)` by Horner's rule.
    pub fn eval_poly(&self, p: &RatPoly) -> Self {
        let mut acc = Self::zero(self.n);
        let id = Self::identity(self.n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&id.scale(c));
        }
        acc
    }

    /// Block diagonal `diag(a, b)`.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let n = a.n + b.n;
        let mut m = Self::zero(n);
        for i in 0..a.n {
            for j in 0..a.n {
                m.set(i, j, a.get(i, j).clone());
            }
        }
        for i in 0..b.n {
            for j in 0..b.n {
                m.set(a.n + i, a.n + j, b.get(i, j).clone());
            }
        }
        m
    }

    pub fn det(&self) -> BigRat {
        let mut rows = self.rows();
        let n = self.n;
        let mut det = BigRat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !rows[r][c].is_zero()) else {
                return BigRat::zero();
            };
            if p != c {
                rows.swap(p, c);
                det = -det;
            }
            let piv = rows[c][c].clone();
            det *= &piv;
            for r in c + 1..n {
                if rows[r][c].is_zero() {
                    continue;
                }
                let f = &rows[r][c] / &piv;
                for k in c..n {
                    let t = &f * &rows[c][k];
                    rows[r][k] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut aug: Vec<Vec<BigRat>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { BigRat::one() } else { BigRat::zero() }));
                r
            })
            .collect();
        let piv = rref(&mut aug);
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let rows = aug.into_iter().map(|r| r[n..].to_vec()).collect();
        Some(Self::from_rows(rows).unwrap())
    }

    /// Basis of the right kernel `{v : M v = 0}`.
    pub fn kernel(&self) -> Vec<RatVec> {
        nullspace(&self.rows(), self.n)
    }

    pub fn rank(&self) -> usize {
        let mut r = self.rows();
        rref(&mut r).len()
    }

    /// `det(tI - M)` via the Faddeev-LeVerrier recurrence.
    pub fn char_poly(&self) -> RatPoly {
        let n = self.n;
        let mut c = vec![BigRat::zero(); n + 1];
        c[n] = BigRat::one();
        let mut mk = Self::zero(n);
        let id = Self::identity(n);
        for k in 1..=n {
            mk = self.mul(&mk).add(&id.scale(&c[n - k + 1]));
            let am = self.mul(&mk);
            c[n - k] = -am.trace() / rat_int(k as i64);
        }
        RatPoly::new(c)
    }

    /// Monic minimal polynomial: lcm of the annihilators of the standard
    /// basis vectors, each found from its Krylov sequence.
    pub fn min_poly(&self) -> RatPoly {
        let mut acc = RatPoly::one();
        for i in 0..self.n {
            let mut e = vec![BigRat::zero(); self.n];
            e[i] = BigRat::one();
            if acc.deg() > 0 && self.eval_poly_on(&acc, &e).iter().all(|x| x.is_zero()) {
                continue;
            }
            let ann = self.vector_annihilator(&e);
            acc = acc.lcm(&ann);
        }
        acc
    }

    /// `p(M) v` without forming `p(M)`.
    pub fn eval_poly_on(&self, p: &RatPoly, v: &[BigRat]) -> RatVec {
        let mut acc = vec![BigRat::zero(); self.n];
        for c in p.coeffs().iter().rev() {
            acc = self.mul_vec(&acc);
            for (a, x) in acc.iter_mut().zip(v) {
                *a += c * x;
            }
        }
        acc
    }

    /// Monic polynomial of least degree with `p(M) v = 0`.
    pub fn vector_annihilator(&self, v: &[BigRat]) -> RatPoly {
        // reduced Krylov vectors with the polynomial that produced each
        let mut basis: Vec<(usize, RatVec, RatPoly)> = Vec::new();
        let mut w = v.to_vec();
        let mut k = 0usize;
        loop {
            let mut vec = w.clone();
            let mut poly = RatPoly::monomial(BigRat::one(), k);
            for (piv, bv, bp) in &basis {
                if vec[*piv].is_zero() {
                    continue;
                }
                let f = vec[*piv].clone();
                for (a, b) in vec.iter_mut().zip(bv) {
                    *a -= &f * b;
                }
                poly = &poly - &bp.scale(&f);
            }
            match vec.iter().position(|x| !x.is_zero()) {
                None => return poly.monic(),
                Some(piv) => {
                    let inv = BigRat::one() / &vec[piv];
                    for a in vec.iter_mut() {
                        *a *= &inv;
                    }
                    let poly = poly.scale(&inv);
                    // keep the basis fully reduced at the new pivot
                    for (_, bv, bp) in basis.iter_mut() {
                        if !bv[piv].is_zero() {
                            let f = bv[piv].clone();
                            for (a, b) in bv.iter_mut().zip(&vec) {
                                *a -= &f * b;
                            }
                            *bp = &*bp - &poly.scale(&f);
                        }
                    }
                    basis.push((piv, vec, poly));
                }
            }
            w = self.mul_vec(&w);
            k += 1;
        }
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    /// Max-norm of entries, as a rational.
    pub fn max_abs(&self) -> BigRat {
        self.data
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigRat::zero)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Matrix over the order `Z[omega]` with `omega^2 = -d`, stored as
/// `real + omega * omega_part`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CMMatrix {
    pub real_part: RatMatrix,
    pub omega_part: RatMatrix,
    pub cm_d: u64,
}

impl CMMatrix {
    pub fn new(real_part: RatMatrix, omega_part: RatMatrix, cm_d: u64) -> Result<Self> {
        if real_part.dim() != omega_part.dim() {
            return Err(Error::DimensionMismatch {
                expected: real_part.dim(),
                got: omega_part.dim(),
            });
        }
        Ok(CMMatrix {
            real_part,
            omega_part,
            cm_d,
        })
    }

    pub fn dim(&self) -> usize {
        self.real_part.dim()
    }

    /// Regular representation: entry `x + y*omega` becomes the 2x2 block
    /// `x*I + y*[[0, -d], [1, 0]]`. With `d = 0` the real part is returned.
    pub fn embed(&self) -> RatMatrix {
        if self.cm_d == 0 {
            return self.real_part.clone();
        }
        let r = self.dim();
        let d = rat_int(self.cm_d as i64);
        let mut m = RatMatrix::zero(2 * r);
        for i in 0..r {
            for j in 0..r {
                let x = self.real_part.get(i, j);
                let y = self.omega_part.get(i, j);
                m.set(2 * i, 2 * j, x.clone());
                m.set(2 * i + 1, 2 * j + 1, x.clone());
                m.set(2 * i, 2 * j + 1, -(y * &d));
                m.set(2 * i + 1, 2 * j, y.clone());
            }
        }
        m
    }

    /// The embedded action of multiplication by `omega` on `Q^(2r)`.
    pub fn omega_action(r: usize, d: u64) -> RatMatrix {
        CMMatrix::new(RatMatrix::zero(r), RatMatrix::identity(r), d)
            .unwrap()
            .embed()
    }
}

pub fn dot(a: &[BigRat], b: &[BigRat]) -> BigRat {
    a.iter()
        .zip(b)
        .fold(BigRat::zero(), |acc, (x, y)| if x.is_zero() { acc } else { acc + x * y })
}

pub fn vec_add(a: &[BigRat], b: &[BigRat]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[BigRat], b: &[BigRat]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[BigRat], c: &BigRat) -> RatVec {
    a.iter().map(|x| x * c).collect()
}

pub fn is_zero_vec(a: &[BigRat]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// `v^T G v`.
pub fn quad_form(g: &RatMatrix, v: &[BigRat]) -> BigRat {
    dot(v, &g.mul_vec(v))
}

/// In-place reduced row echelon form; returns the pivot columns.
pub fn rref(rows: &mut [Vec<BigRat>]) -> Vec<usize> {
    let m = rows.len();
    if m == 0 {
        return vec![];
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = BigRat::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{x : rows * x = 0}` for a matrix with `ncols` columns.
pub fn nullspace(rows: &[Vec<BigRat>], ncols: usize) -> Vec<RatVec> {
    let mut r = rows.to_vec();
    let piv = rref(&mut r);
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRat::zero(); ncols];
            v[f] = BigRat::one();
            for (i, &pc) in piv.iter().enumerate() {
                v[pc] = -r[i][f].clone();
            }
            v
        })
        .collect()
}

/// One solution of `rows * x = b`, if any.
pub fn solve(rows: &[Vec<BigRat>], b: &[BigRat]) -> Option<RatVec> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<BigRat>> = rows
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![BigRat::zero(); ncols];
    for (i, &pc) in piv.iter().enumerate() {
        x[pc] = aug[i][ncols].clone();
    }
    Some(x)
}

/// Echelon basis of the span of `vectors`.
pub fn span_basis(vectors: &[RatVec]) -> Vec<RatVec> {
    if vectors.is_empty() {
        return vec![];
    }
    let mut r = vectors.to_vec();
    let piv = rref(&mut r);
    r.truncate(piv.len());
    r
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(basis: &[RatVec], v: &[BigRat]) -> bool {
    if is_zero_vec(v) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    let mut rows = basis.to_vec();
    let r0 = rref(&mut rows).len();
    rows.truncate(r0);
    rows.push(v.to_vec());
    rref(&mut rows).len() == r0
}

/// Intersection of two subspaces given by spanning sets.
pub fn intersect_spans(a: &[RatVec], b: &[RatVec], n: usize) -> Vec<RatVec> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    // solve sum x_i a_i - sum y_j b_j = 0
    let k = a.len() + b.len();
    let rows: Vec<Vec<BigRat>> = (0..n)
        .map(|coord| {
            a.iter()
                .map(|v| v[coord].clone())
                .chain(b.iter().map(|v| -v[coord].clone()))
                .collect()
        })
        .collect();
    let ns = nullspace(&rows, k);
    let vs: Vec<RatVec> = ns
        .iter()
        .map(|c| {
            let mut v = vec![BigRat::zero(); n];
            for (i, ai) in a.iter().enumerate() {
                if !c[i].is_zero() {
                    for (x, y) in v.iter_mut().zip(ai) {
                        *x += &c[i] * y;
                    }
                }
            }
            v
        })
        .collect();
    span_basis(&vs)
}

/// Least common multiple of denominators, then divided by the gcd of the
/// numerators: the primitive integer vector on the same line.
pub fn primitive_integer_vector(v: &[BigRat]) -> Vec<BigInt> {
    use num_integer::Integer;
    let mut den = BigInt::one();
    for x in v {
        den = den.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRat::from_integer(den.clone())).to_integer())
        .collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    let first_neg = ints.iter().find(|x| !x.is_zero()).map_or(false, |x| x.is_negative());
    ints.into_iter()
        .map(|x| if first_neg { -(x / &g) } else { x / &g })
        .collect()
}
