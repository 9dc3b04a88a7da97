//! Wehler surfaces: smooth (2,2,2) hypersurfaces in `P^1 x P^1 x P^1` and
//! the three Vieta involutions coming from the double covers to `P^1 x P^1`.
//!
//! A form is stored by its 27 coefficients; index `9i + 3j + k` multiplies
//! `x0^i x1^(2-i) y0^j y1^(2-j) z0^k z1^(2-k)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::heights::projective::ProjectivePoint;
use crate::numlin::ball::BigRat;
use crate::numlin::intgcd::{gcd_all, gcd_bigint};
use crate::numlin::matrix::{nullspace, primitive_integer_vector, RatMatrix};
use crate::numlin::poly::RatPoly;

use super::picard::PicardAction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }

    /// Accepts `x`, `sx`, `sigma_x` and `σx` (any case).
    pub fn parse(s: &str) -> Option<Axis> {
        let t = s.trim().to_lowercase();
        let t = t
            .trim_start_matches("sigma_")
            .trim_start_matches("sigma")
            .trim_start_matches('σ')
            .trim_start_matches('s');
        match t {
            "x" => Some(Axis::X),
            "y" => Some(Axis::Y),
            "z" => Some(Axis::Z),
            _ => None,
        }
    }

    /// Action of the involution on the classes `(D_x, D_y, D_z)`, as rows.
    pub fn picard_generator(self) -> RatMatrix {
        match self {
            Axis::X => RatMatrix::from_ints(&[&[-1, 2, 2], &[0, 1, 0], &[0, 0, 1]]),
            Axis::Y => RatMatrix::from_ints(&[&[1, 0, 0], &[2, -1, 2], &[0, 0, 1]]),
            Axis::Z => RatMatrix::from_ints(&[&[1, 0, 0], &[0, 1, 0], &[2, 2, -1]]),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.name())
    }
}

/// Intersection form on `(D_x, D_y, D_z)`: `D_i^2 = 0`, `D_i D_j = 2`.
pub fn intersection_form() -> RatMatrix {
    RatMatrix::from_ints(&[&[0, 2, 2], &[2, 0, 2], &[2, 2, 0]])
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WehlerPoint {
    pub coords: [ProjectivePoint; 3],
}

impl WehlerPoint {
    pub fn new(x: ProjectivePoint, y: ProjectivePoint, z: ProjectivePoint) -> Result<Self> {
        for p in [&x, &y, &z] {
            if p.dim() != 1 {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    got: p.dim(),
                });
            }
        }
        Ok(WehlerPoint { coords: [x, y, z] })
    }

    pub fn from_i64(c: [[i64; 2]; 3]) -> Result<Self> {
        Self::new(
            ProjectivePoint::from_i64(&c[0])?,
            ProjectivePoint::from_i64(&c[1])?,
            ProjectivePoint::from_i64(&c[2])?,
        )
    }

    pub fn coord(&self, a: Axis) -> &ProjectivePoint {
        &self.coords[a.index()]
    }

    /// Total bit size, used for height budgets.
    pub fn size_bits(&self) -> u64 {
        self.coords.iter().map(|p| p.size_bits()).sum()
    }
}

impl fmt::Display for WehlerPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.coords[0], self.coords[1], self.coords[2])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WehlerForm {
    coeffs: Vec<BigInt>,
}

fn monomial_values(p: &ProjectivePoint) -> [BigInt; 3] {
    let c = p.coords();
    [&c[1] * &c[1], &c[0] * &c[1], &c[0] * &c[0]]
}

fn index(e: [usize; 3]) -> usize {
    9 * e[0] + 3 * e[1] + e[2]
}

impl WehlerForm {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() != 27 {
            return Err(Error::DimensionMismatch {
                expected: 27,
                got: coeffs.len(),
            });
        }
        Ok(WehlerForm { coeffs })
    }

    pub fn from_i64(c: &[i64]) -> Result<Self> {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval(&self, p: &WehlerPoint) -> BigInt {
        let mx = monomial_values(&p.coords[0]);
        let my = monomial_values(&p.coords[1]);
        let mz = monomial_values(&p.coords[2]);
        let mut acc = BigInt::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut inner = BigInt::zero();
                for k in 0..3 {
                    let c = &self.coeffs[index([i, j, k])];
                    if !c.is_zero() {
                        inner += c * &mz[k];
                    }
                }
                if !inner.is_zero() {
                    acc += inner * &mx[i] * &my[j];
                }
            }
        }
        acc
    }

    pub fn contains(&self, p: &WehlerPoint) -> bool {
        self.eval(p).is_zero()
    }

    /// `(a, b, c)` with `F = a u0^2 + b u0 u1 + c u1^2` along `axis` at the
    /// other two coordinates of `p`.
    pub fn fiber_quadratic(&self, axis: Axis, p: &WehlerPoint) -> [BigInt; 3] {
        let ax = axis.index();
        let others: Vec<usize> = (0..3).filter(|&i| i != ax).collect();
        let m1 = monomial_values(&p.coords[others[0]]);
        let m2 = monomial_values(&p.coords[others[1]]);
        let mut out = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
        for (slot, e_ax) in [(0usize, 2usize), (1, 1), (2, 0)] {
            let mut acc = BigInt::zero();
            for e1 in 0..3 {
                let mut inner = BigInt::zero();
                for e2 in 0..3 {
                    let mut e = [0usize; 3];
                    e[ax] = e_ax;
                    e[others[0]] = e1;
                    e[others[1]] = e2;
                    let c = &self.coeffs[index(e)];
                    if !c.is_zero() {
                        inner += c * &m2[e2];
                    }
                }
                if !inner.is_zero() {
                    acc += inner * &m1[e1];
                }
            }
            out[slot] = acc;
        }
        out
    }

    /// Coefficient matrix along `axis`: rows by the axis exponent `0..3`,
    /// columns by the nine monomials in the other two coordinates.
    fn axis_matrix(&self, axis: Axis) -> Vec<Vec<BigInt>> {
        let ax = axis.index();
        let others: Vec<usize> = (0..3).filter(|&i| i != ax).collect();
        (0..3)
            .map(|e_ax| {
                let mut row = Vec::with_capacity(9);
                for e1 in 0..3 {
                    for e2 in 0..3 {
                        let mut e = [0usize; 3];
                        e[ax] = e_ax;
                        e[others[0]] = e1;
                        e[others[1]] = e2;
                        row.push(self.coeffs[index(e)].clone());
                    }
                }
                row
            })
            .collect()
    }

    /// Rejects forms with a visible factorization: a factor in one
    /// coordinate alone, or a product of a form in one coordinate with a
    /// form in the other two.
    pub fn factor_screen(&self) -> Result<()> {
        if self.coeffs.iter().all(|c| c.is_zero()) {
            return Err(Error::AllZero);
        }
        for axis in Axis::ALL {
            let m = self.axis_matrix(axis);
            if m[2].iter().all(|c| c.is_zero()) {
                return Err(Error::Invalid(format!(
                    "form is divisible by a linear form in {}",
                    axis.name()
                )));
            }
            let mut g = RatPoly::zero();
            for col in 0..9 {
                let poly = RatPoly::from_bigints(&[m[0][col].clone(), m[1][col].clone(), m[2][col].clone()]);
                g = g.gcd(&poly);
            }
            if g.deg() > 0 {
                return Err(Error::Invalid(format!(
                    "form has a factor depending only on {}",
                    axis.name()
                )));
            }
            let rows: Vec<Vec<BigRat>> = m
                .iter()
                .map(|r| r.iter().map(|c| BigRat::from_integer(c.clone())).collect())
                .collect();
            let mut check = rows;
            if crate::numlin::matrix::rref(&mut check).len() <= 1 {
                return Err(Error::Invalid(format!(
                    "form splits as a product along {}",
                    axis.name()
                )));
            }
        }
        Ok(())
    }

    /// Integer forms vanishing at `points`, with extra linear constraints on
    /// the coefficient vector, as a seeded random integer combination of a
    /// kernel basis. Each basis vector is scaled to be primitive.
    pub fn random_through(points: &[WehlerPoint], extra: &[Vec<BigRat>], rng: &mut ChaCha8Rng) -> Result<Self> {
        let mut rows: Vec<Vec<BigRat>> = points.iter().map(vanishing_row).collect();
        rows.extend(extra.iter().cloned());
        let basis = nullspace(&rows, 27);
        if basis.is_empty() {
            return Err(Error::Invalid("no (2,2,2) form satisfies the constraints".into()));
        }
        for _ in 0..64 {
            let mut acc = vec![BigInt::zero(); 27];
            for b in &basis {
                let k: i64 = rng.gen_range(-3..=3);
                if k == 0 {
                    continue;
                }
                for (a, c) in acc.iter_mut().zip(primitive_integer_vector(b)) {
                    *a += c * k;
                }
            }
            let g = gcd_all(acc.iter());
            if g.is_zero() {
                continue;
            }
            let form = WehlerForm::new(acc.into_iter().map(|c| c / &g).collect())?;
            if form.factor_screen().is_ok() {
                return Ok(form);
            }
        }
        Err(Error::Invalid("could not draw an unsplit form".into()))
    }
}

/// Linear functional `coeffs -> F(p)`.
pub fn vanishing_row(p: &WehlerPoint) -> Vec<BigRat> {
    let mx = monomial_values(&p.coords[0]);
    let my = monomial_values(&p.coords[1]);
    let mz = monomial_values(&p.coords[2]);
    let mut row = vec![BigRat::zero(); 27];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                row[index([i, j, k])] = BigRat::from_integer(&mx[i] * &my[j] * &mz[k]);
            }
        }
    }
    row
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WehlerSystem {
    form: WehlerForm,
    word: Vec<Axis>,
}

impl WehlerSystem {
    /// The word is a composition: `[a, b, c]` is `s_a o s_b o s_c`, so the
    /// last letter acts first.
    pub fn new(form: WehlerForm, word: Vec<Axis>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::Invalid("word must be nonempty".into()));
        }
        form.factor_screen()?;
        Ok(WehlerSystem { form, word })
    }

    pub fn form(&self) -> &WehlerForm {
        &self.form
    }

    pub fn word(&self) -> &[Axis] {
        &self.word
    }

    pub fn word_string(&self) -> String {
        self.word.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
    }

    pub fn involution(&self, axis: Axis, p: &WehlerPoint) -> Result<WehlerPoint> {
        wehler_involution(&self.form, axis, p)
    }

    pub fn apply(&self, p: &WehlerPoint) -> Result<WehlerPoint> {
        let mut q = p.clone();
        for &a in self.word.iter().rev() {
            q = wehler_involution(&self.form, a, &q)?;
        }
        Ok(q)
    }

    /// The word repeated twice.
    pub fn square(&self) -> Self {
        let mut w = self.word.clone();
        w.extend(self.word.iter().copied());
        WehlerSystem {
            form: self.form.clone(),
            word: w,
        }
    }

    /// Product of the generator matrices in word order. Its transpose is the
    /// pullback on `(D_x, D_y, D_z)` in column convention.
    pub fn picard_matrix(&self) -> RatMatrix {
        let mut m = RatMatrix::identity(3);
        for a in &self.word {
            m = m.mul(&a.picard_generator());
        }
        m
    }

    pub fn picard(&self) -> PicardAction {
        wehler_picard(self)
    }
}

/// The other root of the fiber quadratic through `p` along `axis`.
pub fn wehler_involution(form: &WehlerForm, axis: Axis, p: &WehlerPoint) -> Result<WehlerPoint> {
    if !form.contains(p) {
        return Err(Error::Invalid(format!("{p} is not on the surface")));
    }
    let [a, b, c] = form.fiber_quadratic(axis, p);
    let u = p.coord(axis).coords();
    let (u0, u1) = (&u[0], &u[1]);
    let (mut n0, mut n1) = if !u1.is_zero() {
        (-(&a * u0 + &b * u1), &a * u1)
    } else {
        (c.clone(), -b.clone())
    };
    if n0.is_zero() && n1.is_zero() {
        return Err(Error::DegenerateFiber);
    }
    let g = gcd_bigint(&n0, &n1);
    if !g.is_one() {
        n0 /= &g;
        n1 /= &g;
    }
    if n0.is_negative() || (n0.is_zero() && n1.is_negative()) {
        n0 = -n0;
        n1 = -n1;
    }
    let mut coords = p.coords.clone();
    coords[axis.index()] = ProjectivePoint::from_integers(vec![n0, n1])?;
    Ok(WehlerPoint { coords })
}

pub fn wehler_picard(s: &WehlerSystem) -> PicardAction {
    PicardAction::new(
        s.picard_matrix(),
        None,
        format!("wehler {}", s.word_string()),
    )
    .expect("generator products are square")
}

/// A seeded (2,2,2) form through `n_points` random points with small
/// coordinates, together with those points.
pub fn seeded_instance(seed: u64, n_points: usize, word: Vec<Axis>) -> Result<(WehlerSystem, Vec<WehlerPoint>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<WehlerPoint> = Vec::new();
    while points.len() < n_points {
        let mut c = [[0i64; 2]; 3];
        for coord in c.iter_mut() {
            loop {
                let a = rng.gen_range(-3..=3);
                let b = rng.gen_range(1..=3);
                if num_integer::Integer::gcd(&a, &b) == 1 {
                    *coord = [a, b];
                    break;
                }
            }
        }
        let p = WehlerPoint::from_i64(c)?;
        if !points.contains(&p) {
            points.push(p);
        }
    }
    let form = WehlerForm::random_through(&points, &[], &mut rng)?;
    Ok((WehlerSystem::new(form, word)?, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::spectral::spectral_data;

    fn sigma_xyz() -> Vec<Axis> {
        vec![Axis::X, Axis::Y, Axis::Z]
    }

    #[test]
    fn generators_are_involutions() {
        for a in Axis::ALL {
            let s = a.picard_generator();
            assert_eq!(s.mul(&s), RatMatrix::identity(3));
            // Pullbacks preserve the intersection form.
            let q = intersection_form();
            assert_eq!(s.mul(&q).mul(&s.transpose()), q);
        }
    }

    #[test]
    fn seeded_points_lie_on_surface_and_flip_back() {
        let (sys, pts) = seeded_instance(7, 5, sigma_xyz()).unwrap();
        for p in &pts {
            assert!(sys.form().contains(p));
            for a in Axis::ALL {
                let q = sys.involution(a, p).unwrap();
                assert!(sys.form().contains(&q));
                assert_eq!(&sys.involution(a, &q).unwrap(), p);
            }
        }
    }

    #[test]
    fn double_root_is_fixed() {
        // Force the x-fiber through P to be tangent: F(P) = 0 and dF/dx0(P) = 0.
        let p = WehlerPoint::from_i64([[1, 1], [2, 1], [-1, 3]]).unwrap();
        let mut d = vec![BigRat::zero(); 27];
        let my = monomial_values(&p.coords[1]);
        let mz = monomial_values(&p.coords[2]);
        // d/dx0 of x0^i x1^(2-i) at (1, 1) is i.
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    d[index([i, j, k])] = BigRat::from_integer(BigInt::from(i) * &my[j] * &mz[k]);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let form = WehlerForm::random_through(&[p.clone()], &[d], &mut rng).unwrap();
        assert_eq!(wehler_involution(&form, Axis::X, &p).unwrap(), p);
    }

    #[test]
    fn screen_rejects_split_forms() {
        // (x0 - x1) * y0 * ... : every coefficient with x-exponent 2 vanishes
        // after multiplying by x1, so build x1 * (x0 + x1) * y0 y1 * z0 z1.
        let mut c = vec![0i64; 27];
        c[index([1, 1, 1])] = 1;
        c[index([0, 1, 1])] = 1;
        assert!(WehlerForm::from_i64(&c).unwrap().factor_screen().is_err());
        // (x0^2 + x1^2)(y0^2 z0^2 + y1^2 z1^2 + y0 y1 z0 z1): rank one along x.
        let mut c = vec![0i64; 27];
        for i in [0usize, 2] {
            c[index([i, 2, 2])] = 1;
            c[index([i, 0, 0])] = 1;
            c[index([i, 1, 1])] = 1;
        }
        assert!(WehlerForm::from_i64(&c).unwrap().factor_screen().is_err());
    }

    #[test]
    fn picard_words() {
        let (sys, _) = seeded_instance(1, 3, vec![Axis::X]).unwrap();
        let m = sys.picard_matrix();
        assert_eq!(m.mul(&m), RatMatrix::identity(3));
        let full = WehlerSystem::new(sys.form().clone(), sigma_xyz()).unwrap();
        let sd = spectral_data(&full.picard_matrix(), 128).unwrap();
        // 9 + 4 sqrt(5) = 17.944...
        assert!((sd.rho.to_f64() - (9.0 + 4.0 * 5f64.sqrt())).abs() < 1e-12);
        let two = WehlerSystem::new(sys.form().clone(), vec![Axis::X, Axis::Y]).unwrap();
        let sd2 = spectral_data(&two.picard_matrix(), 128).unwrap();
        // S_x S_y is unipotent with a single Jordan block: it preserves the
        // fibration by z.
        assert!(sd2.rho.contains(&BigRat::one()));
        assert_eq!(sd2.jordan_exponent, 2);
    }

    #[test]
    fn axis_parsing() {
        assert_eq!(Axis::parse("σx"), Some(Axis::X));
        assert_eq!(Axis::parse("sy"), Some(Axis::Y));
        assert_eq!(Axis::parse("Z"), Some(Axis::Z));
        assert_eq!(Axis::parse("w"), None);
    }
}
