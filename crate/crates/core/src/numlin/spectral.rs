//! Spectral radius, Jordan exponent and dominant factors of rational
//! matrices; Perron eigenvectors of cone-preserving maps; a brute-force
//! growth-rate oracle for tests.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ball::{ln_rat, rat_int, BallReal, BigRat, DEFAULT_PRECISION, MAX_PRECISION};
use super::factor::factor_rational;
use super::matrix::{dot, vec_scale, vec_sub, CMMatrix, RatMatrix, RatVec};
use super::poly::RatPoly;
use super::roots::root_enclosures;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Certification {
    Exact,
    NumericCertified,
    Heuristic,
}

impl Certification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Certification::Exact => "exact",
            Certification::NumericCertified => "numeric-certified",
            Certification::Heuristic => "heuristic",
        }
    }

    /// The weaker of two levels.
    pub fn weakest(self, other: Certification) -> Certification {
        self.max(other)
    }
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether all roots of a dominant factor sit at the spectral radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dominance {
    /// Proven: every root has modulus rho.
    Full,
    /// Every root modulus enclosure overlaps rho, without a proof of equality.
    FullNumeric,
    /// Proven: some root has modulus strictly below rho.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominantFactor {
    pub factor: RatPoly,
    /// Multiplicity in the minimal polynomial (largest Jordan block size).
    pub multiplicity: u32,
    pub certification: Certification,
    pub dominance: Dominance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralData {
    pub rho: BallReal,
    pub jordan_exponent: u32,
    pub dominant_factors: Vec<DominantFactor>,
    pub certification: Certification,
    /// `rho^2` when it is a rational number that was computed exactly.
    pub rho_squared: Option<BigRat>,
    /// All irreducible factors of the minimal polynomial with multiplicities.
    pub min_poly_factors: Vec<(RatPoly, u32)>,
    pub precision_bits: u32,
}

/// Exact `max |root|^2` of an irreducible factor, when it is rational.
fn exact_max_modulus_sq(f: &RatPoly) -> Option<BigRat> {
    let f = f.monic();
    match f.deg() {
        1 => {
            let r = -f.coeff(0);
            Some(&r * &r)
        }
        2 => {
            let (c0, c1) = (f.coeff(0), f.coeff(1));
            let disc = &c1 * &c1 - rat_int(4) * &c0;
            if disc.is_negative() {
                Some(c0)
            } else if c1.is_zero() {
                Some(-c0)
            } else {
                None
            }
        }
        _ => None,
    }
}

fn dominance_of(f: &RatPoly, root_moduli: &[BallReal], rho: &BallReal) -> Dominance {
    let f = f.monic();
    match f.deg() {
        1 => return Dominance::Full,
        2 => {
            let (c0, c1) = (f.coeff(0), f.coeff(1));
            let disc = &c1 * &c1 - rat_int(4) * &c0;
            return if disc.is_negative() || c1.is_zero() {
                Dominance::Full
            } else {
                Dominance::Mixed
            };
        }
        _ => {}
    }
    if root_moduli.iter().any(|m| m.upper() < rho.lower()) {
        Dominance::Mixed
    } else {
        Dominance::FullNumeric
    }
}

/// Reflection class representative: `q ~ p` when `q(t)` is a constant
/// multiple of `p(-t)`, which forces equal root moduli.
fn reflection_equivalent(p: &RatPoly, q: &RatPoly) -> bool {
    p.monic() == q.monic() || p.reflect().monic() == q.monic()
}

struct FactorInfo {
    poly: RatPoly,
    mult: u32,
    max_mod: BallReal,
    root_moduli: Vec<BallReal>,
    exact_sq: Option<BigRat>,
}

fn analyse_at(factors: &[(RatPoly, u32)], prec: u32) -> Result<Option<SpectralData>> {
    let mut infos = Vec::new();
    for (f, m) in factors {
        let roots = root_enclosures(f, prec)?;
        let moduli: Vec<BallReal> = roots.iter().map(|r| r.modulus(prec)).collect();
        let mut max_mod = moduli[0].clone();
        for x in &moduli[1..] {
            max_mod = max_mod.max(x);
        }
        let exact_sq = exact_max_modulus_sq(f);
        if let Some(sq) = &exact_sq {
            max_mod = BallReal::exact(sq.clone(), prec).sqrt();
        }
        infos.push(FactorInfo {
            poly: f.clone(),
            mult: *m,
            max_mod,
            root_moduli: moduli,
            exact_sq,
        });
    }
    let top_lower = infos
        .iter()
        .map(|i| i.max_mod.lower())
        .max()
        .expect("nonempty factor list");
    let mut cands: Vec<usize> = (0..infos.len())
        .filter(|&i| infos[i].max_mod.upper() >= top_lower)
        .collect();
    // exact comparisons where squared moduli are rational
    if cands.iter().all(|&i| infos[i].exact_sq.is_some()) {
        let best = cands
            .iter()
            .map(|&i| infos[i].exact_sq.clone().unwrap())
            .max()
            .unwrap();
        cands.retain(|&i| infos[i].exact_sq.as_ref() == Some(&best));
    } else if cands.len() > 1 {
        // group by reflection class; exact values resolve within the group
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &i in &cands {
            match classes
                .iter_mut()
                .find(|c| reflection_equivalent(&infos[c[0]].poly, &infos[i].poly))
            {
                Some(c) => c.push(i),
                None => classes.push(vec![i]),
            }
        }
        if classes.len() > 1 {
            // distinct classes with overlapping enclosures: need more bits
            return Ok(None);
        }
    }

    // certification: a competitor excluded only by a thin margin
    let mut cert = Certification::Exact;
    let rho_ball = {
        let mut best = infos[cands[0]].max_mod.clone();
        for &i in &cands[1..] {
            if infos[i].max_mod.rad() < best.rad() {
                best = infos[i].max_mod.clone();
            }
        }
        best
    };
    let rho_lo = rho_ball.lower();
    let rho_exact = cands.iter().any(|&i| infos[i].exact_sq.is_some());
    for (i, info) in infos.iter().enumerate() {
        if cands.contains(&i) {
            continue;
        }
        if info.exact_sq.is_some() && rho_exact {
            continue;
        }
        let gap = &rho_lo - info.max_mod.upper();
        let scale = rho_ball.mid().abs() + BigRat::one();
        if gap < scale / BigRat::from_integer(num_bigint::BigInt::one() << 20usize) {
            cert = Certification::NumericCertified;
        }
    }

    let rho_squared = cands.iter().find_map(|&i| infos[i].exact_sq.clone());
    let rho = match &rho_squared {
        Some(sq) => BallReal::exact(sq.clone(), prec).sqrt(),
        None => rho_ball,
    };
    let mut dominant = Vec::new();
    for &i in &cands {
        let info = &infos[i];
        let dominance = dominance_of(&info.poly, &info.root_moduli, &rho);
        let fc = match dominance {
            Dominance::FullNumeric => Certification::NumericCertified,
            _ => cert,
        };
        dominant.push(DominantFactor {
            factor: info.poly.clone(),
            multiplicity: info.mult,
            certification: fc,
            dominance,
        });
    }
    let jordan_exponent = dominant.iter().map(|d| d.multiplicity).max().unwrap() - 1;
    Ok(Some(SpectralData {
        rho,
        jordan_exponent,
        dominant_factors: dominant,
        certification: cert,
        rho_squared,
        min_poly_factors: factors.to_vec(),
        precision_bits: prec,
    }))
}

/// Irreducible factorization of the minimal polynomial, optionally from
/// user-supplied irreducible factors (each listed once).
pub fn min_poly_factorization(
    m: &RatMatrix,
    hints: Option<&[RatPoly]>,
) -> Result<Vec<(RatPoly, u32)>> {
    let mp = m.min_poly();
    match hints {
        None => factor_rational(&mp, None),
        Some(h) => {
            let mut expanded = Vec::new();
            let mut rest = mp.clone();
            for f in h {
                let mut k = 0;
                while let Some(q) = rest.exact_div(f) {
                    if f.deg() == 0 {
                        break;
                    }
                    rest = q;
                    k += 1;
                    expanded.push(f.clone());
                }
                if k == 0 {
                    return Err(Error::BadHints(format!(
                        "hint {f} does not divide the minimal polynomial {mp}"
                    )));
                }
            }
            factor_rational(&mp, Some(&expanded))
        }
    }
}

/// Spectral data of a rational matrix, escalating precision from `prec` by
/// doubling up to [`MAX_PRECISION`].
pub fn spectral_data(m: &RatMatrix, prec: u32) -> Result<SpectralData> {
    spectral_data_with_hints(m, prec, None)
}

pub fn spectral_data_with_hints(
    m: &RatMatrix,
    prec: u32,
    hints: Option<&[RatPoly]>,
) -> Result<SpectralData> {
    let factors = min_poly_factorization(m, hints)?;
    let mut p = prec.max(32);
    loop {
        match analyse_at(&factors, p) {
            Ok(Some(sd)) => return Ok(sd),
            Ok(None) | Err(Error::PrecisionExhausted { .. }) => {}
            Err(e) => return Err(e),
        }
        if p >= MAX_PRECISION {
            return Err(Error::PrecisionExhausted {
                bits: p,
                reason: "modulus tie between distinct irreducible factors".into(),
            });
        }
        p = (p * 2).min(MAX_PRECISION);
    }
}

/// Spectral data of a matrix over `Z[omega]` through its rational embedding.
pub fn spectral_data_cm(m: &CMMatrix, prec: u32) -> Result<SpectralData> {
    spectral_data(&m.embed(), prec)
}

// ---------------------------------------------------------------------------
// Perron eigenvectors

/// A closed convex cone in `Q^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cone {
    /// Cone spanned by finitely many generators.
    Generators(Vec<RatVec>),
    /// Future light cone `{v : Q(v,v) >= 0, Q(v,h) >= 0}` of a form of
    /// signature `(1, n-1)`, with a reference vector `h` inside.
    Positive { form: RatMatrix, reference: RatVec },
}

impl Cone {
    pub fn positive_orthant(n: usize) -> Cone {
        Cone::Generators(
            (0..n)
                .map(|i| {
                    let mut v = vec![BigRat::zero(); n];
                    v[i] = BigRat::one();
                    v
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerronVector {
    pub vector: Vec<BallReal>,
    pub exact_vector: RatVec,
    pub eigenvalue: BallReal,
    pub residual: BallReal,
    pub iterations: usize,
}

/// Solves `sum lambda_i g_i = w` over independent subsets of the generators
/// and reports whether a non-negative solution exists.
fn in_generated_cone(gens: &[RatVec], w: &[BigRat]) -> bool {
    let n = w.len();
    if w.iter().all(|x| x.is_zero()) {
        return true;
    }
    let k = gens.len();
    let max = n.min(k);
    for size in 1..=max {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let rows: Vec<Vec<BigRat>> = (0..n)
                .map(|r| idx.iter().map(|&j| gens[j][r].clone()).collect())
                .collect();
            let mut check = rows.clone();
            let rank = super::matrix::rref(&mut check).len();
            if rank == size {
                if let Some(sol) = super::matrix::solve(&rows, w) {
                    if sol.iter().all(|x| !x.is_negative()) {
                        return true;
                    }
                }
            }
            // next combination
            let mut i = size;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if idx[i] < k - size + i {
                    idx[i] += 1;
                    for j in i + 1..size {
                        idx[j] = idx[j - 1] + 1;
                    }
                    i = usize::MAX;
                    break;
                }
            }
            if i != usize::MAX {
                break;
            }
        }
    }
    false
}

/// Number of positive and negative eigenvalues of a symmetric matrix, by
/// Descartes' rule on its (real-rooted) characteristic polynomial.
pub fn inertia(q: &RatMatrix) -> (usize, usize) {
    let cp = q.char_poly();
    let sign_changes = |p: &RatPoly| {
        let signs: Vec<bool> = p
            .coeffs()
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| c.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    (sign_changes(&cp), sign_changes(&cp.reflect()))
}

fn check_cone(m: &RatMatrix, cone: &Cone) -> Result<RatVec> {
    let n = m.dim();
    match cone {
        Cone::Generators(gens) => {
            if gens.is_empty() || gens.iter().any(|g| g.len() != n) {
                return Err(Error::ConeViolation("bad generator list".into()));
            }
            for g in gens {
                let img = m.mul_vec(g);
                if !in_generated_cone(gens, &img) {
                    return Err(Error::ConeViolation(format!(
                        "image of generator {g:?} leaves the cone"
                    )));
                }
            }
            let mut start = vec![BigRat::zero(); n];
            for g in gens {
                for (a, b) in start.iter_mut().zip(g) {
                    *a += b;
                }
            }
            Ok(start)
        }
        Cone::Positive { form, reference } => {
            if form.dim() != n || reference.len() != n || !form.is_symmetric() {
                return Err(Error::ConeViolation("bad quadratic form".into()));
            }
            let (pos, neg) = inertia(form);
            if pos != 1 || neg != n - 1 {
                return Err(Error::ConeViolation("form is not of signature (1, n-1)".into()));
            }
            if !dot(reference, &form.mul_vec(reference)).is_positive() {
                return Err(Error::ConeViolation("reference vector is not time-like".into()));
            }
            if m.transpose().mul(form).mul(m) != *form {
                return Err(Error::ConeViolation("matrix is not an isometry of the form".into()));
            }
            let img = m.mul_vec(reference);
            if !dot(&img, &form.mul_vec(reference)).is_positive() {
                return Err(Error::ConeViolation("matrix swaps the two light cones".into()));
            }
            Ok(reference.clone())
        }
    }
}

fn normalize_unit_sum(v: &[BigRat]) -> Option<RatVec> {
    let s = v.iter().fold(BigRat::zero(), |a, x| a + x);
    if s.is_zero() {
        return None;
    }
    Some(vec_scale(v, &(BigRat::one() / s)))
}

fn round_vec(v: &[BigRat], bits: u64) -> RatVec {
    v.iter()
        .map(|x| super::ball::round_dyadic(x, bits).0)
        .collect()
}

fn max_abs(v: &[BigRat]) -> BigRat {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigRat::zero)
}

pub const PERRON_BUDGET: usize = 20_000;

/// Dominant eigenvector of a cone-preserving matrix by power iteration on
/// rounded rational vectors.
pub fn perron_eigenvector(m: &RatMatrix, cone: &Cone, prec: u32) -> Result<PerronVector> {
    let start = check_cone(m, cone)?;
    let mut v = normalize_unit_sum(&start)
        .ok_or_else(|| Error::ConeViolation("cone start has zero coordinate sum".into()))?;
    let tol = BigRat::new(
        num_bigint::BigInt::one(),
        num_bigint::BigInt::one() << (prec as usize / 4 + 8),
    );
    let bits = prec as u64 + 24;
    for it in 1..=PERRON_BUDGET {
        let w = m.mul_vec(&v);
        let Some(next) = normalize_unit_sum(&w) else {
            return Err(Error::NoConvergence(it));
        };
        let next = round_vec(&next, bits);
        let step = max_abs(&vec_sub(&next, &v));
        v = next;
        if step < tol {
            let mv = m.mul_vec(&v);
            let lambda = mv.iter().fold(BigRat::zero(), |a, x| a + x);
            let res = max_abs(&vec_sub(&mv, &vec_scale(&v, &lambda)));
            let bound = BigRat::new(
                num_bigint::BigInt::one(),
                num_bigint::BigInt::one() << (prec as usize / 4),
            );
            if res > bound {
                continue;
            }
            return Ok(PerronVector {
                vector: v.iter().map(|x| BallReal::exact(x.clone(), prec)).collect(),
                exact_vector: v,
                eigenvalue: BallReal::exact(lambda, prec),
                residual: BallReal::exact(res, prec),
                iterations: it,
            });
        }
    }
    Err(Error::NoConvergence(PERRON_BUDGET))
}

// ---------------------------------------------------------------------------
// Growth oracle

/// Least-squares fit of `log ||M^n|| = c + n log rho + l log n` over
/// `3 <= n <= n_max`, with `||.||` the largest entry in absolute value.
/// Test oracle only.
pub fn growth_exponent_oracle(m: &RatMatrix, n_max: usize) -> (f64, f64) {
    assert!(n_max >= 8, "oracle needs at least 8 powers");
    let mut pts = Vec::new();
    let mut p = RatMatrix::identity(m.dim());
    for n in 1..=n_max {
        p = p.mul(m);
        let norm = p.max_abs();
        if n < 3 || norm.is_zero() {
            continue;
        }
        let l = ln_rat(&norm, 64).to_f64();
        pts.push((n as f64, (n as f64).ln(), l));
    }
    if pts.len() < 3 {
        return (f64::NEG_INFINITY, 0.0);
    }
    // normal equations for (c, a, b) in  y = c + a x + b lx
    let mut s = [[0.0f64; 3]; 3];
    let mut r = [0.0f64; 3];
    for &(x, lx, y) in &pts {
        let f = [1.0, x, lx];
        for i in 0..3 {
            for j in 0..3 {
                s[i][j] += f[i] * f[j];
            }
            r[i] += f[i] * y;
        }
    }
    let sol = solve3(s, r);
    (sol[1], sol[2])
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for c in 0..3 {
        let p = (c..3)
            .max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())
            .unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..3 {
            let f = a[r][c] / a[c][c];
            for k in c..3 {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 3];
    for c in (0..3).rev() {
        let mut s = b[c];
        for k in c + 1..3 {
            s -= a[c][k] * x[k];
        }
        x[c] = s / a[c][c];
    }
    x
}

/// Default-precision convenience wrapper.
pub fn spectral_default(m: &RatMatrix) -> Result<SpectralData> {
    spectral_data(m, DEFAULT_PRECISION)
}

/// Floating estimate of rho for diagnostics.
pub fn rho_f64(sd: &SpectralData) -> f64 {
    sd.rho.mid().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jordan_block_example() {
        let m = RatMatrix::from_ints(&[&[2, 3], &[0, 2]]);
        let sd = spectral_data(&m, 128).unwrap();
        assert!(sd.rho.contains(&rat_int(2)));
        assert!(sd.rho.is_exact());
        assert_eq!(sd.jordan_exponent, 1);
        assert_eq!(sd.certification, Certification::Exact);
        assert_eq!(sd.rho_squared, Some(rat_int(4)));
    }

    #[test]
    fn diagonal_and_fibonacci() {
        let d = RatMatrix::diag(&[rat_int(3), rat_int(2)]);
        let sd = spectral_data(&d, 128).unwrap();
        assert!(sd.rho.contains(&rat_int(3)));
        assert_eq!(sd.jordan_exponent, 0);
        let f = RatMatrix::from_ints(&[&[0, 1], &[1, 1]]);
        let sd = spectral_data(&f, 128).unwrap();
        assert!((sd.rho.to_f64() - 1.618033988749895).abs() < 1e-15);
        assert_eq!(sd.jordan_exponent, 0);
        assert_eq!(sd.dominant_factors[0].dominance, Dominance::Mixed);
        assert!(sd.rho.rad_f64() < sd.rho.to_f64() * 2f64.powi(-20));
    }

    #[test]
    fn reflected_factors_tie() {
        // t^2 - t - 1 and t^2 + t - 1 share root moduli
        let a = RatMatrix::from_ints(&[&[0, 1], &[1, 1]]);
        let b = RatMatrix::from_ints(&[&[0, 1], &[1, -1]]);
        let sd = spectral_data(&RatMatrix::block_diag(&a, &b), 128).unwrap();
        assert_eq!(sd.dominant_factors.len(), 2);
        assert_eq!(sd.jordan_exponent, 0);
    }

    #[test]
    fn rotation_and_jordan_mix() {
        // diag(J_2(2), rotation by 2i) : tie between t-2 and t^2+4, exact
        let j = RatMatrix::from_ints(&[&[2, 1], &[0, 2]]);
        let r = RatMatrix::from_ints(&[&[0, -2], &[2, 0]]);
        let sd = spectral_data(&RatMatrix::block_diag(&j, &r), 128).unwrap();
        assert_eq!(sd.dominant_factors.len(), 2);
        assert_eq!(sd.jordan_exponent, 1);
        assert_eq!(sd.certification, Certification::Exact);
    }

    #[test]
    fn perron_examples() {
        let m = RatMatrix::from_ints(&[&[2, 1], &[1, 1]]);
        let pv = perron_eigenvector(&m, &Cone::positive_orthant(2), 128).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let ratio = pv.vector[0].to_f64() / pv.vector[1].to_f64();
        assert!((ratio - phi).abs() < 1e-12);
        assert!((pv.eigenvalue.to_f64() - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        let id = RatMatrix::identity(2);
        let pv = perron_eigenvector(&id, &Cone::positive_orthant(2), 128).unwrap();
        assert!(pv.residual.mid().is_zero());
    }

    #[test]
    fn perron_rejects_non_invariant_cone() {
        let m = RatMatrix::from_ints(&[&[1, -1], &[0, 1]]);
        assert!(matches!(
            perron_eigenvector(&m, &Cone::positive_orthant(2), 64),
            Err(Error::ConeViolation(_))
        ));
    }

    #[test]
    fn whole_plane_generators_have_no_start() {
        let m = RatMatrix::from_ints(&[&[0, -1], &[1, 0]]);
        let gens = vec![
            vec![rat_int(1), rat_int(0)],
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(-1), rat_int(0)],
            vec![rat_int(0), rat_int(-1)],
        ];
        let r = perron_eigenvector(&m, &Cone::Generators(gens), 64);
        assert!(r.is_err());
    }

    #[test]
    fn oracle_examples() {
        let (lr, l) = growth_exponent_oracle(&RatMatrix::from_ints(&[&[2, 1], &[0, 2]]), 30);
        assert!((lr - 2f64.ln()).abs() < 0.01 && (l - 1.0).abs() < 0.15);
        let (lr, l) = growth_exponent_oracle(&RatMatrix::identity(3), 10);
        assert!(lr.abs() < 1e-9 && l.abs() < 1e-9);
        let (lr, l) = growth_exponent_oracle(&RatMatrix::diag(&[rat_int(3), rat_int(2)]), 30);
        assert!((lr - 3f64.ln()).abs() < 0.01 && l.abs() < 0.15);
    }
}
