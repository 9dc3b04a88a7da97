//! Certified complex root enclosures.
//!
//! Approximations come from Aberth iteration (first in `f64`, then in
//! fixed-point Gaussian integers at the working precision). Certification is
//! exact: with Weierstrass corrections `W_i = p(z_i) / (lc * prod_{j!=i} (z_i - z_j))`
//! every root lies in the union of the disks `D(z_i, n |W_i|)`, and a
//! connected component made of `k` disks holds exactly `k` roots. Pairwise
//! disjoint disks therefore isolate one root each. All quantities in the
//! test are evaluated as exact Gaussian integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ball::{round_dyadic, BallReal, BigRat};
use super::factor::rational_roots;
use super::poly::RatPoly;
use crate::error::{Error, Result};

/// Closed complex disk with a rational center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBall {
    pub re: BigRat,
    pub im: BigRat,
    pub rad: BigRat,
}

impl ComplexBall {
    pub fn exact_real(x: BigRat) -> Self {
        ComplexBall {
            re: x,
            im: BigRat::zero(),
            rad: BigRat::zero(),
        }
    }

    /// Enclosure of `|z|` for every `z` in the disk.
    pub fn modulus(&self, prec: u32) -> BallReal {
        let sq = &self.re * &self.re + &self.im * &self.im;
        let m = BallReal::exact(sq, prec).sqrt();
        m.inflate(&self.rad)
    }

    /// Enclosure of `|z|^2`.
    pub fn modulus_sq(&self, prec: u32) -> BallReal {
        self.modulus(prec).square()
    }

    pub fn contains(&self, re: &BigRat, im: &BigRat) -> bool {
        let dr = &self.re - re;
        let di = &self.im - im;
        dr.clone() * dr + di.clone() * di <= &self.rad * &self.rad
    }

    pub fn disjoint(&self, other: &ComplexBall) -> bool {
        let dr = &self.re - &other.re;
        let di = &self.im - &other.im;
        let s = &self.rad + &other.rad;
        dr.clone() * dr + di.clone() * di > &s * &s
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

// ---------------------------------------------------------------------------
// f64 Aberth

type C64 = (f64, f64);

fn cmul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: C64, b: C64) -> C64 {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

fn aberth_f64(coeffs: &[f64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let lc = coeffs[n];
    let c: Vec<f64> = coeffs.iter().map(|x| x / lc).collect();
    let bound = 1.0 + c[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let r = if bound.is_finite() { bound.min(1e150) * 0.5 } else { 1.0 };
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            (r * a.cos(), r * a.sin())
        })
        .collect();
    for _ in 0..500 {
        let mut maxc = 0.0f64;
        for i in 0..n {
            let (mut pv, mut dv) = ((0.0, 0.0), (0.0, 0.0));
            for k in (0..=n).rev() {
                dv = cmul(dv, z[i]);
                dv = (dv.0 + pv.0, dv.1 + pv.1);
                pv = cmul(pv, z[i]);
                pv.0 += c[k];
            }
            if dv == (0.0, 0.0) {
                continue;
            }
            let nw = cdiv(pv, dv);
            let mut s = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = (z[i].0 - z[j].0, z[i].1 - z[j].1);
                    if d != (0.0, 0.0) {
                        let t = cdiv((1.0, 0.0), d);
                        s = (s.0 + t.0, s.1 + t.1);
                    }
                }
            }
            let ns = cmul(nw, s);
            let corr = cdiv(nw, (1.0 - ns.0, -ns.1));
            if corr.0.is_finite() && corr.1.is_finite() {
                z[i] = (z[i].0 - corr.0, z[i].1 - corr.1);
                let mag = (corr.0.hypot(corr.1)) / (1.0 + z[i].0.hypot(z[i].1));
                maxc = maxc.max(mag);
            }
        }
        if maxc < 1e-15 {
            break;
        }
    }
    z
}

// ---------------------------------------------------------------------------
// Fixed-point Gaussian integers: value = (re + i im) / 2^w

#[derive(Clone, Debug, PartialEq, Eq)]
struct Cfx {
    re: BigInt,
    im: BigInt,
}

impl Cfx {
    fn zero() -> Self {
        Cfx {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }
    fn add(&self, o: &Cfx) -> Cfx {
        Cfx {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
    fn sub(&self, o: &Cfx) -> Cfx {
        Cfx {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
    fn mul(&self, o: &Cfx, w: usize) -> Cfx {
        Cfx {
            re: (&self.re * &o.re - &self.im * &o.im) >> w,
            im: (&self.re * &o.im + &self.im * &o.re) >> w,
        }
    }
    fn div(&self, o: &Cfx, w: usize) -> Option<Cfx> {
        let d = &o.re * &o.re + &o.im * &o.im;
        if d.is_zero() {
            return None;
        }
        Some(Cfx {
            re: ((&self.re * &o.re + &self.im * &o.im) << w) / &d,
            im: ((&self.im * &o.re - &self.re * &o.im) << w) / &d,
        })
    }
    fn max_abs_bits(&self) -> u64 {
        self.re.bits().max(self.im.bits())
    }
}

fn f64_to_fixed(x: f64, w: usize) -> BigInt {
    match BigRational::from_float(x) {
        Some(q) => (q * BigRat::from_integer(BigInt::one() << w)).floor().to_integer(),
        None => BigInt::zero(),
    }
}

fn rat_to_fixed(q: &BigRat, w: usize) -> BigInt {
    (q * BigRat::from_integer(BigInt::one() << w))
        .floor()
        .to_integer()
}

/// Aberth refinement at `w` fractional bits for a monic polynomial with
/// fixed-point coefficients `c`.
fn aberth_fixed(c: &[BigInt], z: &mut [Cfx], w: usize) {
    let n = z.len();
    let one = Cfx {
        re: BigInt::one() << w,
        im: BigInt::zero(),
    };
    for _ in 0..200 {
        let mut max_bits = 0u64;
        for i in 0..n {
            let mut pv = Cfx::zero();
            let mut dv = Cfx::zero();
            for k in (0..=n).rev() {
                dv = dv.mul(&z[i], w).add(&pv);
                pv = pv.mul(&z[i], w);
                pv.re += &c[k];
            }
            let Some(nw) = pv.div(&dv, w) else {
                // perturb away from a critical point
                z[i].re += BigInt::one() << (w / 2);
                max_bits = u64::MAX;
                continue;
            };
            let mut s = Cfx::zero();
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d = z[i].sub(&z[j]);
                match one.div(&d, w) {
                    Some(t) => s = s.add(&t),
                    None => {
                        z[i].im += BigInt::one() << (w / 2);
                        max_bits = u64::MAX;
                    }
                }
            }
            let denom = one.sub(&nw.mul(&s, w));
            let corr = nw.div(&denom, w).unwrap_or(nw);
            max_bits = max_bits.max(corr.max_abs_bits());
            z[i] = z[i].sub(&corr);
        }
        if max_bits <= 8 {
            break;
        }
    }
}

/// Weierstrass inclusion radii for centers `z_i / 2^w` of the primitive
/// integer polynomial `coeffs`. `None` marks an exact root.
fn inclusion_radii(coeffs: &[BigInt], z: &[Cfx], w: usize) -> Vec<BigRat> {
    let n = z.len();
    let lc = coeffs.last().unwrap().abs();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // P = 2^{wn} p(z_i), evaluated by Horner on Gaussian integers
        let (mut pr, mut pi) = (BigInt::zero(), BigInt::zero());
        let scale = BigInt::one() << w;
        let mut sk = BigInt::one();
        for k in (0..=n).rev() {
            let nr = &pr * &z[i].re - &pi * &z[i].im;
            let ni = &pr * &z[i].im + &pi * &z[i].re;
            pr = nr + &coeffs[k] * &sk;
            pi = ni;
            sk *= &scale;
        }
        let p2 = &pr * &pr + &pi * &pi;
        if p2.is_zero() {
            out.push(BigRat::zero());
            continue;
        }
        let (mut qr, mut qi) = (BigInt::one(), BigInt::zero());
        for j in 0..n {
            if j == i {
                continue;
            }
            let dr = &z[i].re - &z[j].re;
            let di = &z[i].im - &z[j].im;
            let nr = &qr * &dr - &qi * &di;
            let ni = &qr * &di + &qi * &dr;
            qr = nr;
            qi = ni;
        }
        let q2 = &qr * &qr + &qi * &qi;
        if q2.is_zero() {
            out.push(BigRat::from_integer(BigInt::one() << 64));
            continue;
        }
        let num = (p2.sqrt() + 1) * BigInt::from(n);
        let den = q2.sqrt() * &lc * (BigInt::one() << w);
        if den.is_zero() {
            out.push(BigRat::from_integer(BigInt::one() << 64));
            continue;
        }
        let r = BigRat::new(num, den);
        // round up to a short dyadic
        let (m, err) = round_dyadic(&r, 48);
        out.push(m + err);
    }
    out
}

fn try_enclose(p: &RatPoly, starts: &[C64], w: usize) -> Option<Vec<ComplexBall>> {
    let n = p.deg();
    let (_, prim) = p.primitive_part();
    let lc = prim.last().unwrap().clone();
    let monic: Vec<BigInt> = prim
        .iter()
        .map(|c| rat_to_fixed(&BigRat::new(c.clone(), lc.clone()), w))
        .collect();
    let mut z: Vec<Cfx> = starts
        .iter()
        .map(|&(a, b)| Cfx {
            re: f64_to_fixed(a, w),
            im: f64_to_fixed(b, w),
        })
        .collect();
    aberth_fixed(&monic, &mut z, w);
    let radii = inclusion_radii(&prim, &z, w);
    let scale = BigInt::one() << w;
    let balls: Vec<ComplexBall> = z
        .iter()
        .zip(radii)
        .map(|(c, r)| ComplexBall {
            re: BigRat::new(c.re.clone(), scale.clone()),
            im: BigRat::new(c.im.clone(), scale.clone()),
            rad: r,
        })
        .collect();
    for i in 0..n {
        for j in 0..i {
            if !balls[i].disjoint(&balls[j]) {
                return None;
            }
        }
    }
    Some(balls)
}

fn radius_ok(b: &ComplexBall, prec: u32) -> bool {
    let mag = b.re.abs() + b.im.abs();
    let bound = (BigRat::one() + mag) / BigRat::from_integer(BigInt::one() << (prec as usize / 2));
    b.rad <= bound
}

/// One certified disk per root of the squarefree polynomial `p`, with
/// radius at most `2^(-prec/2) (1 + |center|)`. Rational roots are returned
/// exactly with radius zero.
pub fn root_enclosures(p: &RatPoly, prec: u32) -> Result<Vec<ComplexBall>> {
    if p.is_zero() {
        return Err(Error::Invalid("root enclosures of the zero polynomial".into()));
    }
    if p.deg() == 0 {
        return Ok(vec![]);
    }
    if p.gcd(&p.derivative()).deg() > 0 {
        return Err(Error::Invalid(format!("polynomial {p} is not squarefree")));
    }
    let mut out = Vec::new();
    let mut rest = p.monic();
    for r in rational_roots(p) {
        rest = rest.exact_div(&RatPoly::linear_root(&r)).unwrap();
        out.push(ComplexBall::exact_real(r));
    }
    if rest.deg() > 0 {
        let coeffs: Vec<f64> = rest
            .coeffs()
            .iter()
            .map(|c| c.to_f64().unwrap_or(0.0))
            .collect();
        let starts = aberth_f64(&coeffs);
        let mut found = None;
        for w in [prec as usize + 32, 2 * prec as usize + 64] {
            if let Some(b) = try_enclose(&rest, &starts, w) {
                if b.iter().all(|x| radius_ok(x, prec)) {
                    found = Some(b);
                    break;
                }
            }
        }
        match found {
            Some(b) => out.extend(b),
            None => {
                return Err(Error::PrecisionExhausted {
                    bits: prec,
                    reason: format!("roots of {rest} not separated"),
                })
            }
        }
    }
    // sanity: every exact root must be disjoint from the numeric disks
    for i in 0..out.len() {
        for j in 0..i {
            if !out[i].disjoint(&out[j]) {
                return Err(Error::PrecisionExhausted {
                    bits: prec,
                    reason: "root disks overlap".into(),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::ball::{rat, rat_int};

    #[test]
    fn golden_ratio_roots() {
        let p = RatPoly::from_ints(&[-1, -1, 1]);
        let r = root_enclosures(&p, 128).unwrap();
        assert_eq!(r.len(), 2);
        let mut re: Vec<f64> = r.iter().map(|b| b.to_f64().0).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 0.6180339887498949).abs() < 1e-15);
        assert!((re[1] - 1.618033988749895).abs() < 1e-15);
        for b in &r {
            assert!(b.rad <= rat(1, 1 << 62));
        }
    }

    #[test]
    fn gaussian_roots() {
        let r = root_enclosures(&RatPoly::from_ints(&[1, 0, 1]), 128).unwrap();
        let mut im: Vec<f64> = r.iter().map(|b| b.to_f64().1).collect();
        im.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((im[0] + 1.0).abs() < 1e-15 && (im[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_rational_root() {
        let r = root_enclosures(&RatPoly::from_ints(&[-2, 1]), 128).unwrap();
        assert_eq!(r, vec![ComplexBall::exact_real(rat_int(2))]);
    }

    #[test]
    fn rejects_repeated_roots() {
        assert!(root_enclosures(&RatPoly::from_ints(&[1, -2, 1]), 64).is_err());
    }

    #[test]
    fn clustered_roots_need_more_bits() {
        // roots 1 +- 2^-40 i  :  t^2 - 2t + 1 + 2^-80
        let eps = BigRat::new(BigInt::one(), BigInt::one() << 80usize);
        let p = RatPoly::new(vec![BigRat::one() + eps, rat_int(-2), rat_int(1)]);
        let r = root_enclosures(&p, 256).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].disjoint(&r[1]));
    }
}
