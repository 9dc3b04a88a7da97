//! Factorization of rational polynomials: squarefree splitting, modular
//! factorization (Cantor-Zassenhaus), Hensel lifting and recombination.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ball::BigRat;
use super::poly::{squarefree_decomposition, RatPoly};
use crate::error::{Error, Result};

pub const MAX_UNHINTED_DEGREE: usize = 12;

const SMALL_PRIMES: [u64; 60] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283,
];

// ---------------------------------------------------------------------------
// Polynomials over F_p, ascending coefficients, no trailing zeros.

type Fp = Vec<u64>;

fn fp_trim(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_inv(a: u64, p: u64) -> u64 {
    fp_pow_scalar(a % p, p - 2, p)
}

fn fp_pow_scalar(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn fp_from_int(f: &[BigInt], p: u64) -> Fp {
    let pb = BigInt::from(p);
    fp_trim(
        f.iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect(),
    )
}

fn fp_sub(a: &Fp, b: &Fp, p: u64) -> Fp {
    let n = a.len().max(b.len());
    fp_trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn fp_mul(a: &Fp, b: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(out)
}

fn fp_divrem(a: &Fp, b: &Fp, p: u64) -> (Fp, Fp) {
    assert!(!b.is_empty());
    if a.len() < b.len() {
        return (vec![], a.clone());
    }
    let db = b.len() - 1;
    let inv = fp_inv(*b.last().unwrap(), p);
    let mut r = a.clone();
    let mut q = vec![0u64; a.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db] * inv % p;
        q[k] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[k + j] = (r[k + j] + p - c * bj % p) % p;
            }
        }
    }
    r.truncate(db);
    (fp_trim(q), fp_trim(r))
}

fn fp_rem(a: &Fp, b: &Fp, p: u64) -> Fp {
    fp_divrem(a, b, p).1
}

fn fp_monic(a: &Fp, p: u64) -> Fp {
    match a.last() {
        None => vec![],
        Some(&lc) => {
            let inv = fp_inv(lc, p);
            a.iter().map(|&x| x * inv % p).collect()
        }
    }
}

fn fp_gcd(a: &Fp, b: &Fp, p: u64) -> Fp {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    fp_monic(&a, p)
}

fn fp_deriv(a: &Fp, p: u64) -> Fp {
    fp_trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (i as u64 % p) * c % p)
            .collect(),
    )
}

fn fp_powmod(base: &Fp, e: &BigUint, m: &Fp, p: u64) -> Fp {
    let mut acc: Fp = vec![1];
    let b = fp_rem(base, m, p);
    for i in (0..e.bits()).rev() {
        acc = fp_rem(&fp_mul(&acc, &acc, p), m, p);
        if e.bit(i) {
            acc = fp_rem(&fp_mul(&acc, &b, p), m, p);
        }
    }
    acc
}

fn fp_deg(a: &Fp) -> usize {
    a.len().saturating_sub(1)
}

/// Distinct-degree factorization of a monic squarefree polynomial.
fn fp_ddf(f: &Fp, p: u64) -> Vec<(Fp, usize)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let x: Fp = vec![0, 1];
    let mut h = x.clone();
    let mut i = 0;
    let pe = BigUint::from(p);
    while fp_deg(&f) >= 2 * (i + 1) {
        i += 1;
        h = fp_powmod(&h, &pe, &f, p);
        let g = fp_gcd(&fp_sub(&h, &x, p), &f, p);
        if fp_deg(&g) > 0 {
            f = fp_divrem(&f, &g, p).0;
            h = fp_rem(&h, &f, p);
            out.push((g, i));
        }
    }
    if fp_deg(&f) > 0 {
        let d = fp_deg(&f);
        out.push((fp_monic(&f, p), d));
    }
    out
}

/// Equal-degree splitting of a product of irreducibles of degree `d`.
fn fp_edf(g: &Fp, d: usize, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<Fp>) {
    let n = fp_deg(g);
    if n == d {
        out.push(g.clone());
        return;
    }
    let e = (BigUint::from(p).pow(d as u32) - 1u32) >> 1;
    loop {
        let a: Fp = fp_trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if fp_deg(&a) == 0 {
            continue;
        }
        let b = fp_sub(&fp_powmod(&a, &e, g, p), &vec![1], p);
        let h = fp_gcd(&b, g, p);
        let dh = fp_deg(&h);
        if dh > 0 && dh < n {
            let q = fp_monic(&fp_divrem(g, &h, p).0, p);
            fp_edf(&h, d, p, rng, out);
            fp_edf(&q, d, p, rng, out);
            return;
        }
    }
}

fn fp_factor(f: &Fp, p: u64, rng: &mut ChaCha8Rng) -> Vec<Fp> {
    let mut out = Vec::new();
    for (g, d) in fp_ddf(f, p) {
        fp_edf(&g, d, p, rng, &mut out);
    }
    out
}

// ---------------------------------------------------------------------------
// Integer polynomials.

type Zx = Vec<BigInt>;

fn z_trim(mut a: Zx) -> Zx {
    while a.last().map_or(false, |c| c.is_zero()) {
        a.pop();
    }
    a
}

fn z_mul(a: &Zx, b: &Zx) -> Zx {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    z_trim(out)
}

fn z_mod(a: &Zx, m: &BigInt) -> Zx {
    z_trim(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn z_sub(a: &Zx, b: &Zx) -> Zx {
    let n = a.len().max(b.len());
    z_trim(
        (0..n)
            .map(|i| {
                a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default()
            })
            .collect(),
    )
}

fn z_add(a: &Zx, b: &Zx) -> Zx {
    let n = a.len().max(b.len());
    z_trim(
        (0..n)
            .map(|i| {
                a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default()
            })
            .collect(),
    )
}

fn z_scale(a: &Zx, c: &BigInt) -> Zx {
    z_trim(a.iter().map(|x| x * c).collect())
}

/// Exact division over Z; `None` if `b` does not divide `a`.
fn z_exact_div(a: &Zx, b: &Zx) -> Option<Zx> {
    if b.is_empty() {
        return None;
    }
    if a.is_empty() {
        return Some(vec![]);
    }
    if a.len() < b.len() {
        return None;
    }
    let db = b.len() - 1;
    let lc = b.last().unwrap();
    let mut r = a.clone();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for k in (0..q.len()).rev() {
        let (c, rem) = r[k + db].div_rem(lc);
        if !rem.is_zero() {
            return None;
        }
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[k + j] -= &c * bj;
            }
        }
        q[k] = c;
    }
    if r.iter().all(|x| x.is_zero()) {
        Some(z_trim(q))
    } else {
        None
    }
}

fn z_content(a: &Zx) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn z_primitive(a: &Zx) -> Zx {
    let mut g = z_content(a);
    if g.is_zero() {
        return a.clone();
    }
    if a.last().unwrap().is_negative() {
        g = -g;
    }
    a.iter().map(|c| c / &g).collect()
}

fn fp_to_z(a: &Fp) -> Zx {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// Quotient and remainder of `a` by monic `b` modulo `m`.
fn zm_divrem_monic(a: &Zx, b: &Zx, m: &BigInt) -> (Zx, Zx) {
    let db = b.len() - 1;
    if a.len() <= db {
        return (vec![], z_mod(a, m));
    }
    let mut r: Zx = a.iter().map(|c| c.mod_floor(m)).collect();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db].mod_floor(m);
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[k + j] = (&r[k + j] - &c * bj).mod_floor(m);
            }
        }
        q[k] = c;
    }
    r.truncate(db);
    (z_trim(q), z_mod(&r, m))
}

/// Lifts `f = g*h (mod p)` (all monic mod p, `f` monic mod `p^k` target) to
/// a factorization modulo `p^k`.
fn hensel_pair(f: &Zx, g: &Fp, h: &Fp, p: u64, k: u32) -> (Zx, Zx) {
    // s*g + t*h = 1 mod p
    let (s, t) = fp_xgcd_unit(g, h, p);
    let pb = BigInt::from(p);
    let (s, t) = (fp_to_z(&s), fp_to_z(&t));
    let mut gz = fp_to_z(g);
    let mut hz = fp_to_z(h);
    let mut pj = pb.clone();
    for _ in 1..k {
        let next = &pj * &pb;
        let diff = z_mod(&z_sub(f, &z_mul(&gz, &hz)), &next);
        let e: Zx = z_trim(diff.iter().map(|c| c / &pj).collect());
        let e = z_mod(&e, &pb);
        // dh = e*s mod h, dg = e*t + q*g
        let es = z_mod(&z_mul(&e, &s), &pb);
        let (q, dh) = zm_divrem_monic(&es, &hz, &pb);
        let dg = z_mod(&z_add(&z_mul(&e, &t), &z_mul(&q, &gz)), &pb);
        gz = z_mod(&z_add(&gz, &z_scale(&dg, &pj)), &next);
        hz = z_mod(&z_add(&hz, &z_scale(&dh, &pj)), &next);
        pj = next;
    }
    (gz, hz)
}

fn fp_xgcd_unit(a: &Fp, b: &Fp, p: u64) -> (Fp, Fp) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1): (Fp, Fp) = (vec![1], vec![]);
    let (mut t0, mut t1): (Fp, Fp) = (vec![], vec![1]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    assert_eq!(r0.len(), 1, "factors not coprime mod p");
    let inv = fp_inv(r0[0], p);
    (
        s0.iter().map(|&x| x * inv % p).collect(),
        t0.iter().map(|&x| x * inv % p).collect(),
    )
}

/// Lifts all modular factors of the monic-mod-`p^k` polynomial `f`.
fn hensel_multi(f: &Zx, factors: &[Fp], p: u64, k: u32) -> Vec<Zx> {
    if factors.len() == 1 {
        let m = BigInt::from(p).pow(k);
        return vec![z_mod(f, &m)];
    }
    let g = &factors[0];
    let h = factors[1..]
        .iter()
        .fold(vec![1u64], |acc, x| fp_mul(&acc, x, p));
    let (gz, hz) = hensel_pair(f, g, &h, p, k);
    let mut out = vec![gz];
    out.extend(hensel_multi(&hz, &factors[1..], p, k));
    out
}

fn symmetric(a: &Zx, m: &BigInt) -> Zx {
    let half = m >> 1;
    z_trim(
        a.iter()
            .map(|c| {
                let c = c.mod_floor(m);
                if c > half {
                    c - m
                } else {
                    c
                }
            })
            .collect(),
    )
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn good_prime(f: &Zx, p: u64) -> Option<Fp> {
    let lc = f.last().unwrap();
    if (lc % BigInt::from(p)).is_zero() {
        return None;
    }
    let fp = fp_monic(&fp_from_int(f, p), p);
    let g = fp_gcd(&fp, &fp_deriv(&fp, p), p);
    (fp_deg(&g) == 0).then_some(fp)
}

/// Irreducible factors over Z of a primitive squarefree polynomial with
/// positive leading coefficient.
fn zassenhaus(f: &Zx) -> Vec<Zx> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.clone()];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
    let mut best: Option<(u64, Vec<Fp>)> = None;
    let mut tried = 0;
    for &p in SMALL_PRIMES.iter() {
        let Some(fp) = good_prime(f, p) else { continue };
        let facs = fp_factor(&fp, p, &mut rng);
        if facs.len() == 1 {
            return vec![f.clone()];
        }
        if best.as_ref().map_or(true, |(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        tried += 1;
        if tried >= 5 {
            break;
        }
    }
    let (p, facs) = best.expect("a good prime exists below 300 for small degree");
    // coefficient bound for any factor times lc
    let lc = f.last().unwrap().clone();
    let norm2: BigInt = f.iter().map(|c| c * c).sum();
    let bound = (norm2.sqrt() + 1u32) * (BigInt::one() << n) * lc.abs() * 2u32;
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut pk = pb.clone();
    while pk <= bound {
        k += 1;
        pk *= &pb;
    }
    let lc_inv = lc
        .extended_gcd(&pk)
        .x
        .mod_floor(&pk);
    let f_monic = z_mod(&z_scale(f, &lc_inv), &pk);
    let mut lifted = hensel_multi(&f_monic, &facs, p, k);

    let mut result = Vec::new();
    let mut rest = f.clone();
    let mut s = 1;
    while 2 * s <= lifted.len() {
        let mut found = false;
        let lcr = rest.last().unwrap().clone();
        for combo in combinations(lifted.len(), s) {
            let prod = combo
                .iter()
                .fold(vec![lcr.clone()], |acc, &i| z_mod(&z_mul(&acc, &lifted[i]), &pk));
            let cand = z_primitive(&symmetric(&prod, &pk));
            if let Some(q) = z_exact_div(&rest, &cand) {
                result.push(cand);
                rest = q;
                let mut keep = Vec::new();
                for (i, g) in lifted.into_iter().enumerate() {
                    if !combo.contains(&i) {
                        keep.push(g);
                    }
                }
                lifted = keep;
                found = true;
                break;
            }
        }
        if !found {
            s += 1;
        }
    }
    result.push(z_primitive(&rest));
    result
}

fn to_monic_rat(f: &Zx) -> RatPoly {
    RatPoly::from_bigints(f).monic()
}

fn sort_factors(v: &mut [(RatPoly, u32)]) {
    v.sort_by(|a, b| {
        a.0.deg()
            .cmp(&b.0.deg())
            .then_with(|| a.0.coeffs().cmp(b.0.coeffs()))
            .then(a.1.cmp(&b.1))
    });
}

fn factor_squarefree(q: &RatPoly) -> Vec<RatPoly> {
    let (_, prim) = q.primitive_part();
    zassenhaus(&prim).iter().map(to_monic_rat).collect()
}

/// Certifies irreducibility of a squarefree integer polynomial from the
/// degree patterns of its reductions modulo small primes: a factor of
/// degree `k` over Q must show up as a subset of the modular degrees for
/// every good prime.
fn modular_irreducibility_certificate(f: &Zx) -> bool {
    let n = f.len() - 1;
    let mut possible = vec![true; n + 1];
    for &p in SMALL_PRIMES.iter() {
        let Some(fp) = good_prime(f, p) else { continue };
        let mut sums = vec![false; n + 1];
        sums[0] = true;
        for (g, d) in fp_ddf(&fp, p) {
            let count = fp_deg(&g) / d;
            for _ in 0..count {
                for s in (d..=n).rev() {
                    if sums[s - d] {
                        sums[s] = true;
                    }
                }
            }
        }
        for k in 0..=n {
            possible[k] &= sums[k];
        }
        if (1..n).all(|k| !possible[k]) {
            return true;
        }
    }
    false
}

/// Whether `q` is irreducible over Q, for use on factorization hints.
fn certify_irreducible(q: &RatPoly) -> Result<bool> {
    let d = q.deg();
    if d == 0 {
        return Ok(false);
    }
    if d == 1 {
        return Ok(true);
    }
    let sq = squarefree_decomposition(q);
    if sq.len() != 1 || sq[0].1 != 1 {
        return Ok(false);
    }
    if d <= MAX_UNHINTED_DEGREE {
        return Ok(factor_squarefree(q).len() == 1);
    }
    let (_, prim) = q.primitive_part();
    if modular_irreducibility_certificate(&prim) {
        Ok(true)
    } else {
        Err(Error::BadHints(format!(
            "could not certify irreducibility of hint {q}"
        )))
    }
}

/// Full factorization over Q into monic irreducibles with multiplicities.
///
/// Without hints the degree is limited to [`MAX_UNHINTED_DEGREE`]. With hints,
/// the hints (repeated according to multiplicity) must multiply to `p` up to
/// a constant, and each must be irreducible.
pub fn factor_rational(p: &RatPoly, hints: Option<&[RatPoly]>) -> Result<Vec<(RatPoly, u32)>> {
    if p.is_zero() {
        return Err(Error::Invalid("cannot factor the zero polynomial".into()));
    }
    if let Some(hints) = hints {
        return factor_with_hints(p, hints);
    }
    if p.deg() > MAX_UNHINTED_DEGREE {
        return Err(Error::DegreeTooLarge(p.deg()));
    }
    let mut out = Vec::new();
    for (q, m) in squarefree_decomposition(p) {
        for g in factor_squarefree(&q) {
            out.push((g, m));
        }
    }
    sort_factors(&mut out);
    Ok(out)
}

fn factor_with_hints(p: &RatPoly, hints: &[RatPoly]) -> Result<Vec<(RatPoly, u32)>> {
    let prod = hints.iter().fold(RatPoly::one(), |acc, h| &acc * h);
    if prod.monic() != p.monic() {
        return Err(Error::BadHints(format!(
            "product of hints {} does not reconstruct {}",
            prod.monic(),
            p.monic()
        )));
    }
    let mut out: Vec<(RatPoly, u32)> = Vec::new();
    for h in hints {
        if h.deg() == 0 {
            continue;
        }
        let hm = h.monic();
        if let Some(e) = out.iter_mut().find(|(g, _)| *g == hm) {
            e.1 += 1;
            continue;
        }
        if !certify_irreducible(&hm)? {
            return Err(Error::BadHints(format!("hint {hm} is reducible")));
        }
        out.push((hm, 1));
    }
    sort_factors(&mut out);
    Ok(out)
}

/// Rational roots of `p`, by the rational-root test on its primitive part.
pub fn rational_roots(p: &RatPoly) -> Vec<BigRat> {
    let mut out = Vec::new();
    if p.deg() > MAX_UNHINTED_DEGREE {
        return out;
    }
    if let Ok(f) = factor_rational(p, None) {
        for (g, _) in f {
            if g.deg() == 1 {
                out.push(-g.coeff(0));
            }
        }
    }
    out.sort();
    out
}
