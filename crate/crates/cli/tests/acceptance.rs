//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Exits 0 unless `HEIGHTLAB_ACCEPTANCE_STRICT=1` is set, in which case any
//! failure gives exit code 1.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use heightlab::canonical::series::{height_series_with, Budget};
use heightlab::canonical::wehler_nef::nef_canonical_wehler_with;
use heightlab::canonical::{call_silverman, call_silverman_constant, lattice_canonical, zf_membership, Membership};
use heightlab::dynsys::wehler::seeded_instance;
use heightlab::dynsys::{system_spectral, Axis, DynSystem, LatticeSystem, P1Morphism, SystemPoint};
use heightlab::heights::gram::lattice_height;
use heightlab::heights::{enumerate_p1_points, neron_tate, neron_tate_local, weil_height, Duplication, EPoint};
use heightlab::heights::{EllipticCurve, GramForm, ProjectivePoint};
use heightlab::numlin::{growth_exponent_oracle, rat, rat_int, spectral_data, BigRat, CMMatrix, RatMatrix, RatVec};
use heightlab::orbits::{northcott_scan, orbit_intersection};
use heightlab_cli::{run_args, SystemDescription};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn examples_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lattice(rows: &[&[i64]], t: Option<RatVec>, g: GramForm) -> LatticeSystem {
    LatticeSystem::new(RatMatrix::from_ints(rows), t, g).unwrap()
}

fn ints(v: &[i64]) -> RatVec {
    v.iter().map(|&x| rat_int(x)).collect()
}

// 1

fn example_one_one() -> Outcome {
    let file = examples_dir().join("example-1.1.json").display().to_string();
    let (code, out, err) = run_args(["heightlab", "spectral", "--system", &file], None);
    ensure(code == 0, || err.clone())?;
    let v: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let lo = rat_from(&v["metadata"]["delta"][0])?;
    let hi = rat_from(&v["metadata"]["delta"][1])?;
    ensure(lo <= rat_int(4) && rat_int(4) <= hi, || format!("delta [{lo}, {hi}] misses 4"))?;
    ensure(v["metadata"]["l"] == 2, || format!("l = {}", v["metadata"]["l"]))?;

    let s = lattice(&[&[2, 3], &[0, 2]], None, GramForm::identity(2));
    let sys = DynSystem::Lattice(s.clone());
    let series = height_series_with(&sys, &SystemPoint::Lattice(ints(&[0, 1])), 50, Budget::default(), 128)
        .map_err(|e| e.to_string())?;
    for n in 1..=50usize {
        let expected = rat(9, 4) + rat(1, (n * n) as i64);
        ensure(series.exact_a(n) == Some(expected.clone()), || format!("a_{n} != {expected}"))?;
    }
    let est = lattice_canonical(&s, &ints(&[0, 1])).map_err(|e| e.to_string())?;
    ensure(est.exact_value() == Some(&rat(9, 4)), || format!("limit {:?}", est.exact))?;
    Ok("delta = [4, 4], l = 2, a_n = 9/4 + 1/n^2 for n <= 50, limit 9/4".into())
}

fn rat_from(v: &serde_json::Value) -> Result<BigRat, String> {
    let s = v.as_str().ok_or("expected a string")?;
    // decimal string to rational
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let den = num_traits::pow(num_bigint::BigInt::from(10), frac.len());
    let num: num_bigint::BigInt = format!("{int}{frac}").parse().map_err(|_| format!("bad decimal {s}"))?;
    Ok(BigRat::new(num, den))
}

// 2

fn spectral_vs_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut checked, mut matched) = (0, 0);
    let mut misses = vec![];
    while checked < 50 {
        let n = rng.gen_range(1..=5);
        let rows = (0..n)
            .map(|_| (0..n).map(|_| rat_int(rng.gen_range(-3i64..=3))).collect())
            .collect();
        let m = RatMatrix::from_rows(rows).unwrap();
        let sd = spectral_data(&m, 128).map_err(|e| e.to_string())?;
        if sd.rho.to_f64() <= 1.0 {
            continue;
        }
        checked += 1;
        let (log_rho, l) = growth_exponent_oracle(&m, 30);
        let d = (log_rho - sd.rho.to_f64().ln()).abs();
        let l_ok = l.round() as i64 == sd.jordan_exponent as i64;
        if d <= 0.02 && l_ok {
            matched += 1;
        } else {
            misses.push(format!("dlog={d:.3} l_oracle={l:.2} l={}", sd.jordan_exponent));
        }
    }
    let detail = format!("{matched}/50 matched; misses: [{}]", misses.join("; "));
    ensure(matched >= 48, || detail.clone())?;
    Ok(detail)
}

// 3

fn neron_tate_corpus() -> Vec<(&'static str, EllipticCurve, EPoint)> {
    let c = |a: [i64; 5]| EllipticCurve::from_ints(a).unwrap();
    vec![
        ("37a", c([0, 0, 1, -1, 0]), EPoint::from_ints(0, 0)),
        ("43a", c([0, 1, 1, 0, 0]), EPoint::from_ints(0, 0)),
        ("53a", c([1, -1, 1, 0, 0]), EPoint::from_ints(0, 0)),
        ("57a", c([0, -1, 1, -2, 2]), EPoint::from_ints(2, 1)),
        ("58a", c([1, -1, 0, -1, 1]), EPoint::from_ints(0, 1)),
    ]
}

fn neron_tate_cross_validation() -> Outcome {
    const TOL: f64 = 1e-7;
    let mut max_ab = 0.0f64;
    let mut max_dup = 0.0f64;
    let mut max_depth = 0;
    let mut max_ce = 0.0f64;
    for (name, e, p) in neron_tate_corpus() {
        let dup = Duplication::new(&e);
        max_depth = max_depth.max(dup.depth_for(&BigRat::new(1.into(), 20_000_000.into()), 64));
        max_ce = max_ce.max(dup.c_e.to_f64().unwrap());
        let a = neron_tate(&e, &p, TOL).map_err(|x| format!("{name}: {x}"))?.value;
        let b = neron_tate_local(&e, &p, TOL, &[]).map_err(|x| format!("{name}: {x}"))?.value;
        let d = (a.to_f64() - b.to_f64()).abs();
        max_ab = max_ab.max(d);
        ensure(d <= 1e-6, || format!("{name}: backends differ by {d:e}"))?;
        let h2 = neron_tate(&e, &e.double(&p), 4.0 * TOL).map_err(|x| x.to_string())?.value;
        let dd = (h2.to_f64() - 4.0 * a.to_f64()).abs();
        max_dup = max_dup.max(dd);
        ensure(dd <= 4e-6, || format!("{name}: h(2P) - 4h(P) = {dd:e}"))?;
    }
    // parallelogram law needs two independent points: rank two curve 389a
    let e = EllipticCurve::from_ints([0, 1, 1, -2, 0]).unwrap();
    let (p, q) = (EPoint::from_ints(0, 0), EPoint::from_ints(1, 0));
    let h = |x: &EPoint| neron_tate(&e, x, TOL).map(|v| v.value.to_f64()).map_err(|x| x.to_string());
    let lhs = h(&e.add(&p, &q))? + h(&e.sub(&p, &q))?;
    let rhs = 2.0 * (h(&p)? + h(&q)?);
    let pl = (lhs - rhs).abs();
    ensure(pl <= 4e-6, || format!("parallelogram defect {pl:e}"))?;
    let detail = format!(
        "max |A-B| = {max_ab:.1e}, max |h(2P)-4h(P)| = {max_dup:.1e}, parallelogram {pl:.1e}, \
         certified doubling depth {max_depth} (C_E up to {max_ce:.2})"
    );
    ensure(max_depth <= 10, || {
        format!("{detail}; depth 10 certifies 5e-8 only when C_E <= {:.2}", 6.0 * 4f64.powi(10) * 5e-8)
    })?;
    Ok(detail)
}

// 4

fn p1_corpus() -> Vec<P1Morphism> {
    let m = |n: &[i64], d: &[i64]| P1Morphism::from_i64(n, d).unwrap();
    vec![
        m(&[0, 0, 1], &[1, 0, 0]),
        m(&[-1, 0, 1], &[1, 0, 0]),
        m(&[1, 0, 1], &[1, 0, 0]),
        m(&[-2, 0, 1], &[1, 0, 0]),
        m(&[1, 0, 4], &[4, 0, 0]),
        m(&[0, -1, 0, 1], &[1, 0, 0, 0]),
        m(&[1, 0, 3], &[-2, 1, 0]),
        m(&[3, 0, 3], &[0, 6, 1]),
        m(&[1, 0, -2, 0, 1], &[0, 4, 0, 4, 0]),
        m(&[1, 0, 3], &[0, 0, 1]),
    ]
}

fn call_silverman_certification() -> Outcome {
    const TOL: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut count = 0;
    for (i, f) in p1_corpus().iter().enumerate() {
        let d = f.degree() as f64;
        let c0 = call_silverman_constant(f).to_f64().unwrap();
        let mut done = 0;
        while done < 100 {
            let a: i64 = rng.gen_range(-50..=50);
            let b: i64 = rng.gen_range(1..=50);
            if num_integer::gcd(a, b) != 1 {
                continue;
            }
            done += 1;
            let p = ProjectivePoint::from_i64(&[a, b]).unwrap();
            let h = call_silverman(f, &p, TOL).map_err(|e| format!("map {i}, {a}/{b}: {e}"))?;
            let hf = call_silverman(f, &f.apply(&p), TOL).map_err(|e| format!("map {i}, f({a}/{b}): {e}"))?;
            let defect = (hf.limsup_est.to_f64() - d * h.limsup_est.to_f64()).abs();
            worst = worst.max(defect);
            ensure(defect <= 2.0 * TOL, || format!("map {i}, {a}/{b}: defect {defect:e}"))?;
            let naive = weil_height(&p, 96).value.to_f64();
            ensure(h.liminf_est.lower().to_f64().unwrap() <= naive + c0, || {
                format!("map {i}, {a}/{b}: canonical height above h + C0")
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} points, worst |h(fP) - d h(P)| = {worst:.1e} <= 2e-6"))
}

// 5

/// Cycle search by plain iteration. Preperiodic points of these maps have
/// height zero orbits, so an orbit past 256 bits is treated as wandering.
fn brute_force_preperiodic(f: &P1Morphism, bound: u64) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for p in enumerate_p1_points(bound).unwrap() {
        let mut seen = vec![p.clone()];
        let mut q = p.clone();
        for _ in 0..12 {
            q = f.apply(&q);
            if seen.contains(&q) {
                out.insert(p.to_string());
                break;
            }
            if q.size_bits() > 256 {
                break;
            }
            seen.push(q.clone());
        }
    }
    out
}

fn northcott_scans() -> Outcome {
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    let cases = [
        ("z^2", P1Morphism::quadratic(0), set(&["0:1", "1:0", "1:1", "1:-1"])),
        ("z^2-1", P1Morphism::quadratic(-1), set(&["0:1", "1:0", "1:1", "1:-1"])),
    ];
    let mut notes = vec![];
    for (name, f, expected) in cases {
        let t = Instant::now();
        let r = northcott_scan(&f, 100, 1e-8).map_err(|e| e.to_string())?;
        let found: BTreeSet<String> = r.points().iter().map(|p| p.to_string()).collect();
        ensure(found == expected, || format!("{name}: scan found {found:?}"))?;
        ensure(r.anomalies.is_empty(), || format!("{name}: anomalies {:?}", r.anomalies))?;
        let oracle = brute_force_preperiodic(&f, 100);
        ensure(oracle == expected, || format!("{name}: oracle found {oracle:?}"))?;
        let el = t.elapsed();
        ensure(el < Duration::from_secs(30), || format!("{name}: {el:?}"))?;
        notes.push(format!("{name}: {} of {} points in {:.1}s", found.len(), r.scanned, el.as_secs_f64()));
    }
    Ok(notes.join("; "))
}

// 6

fn orbit_intersections() -> Outcome {
    let f = DynSystem::P1(P1Morphism::quadratic(0));
    let x = SystemPoint::P1(ProjectivePoint::from_i64(&[2, 1]).unwrap());
    let y = SystemPoint::P1(ProjectivePoint::from_i64(&[16, 1]).unwrap());
    let mut notes = vec![];
    for n in [10, 20, 40] {
        let r = orbit_intersection(&f, &x, &f, &y, n).map_err(|e| e.to_string())?;
        let expected: Vec<(usize, usize)> = (0..=r.computed.1).map(|m| (m + 2, m)).filter(|p| p.0 <= r.computed.0).collect();
        ensure(r.pairs == expected, || format!("N={n}: pairs {:?}", r.pairs))?;
        ensure(r.max_gap == Some(2), || format!("N={n}: gap {:?}", r.max_gap))?;
        ensure(r.ap_decomposition.len() == 1, || format!("N={n}: {:?}", r.ap_decomposition))?;
        ensure(r.residual_pairs.is_empty(), || format!("N={n}: residual {:?}", r.residual_pairs))?;
        notes.push(format!(
            "N={n}: {} pairs{}",
            r.pairs.len(),
            if r.truncated() {
                format!(", budget truncation at ({}, {})", r.computed.0, r.computed.1)
            } else {
                String::new()
            }
        ));
    }
    Ok(notes.join("; "))
}

// 7

struct ZfCase {
    name: &'static str,
    system: LatticeSystem,
    /// Hand-derived `rho^2` and `l`, independent of the spectral code.
    delta: BigRat,
    l: u32,
    points: Vec<RatVec>,
    /// Dominant factor with roots of distinct moduli: only undecided or a
    /// correct answer is acceptable.
    mixed: bool,
}

fn cm_system(real: &[&[i64]], omega: &[&[i64]], d: u64) -> LatticeSystem {
    let cm = CMMatrix::new(RatMatrix::from_ints(real), RatMatrix::from_ints(omega), d).unwrap();
    let r = cm.dim();
    let mut g = vec![vec![0i64; 2 * r]; 2 * r];
    for i in 0..r {
        g[2 * i][2 * i] = 1;
        g[2 * i + 1][2 * i + 1] = d as i64;
    }
    let rows: Vec<&[i64]> = g.iter().map(|r| r.as_slice()).collect();
    let gram = GramForm::rational(RatMatrix::from_ints(&rows)).unwrap();
    LatticeSystem::new_cm(cm, None, gram).unwrap()
}

fn zf_cases() -> Vec<ZfCase> {
    let id = GramForm::identity;
    let case = |name, system, delta: i64, l, points: Vec<&[i64]>| ZfCase {
        name,
        system,
        delta: rat_int(delta),
        l,
        points: points.into_iter().map(ints).collect(),
        mixed: false,
    };
    let mut v = vec![
        case("jordan", lattice(&[&[2, 3], &[0, 2]], None, id(2)), 4, 2, vec![&[0, 1], &[5, 0], &[0, 0]]),
        case(
            "jordan+translation",
            lattice(&[&[2, 3], &[0, 2]], Some(ints(&[1, 1])), id(2)),
            4,
            2,
            vec![&[7, -1], &[0, 0]],
        ),
        case("diag(2,1)", lattice(&[&[2, 0], &[0, 1]], None, id(2)), 4, 0, vec![&[0, 5], &[1, 1]]),
        case("diag(3,-1)", lattice(&[&[3, 0], &[0, -1]], None, id(2)), 9, 0, vec![&[0, 1], &[1, 0]]),
        case(
            "jordan(2)+3",
            lattice(&[&[2, 1, 0], &[0, 2, 0], &[0, 0, 3]], None, id(3)),
            9,
            0,
            vec![&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
        ),
        case(
            "rotation+1",
            lattice(&[&[0, -2, 0], &[2, 0, 0], &[0, 0, 1]], None, id(3)),
            4,
            0,
            vec![&[0, 0, 1], &[1, 0, 0]],
        ),
        case(
            "1+i block+1",
            lattice(&[&[1, -1, 0], &[1, 1, 0], &[0, 0, 1]], None, id(3)),
            2,
            0,
            vec![&[0, 0, 4], &[1, 1, 0]],
        ),
        case(
            "sqrt2 block+1",
            lattice(&[&[0, 2, 0], &[1, 0, 0], &[0, 0, 1]], None, id(3)),
            2,
            0,
            vec![&[0, 0, 1], &[1, 0, 0]],
        ),
        case("cm d=1: 1+i, 1", cm_system(&[&[1, 0], &[0, 1]], &[&[1, 0], &[0, 0]], 1), 2, 0, vec![&[0, 0, 1, 0], &[1, 0, 0, 0]]),
        case("cm d=2: 1+w, 1", cm_system(&[&[1, 0], &[0, 1]], &[&[1, 0], &[0, 0]], 2), 3, 0, vec![&[0, 0, 0, 1], &[0, 1, 0, 0]]),
        case("cm d=3: 1+w, 1", cm_system(&[&[1, 0], &[0, 1]], &[&[1, 0], &[0, 0]], 3), 4, 0, vec![&[0, 0, 2, 1], &[1, 1, 0, 0]]),
        case("cm d=2: w, 1", cm_system(&[&[0, 0], &[0, 1]], &[&[1, 0], &[0, 0]], 2), 2, 0, vec![&[0, 0, 1, 0], &[1, 0, 0, 0]]),
        case("cm d=1: 2, 1+i", cm_system(&[&[2, 0], &[0, 1]], &[&[0, 0], &[0, 1]], 1), 4, 0, vec![&[0, 0, 1, 1], &[1, 0, 0, 0]]),
        case("scalar 3", lattice(&[&[3, 0], &[0, 3]], None, id(2)), 9, 0, vec![&[0, 0], &[1, 2]]),
        case(
            "affine (2,-1)",
            lattice(&[&[2, 1], &[0, -1]], Some(ints(&[1, 0])), id(2)),
            4,
            0,
            vec![&[0, -3], &[0, 0]],
        ),
        case(
            "4 + jordan(2)",
            lattice(&[&[4, 0, 0], &[0, 2, 1], &[0, 0, 2]], None, id(3)),
            16,
            0,
            vec![&[0, 5, -7], &[1, 0, 0]],
        ),
        case(
            "jordan(3)",
            lattice(&[&[2, 1, 0], &[0, 2, 1], &[0, 0, 2]], None, id(3)),
            4,
            4,
            vec![&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
        ),
        case(
            "affine cm d=1",
            LatticeSystem::new_cm(
                CMMatrix::new(RatMatrix::from_ints(&[&[1]]), RatMatrix::from_ints(&[&[1]]), 1).unwrap(),
                Some(ints(&[1, 0])),
                GramForm::identity(2),
            )
            .unwrap(),
            2,
            0,
            vec![&[0, -1], &[0, 0]],
        ),
    ];
    // diag(2, 1/2) with a translation; fixed point (-1, 2)
    v.push(ZfCase {
        name: "affine diag(2,1/2)",
        system: LatticeSystem::new(
            RatMatrix::from_rows(vec![vec![rat(2, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 2)]]).unwrap(),
            Some(ints(&[1, 1])),
            GramForm::identity(2),
        )
        .unwrap(),
        delta: rat_int(4),
        l: 0,
        points: vec![ints(&[-1, 7]), ints(&[0, 2])],
        mixed: false,
    });
    for (name, rows) in [
        ("golden", vec![vec![1, 1], vec![1, 0]]),
        ("golden+1", vec![vec![1, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]),
    ] {
        let r: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let n = rows.len();
        let mut p = vec![0i64; n];
        p[0] = 1;
        v.push(ZfCase {
            name,
            system: lattice(&r, None, GramForm::identity(n)),
            delta: rat(0, 1),
            l: 0,
            points: vec![ints(&p)],
            mixed: true,
        });
    }
    v
}

/// Classifies by the decay of `a_n` between `n = 25..36` and `n = 49..60`.
fn zf_oracle(c: &ZfCase, v: &RatVec) -> Option<bool> {
    let mut x = v.clone();
    let mut a = vec![BigRat::zero()];
    let mut dn = BigRat::from_integer(1.into());
    for n in 1..=60u32 {
        x = c.system.apply(&x).unwrap();
        dn *= &c.delta;
        let h = lattice_height(&x, c.system.gram()).unwrap().exact().unwrap().clone();
        let nl = BigRat::from_integer(num_bigint::BigInt::from(n).pow(c.l));
        a.push(h / (&dn * nl));
    }
    let window = |lo: usize, hi: usize| {
        let xs: Vec<f64> = a[lo..=hi].iter().map(|q| q.to_f64().unwrap()).collect();
        let max = xs.iter().cloned().fold(0.0, f64::max);
        let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        (min, max)
    };
    let (early_min, early_max) = window(25, 36);
    let (late_min, late_max) = window(49, 60);
    if late_max == 0.0 || late_max <= 0.3 * early_max {
        Some(true)
    } else if late_min > 0.0 && late_min >= 0.7 * early_min {
        Some(false)
    } else {
        None
    }
}

fn zf_exactness() -> Outcome {
    let cases = zf_cases();
    let (mut exact, mut undecided) = (0, 0);
    for c in &cases {
        for v in &c.points {
            let r = zf_membership(&c.system, v).map_err(|e| format!("{}: {e}", c.name))?;
            if c.mixed {
                // golden mean points are not in the zero locus
                ensure(r.member != Membership::Yes, || format!("{}: wrong yes", c.name))?;
                ensure(r.member == Membership::Undecided, || format!("{}: expected undecided", c.name))?;
                undecided += 1;
                continue;
            }
            let truth = zf_oracle(c, v).ok_or_else(|| format!("{}: oracle inconclusive at {v:?}", c.name))?;
            let expected = if truth { Membership::Yes } else { Membership::No };
            ensure(r.member == expected, || {
                format!("{} at {:?}: got {}, oracle {}", c.name, fmt(v), r.member, expected)
            })?;
            exact += 1;
        }
    }
    Ok(format!("{} systems, {exact} exact answers match the oracle, {undecided} mixed-modulus undecided", cases.len()))
}

fn fmt(v: &RatVec) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

// 8

fn wehler_properties() -> Outcome {
    let (s, pts) = seeded_instance(1, 5, vec![Axis::X, Axis::Y, Axis::Z]).map_err(|e| e.to_string())?;
    let sys = DynSystem::Wehler(s.clone());
    let delta = system_spectral(&sys, 128).map_err(|e| e.to_string())?.delta;
    let budget = Budget { max_bits: 200_000 };
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut depths = vec![];
    for p in &pts {
        for a in Axis::ALL {
            if let Ok(q) = s.involution(a, p) {
                ensure(s.form().contains(&q), || format!("sigma_{a}({p}) leaves the surface"))?;
            }
        }
        let Ok(fp) = s.apply(p) else { continue };
        // same depth for both, one step short of the budget, so that the two
        // estimates end at different orbit points
        let mut reach = 0usize;
        let mut q = p.clone();
        while reach < 6 {
            match s.apply(&q) {
                Ok(x) if x.size_bits() <= budget.max_bits => q = x,
                _ => break,
            }
            reach += 1;
        }
        let n = reach.saturating_sub(1).max(1);
        depths.push(n);
        let e = nef_canonical_wehler_with(&s, p, n, budget, 128).map_err(|x| x.to_string())?;
        let ef = nef_canonical_wehler_with(&s, &fp, n, budget, 128).map_err(|x| x.to_string())?;
        let err = |x: &heightlab::canonical::CanonicalEstimate| x.error_bound.as_ref().map(|b| b.to_f64()).unwrap_or(0.0);
        let lhs = ef.limsup_est.to_f64();
        let rhs = delta.to_f64() * e.limsup_est.to_f64();
        let allowed = 4.0 * (err(&ef) + delta.to_f64() * err(&e));
        let gap = (lhs - rhs).abs();
        ensure(gap <= allowed, || format!("{p}: |est(fP) - delta est(P)| = {gap:e} > {allowed:e}"))?;
        if rhs != 0.0 {
            worst = worst.max(gap / rhs.abs());
        }

        let x = SystemPoint::Wehler(p.clone());
        let a = height_series_with(&sys, &x, 6, budget, 128).map_err(|e| e.to_string())?;
        let b = height_series_with(&sys, &SystemPoint::Wehler(fp.clone()), 5, budget, 128).map_err(|e| e.to_string())?;
        for row in &b.rows {
            if let Some(other) = a.rows.get(row.n + 1) {
                ensure(row.h.exact_core == other.h.exact_core, || format!("{p}: shift identity fails at n = {}", row.n))?;
            }
        }
        checked += 1;
    }
    ensure(checked == pts.len(), || format!("only {checked} of {} points have an image", pts.len()))?;
    Ok(format!(
        "{checked} points, worst relative gap {worst:.1e} at depths {depths:?}, budget {} bits",
        budget.max_bits
    ))
}

// 9

fn corpus_systems() -> Result<Vec<(String, DynSystem)>, String> {
    let mut out = vec![];
    let mut entries: Vec<PathBuf> = std::fs::read_dir(examples_dir())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("json"))
        .collect();
    entries.sort();
    for p in entries {
        let d = SystemDescription::from_json_str(&std::fs::read_to_string(&p).unwrap()).map_err(|e| e.to_string())?;
        out.push((p.file_name().unwrap().to_string_lossy().into_owned(), d.build().map_err(|e| e.to_string())?));
    }
    for (i, f) in p1_corpus().into_iter().enumerate() {
        out.push((format!("p1 corpus {i}"), DynSystem::P1(f)));
    }
    Ok(out)
}

fn structural_identities() -> Outcome {
    let systems = corpus_systems()?;
    let mut squares = 0;
    for (name, s) in &systems {
        let r = system_spectral(s, 128).map_err(|e| format!("{name}: {e}"))?;
        let r2 = system_spectral(&s.square(), 128).map_err(|e| format!("{name}^2: {e}"))?;
        let ok = match (&r.delta_exact, &r2.delta_exact) {
            (Some(a), Some(b)) => &(a * a) == b,
            _ => r2.delta.overlaps(&r.delta.square()),
        };
        ensure(ok, || format!("{name}: delta of the square is not delta^2"))?;
        ensure(r.l == r2.l, || format!("{name}: l {} vs {}", r.l, r2.l))?;
        squares += 1;
    }
    let mut products = 0;
    let pointed: Vec<&(String, DynSystem)> = systems
        .iter()
        .filter(|(_, s)| !matches!(s, DynSystem::Product(..)))
        .collect();
    for (i, (na, a)) in pointed.iter().enumerate() {
        for (nb, b) in pointed.iter().skip(i) {
            let ra = system_spectral(a, 128).unwrap();
            let rb = system_spectral(b, 128).unwrap();
            let rp = system_spectral(&DynSystem::product(a.clone(), b.clone()), 128).map_err(|e| e.to_string())?;
            if let Some(ord) = ra.compare(&rb) {
                let w = if ord == std::cmp::Ordering::Less { &rb } else { &ra };
                ensure(rp.l == w.l && rp.delta.overlaps(&w.delta), || format!("{na} x {nb}: not the lexicographic max"))?;
                products += 1;
            }
        }
    }
    Ok(format!("{squares} square identities, {products} product identities"))
}

fn main() {
    let criteria = [
        Criterion { id: 1, title: "Example 1.1 replication", limit: Duration::from_secs(1), run: example_one_one },
        Criterion { id: 2, title: "spectral pipeline vs growth oracle", limit: Duration::from_secs(60), run: spectral_vs_oracle },
        Criterion { id: 3, title: "Neron-Tate cross-validation", limit: Duration::from_secs(120), run: neron_tate_cross_validation },
        Criterion { id: 4, title: "Call-Silverman certification", limit: Duration::from_secs(60), run: call_silverman_certification },
        Criterion { id: 5, title: "Northcott scans", limit: Duration::from_secs(60), run: northcott_scans },
        Criterion { id: 6, title: "orbit intersection", limit: Duration::from_secs(10), run: orbit_intersections },
        Criterion { id: 7, title: "zero locus exactness", limit: Duration::from_secs(60), run: zf_exactness },
        Criterion { id: 8, title: "Wehler properties", limit: Duration::from_secs(120), run: wehler_properties },
        Criterion { id: 9, title: "structural identities", limit: Duration::from_secs(10), run: structural_identities },
    ];
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    let mut ran = 0;
    for c in criteria.iter().filter(|c| only.is_none_or(|id| id == c.id)) {
        ran += 1;
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(c.run).unwrap_or_else(|_| Err("panicked".into()));
        let el = start.elapsed();
        let outcome = match outcome {
            Ok(d) if el > c.limit => Err(format!("{d}; runtime {:.2}s over {:.0}s", el.as_secs_f64(), c.limit.as_secs_f64())),
            o => o,
        };
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{}] {} ({:.2}s): {detail}", c.id, c.title, el.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    let strict = std::env::var("HEIGHTLAB_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
