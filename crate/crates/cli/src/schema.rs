//! Versioned JSON system descriptions and text point syntax.
//!
//! Every rational is a string (`"3/4"`, `"-2"`). Validation errors carry a
//! JSON path such as `$.matrix[1][0]`.

use std::str::FromStr;

use heightlab::dynsys::{
    Axis, ConcreteAbelianSystem, DynSystem, LatticeSystem, PicardAction, SystemPoint, WehlerForm,
    WehlerPoint, WehlerSystem,
};
use heightlab::heights::{normalize, BinaryForm, EPoint, EllipticCurve, GramForm, ProjectivePoint};
use heightlab::numlin::{BigRat, CMMatrix, RatMatrix, RatVec};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmSpec {
    pub d: u64,
    pub real: Vec<Vec<String>>,
    pub omega: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    /// Binary forms, coefficient of `X^i Y^(d-i)` at index `i`.
    P1Morphism { numerator: Vec<String>, denominator: Vec<String> },
    Lattice {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Vec<Vec<String>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cm: Option<CmSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        translation: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gram: Option<Vec<Vec<String>>>,
    },
    /// `[a1, a2, a3, a4, a6]`, an integer matrix and translation points.
    ConcreteAbelian {
        curve: Vec<String>,
        matrix: Vec<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        translation: Option<Vec<String>>,
    },
    /// 27 coefficients, `x^a y^b z^c` at `9a + 3b + c` (affine exponents).
    Wehler { coefficients: Vec<String>, word: Vec<String> },
    Picard {
        matrix: Vec<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cone: Option<Vec<Vec<String>>>,
    },
    Product { left: Box<SystemSpec>, right: Box<SystemSpec> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDescription {
    pub label: String,
    pub spec: SystemSpec,
}

impl SystemDescription {
    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::input("$", e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(mut value: Value) -> Result<Self, CliError> {
        let obj = value
            .as_object_mut()
            .ok_or_else(|| CliError::input("$", "expected an object"))?;
        match obj.remove("schema") {
            Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => {}
            Some(other) => return Err(CliError::input("$.schema", format!("unsupported schema {other}"))),
            None => return Err(CliError::input("$.schema", "missing schema version")),
        }
        let label = match obj.remove("label") {
            None => String::new(),
            Some(Value::String(s)) => s,
            Some(_) => return Err(CliError::input("$.label", "expected a string")),
        };
        let spec: SystemSpec = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "$".to_string() } else { format!("$.{path}") };
            CliError::input(path, e.into_inner().to_string())
        })?;
        Ok(SystemDescription { label, spec })
    }

    pub fn to_value(&self) -> Value {
        let mut v = serde_json::to_value(&self.spec).expect("spec serializes");
        let obj = v.as_object_mut().expect("spec is an object");
        obj.insert("schema".into(), Value::from(SCHEMA_VERSION));
        if !self.label.is_empty() {
            obj.insert("label".into(), Value::from(self.label.clone()));
        }
        v
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("value serializes")
    }

    pub fn build(&self) -> Result<DynSystem, CliError> {
        build(&self.spec, "$", &self.label)
    }
}

fn join(path: &str, key: &str) -> String {
    format!("{path}.{key}")
}

fn idx(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

pub fn parse_rat(s: &str, path: &str) -> Result<BigRat, CliError> {
    BigRat::from_str(s.trim()).map_err(|_| CliError::input(path, format!("not a rational: {s:?}")))
}

fn parse_int(s: &str, path: &str) -> Result<BigInt, CliError> {
    BigInt::from_str(s.trim()).map_err(|_| CliError::input(path, format!("not an integer: {s:?}")))
}

fn parse_i64(s: &str, path: &str) -> Result<i64, CliError> {
    parse_int(s, path)?
        .to_i64()
        .ok_or_else(|| CliError::input(path, "integer out of range"))
}

fn rat_vec(v: &[String], path: &str) -> Result<RatVec, CliError> {
    v.iter().enumerate().map(|(i, s)| parse_rat(s, &idx(path, i))).collect()
}

fn rat_matrix(rows: &[Vec<String>], path: &str) -> Result<RatMatrix, CliError> {
    let n = rows.len();
    if n == 0 {
        return Err(CliError::input(path, "empty matrix"));
    }
    let mut out = Vec::with_capacity(n);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(CliError::input(idx(path, i), format!("expected {n} entries, got {}", r.len())));
        }
        out.push(rat_vec(r, &idx(path, i))?);
    }
    RatMatrix::from_rows(out).map_err(|e| CliError::core_at(path, e))
}

fn check_len(len: usize, expected: usize, path: &str) -> Result<(), CliError> {
    if len != expected {
        return Err(CliError::input(path, format!("expected {expected} entries, got {len}")));
    }
    Ok(())
}

fn build(spec: &SystemSpec, path: &str, label: &str) -> Result<DynSystem, CliError> {
    match spec {
        SystemSpec::P1Morphism { numerator, denominator } => {
            let f = form(numerator, &join(path, "numerator"))?;
            let g = form(denominator, &join(path, "denominator"))?;
            let m = heightlab::dynsys::p1_validate(f, g).map_err(|e| CliError::core_at(path, e))?;
            Ok(DynSystem::P1(m))
        }
        SystemSpec::Lattice {
            matrix,
            cm,
            translation,
            gram,
        } => {
            let t = translation
                .as_ref()
                .map(|t| rat_vec(t, &join(path, "translation")))
                .transpose()?;
            let g = match gram {
                Some(g) => Some(
                    GramForm::rational(rat_matrix(g, &join(path, "gram"))?)
                        .map_err(|e| CliError::core_at(join(path, "gram"), e))?,
                ),
                None => None,
            };
            let sys = match (matrix, cm) {
                (Some(m), None) => {
                    let a = rat_matrix(m, &join(path, "matrix"))?;
                    let g = g.unwrap_or_else(|| GramForm::identity(a.dim()));
                    LatticeSystem::new(a, t, g)
                }
                (None, Some(c)) => {
                    let p = join(path, "cm");
                    let re = rat_matrix(&c.real, &join(&p, "real"))?;
                    let om = rat_matrix(&c.omega, &join(&p, "omega"))?;
                    let cmm = CMMatrix::new(re, om, c.d).map_err(|e| CliError::core_at(&p, e))?;
                    let g = g.unwrap_or_else(|| GramForm::identity(2 * cmm.dim()));
                    LatticeSystem::new_cm(cmm, t, g)
                }
                _ => return Err(CliError::input(path, "give exactly one of matrix and cm")),
            };
            Ok(DynSystem::Lattice(sys.map_err(|e| CliError::core_at(path, e))?))
        }
        SystemSpec::ConcreteAbelian {
            curve,
            matrix,
            translation,
        } => {
            let cp = join(path, "curve");
            check_len(curve.len(), 5, &cp)?;
            let a: Vec<BigRat> = rat_vec(curve, &cp)?;
            let [a1, a2, a3, a4, a6]: [BigRat; 5] = a.try_into().expect("length checked");
            let e = EllipticCurve::new(a1, a2, a3, a4, a6).map_err(|er| CliError::core_at(&cp, er))?;
            let mp = join(path, "matrix");
            let mut m = Vec::new();
            for (i, row) in matrix.iter().enumerate() {
                check_len(row.len(), matrix.len(), &idx(&mp, i))?;
                let r: Result<Vec<i64>, _> = row
                    .iter()
                    .enumerate()
                    .map(|(j, s)| parse_i64(s, &idx(&idx(&mp, i), j)))
                    .collect();
                m.push(r?);
            }
            let t = match translation {
                Some(ts) => {
                    let tp = join(path, "translation");
                    Some(
                        ts.iter()
                            .enumerate()
                            .map(|(i, s)| parse_epoint(s, &idx(&tp, i)))
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                None => None,
            };
            let s = ConcreteAbelianSystem::new(e, m, t).map_err(|er| CliError::core_at(path, er))?;
            Ok(DynSystem::Abelian(s))
        }
        SystemSpec::Wehler { coefficients, word } => {
            let cp = join(path, "coefficients");
            check_len(coefficients.len(), 27, &cp)?;
            let c: Vec<BigInt> = coefficients
                .iter()
                .enumerate()
                .map(|(i, s)| parse_int(s, &idx(&cp, i)))
                .collect::<Result<_, _>>()?;
            let f = WehlerForm::new(c).map_err(|e| CliError::core_at(&cp, e))?;
            let wp = join(path, "word");
            let w: Vec<Axis> = word
                .iter()
                .enumerate()
                .map(|(i, s)| Axis::parse(s).ok_or_else(|| CliError::input(idx(&wp, i), format!("unknown axis {s:?}"))))
                .collect::<Result<_, _>>()?;
            let s = WehlerSystem::new(f, w).map_err(|e| CliError::core_at(path, e))?;
            Ok(DynSystem::Wehler(s))
        }
        SystemSpec::Picard { matrix, cone } => {
            let a = rat_matrix(matrix, &join(path, "matrix"))?;
            let cone = match cone {
                Some(c) => {
                    let cp = join(path, "cone");
                    Some(
                        c.iter()
                            .enumerate()
                            .map(|(i, v)| rat_vec(v, &idx(&cp, i)))
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                None => None,
            };
            let name = if label.is_empty() { "picard" } else { label };
            let p = PicardAction::new(a, cone, name).map_err(|e| CliError::core_at(path, e))?;
            Ok(DynSystem::Picard(p))
        }
        SystemSpec::Product { left, right } => Ok(DynSystem::product(
            build(left, &join(path, "left"), label)?,
            build(right, &join(path, "right"), label)?,
        )),
    }
}

fn form(c: &[String], path: &str) -> Result<BinaryForm, CliError> {
    if c.is_empty() {
        return Err(CliError::input(path, "empty coefficient list"));
    }
    let v = c
        .iter()
        .enumerate()
        .map(|(i, s)| parse_int(s, &idx(path, i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BinaryForm::new(v))
}

/// `"x,y"` or `"O"` for the point at infinity.
fn parse_epoint(s: &str, path: &str) -> Result<EPoint, CliError> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("o") || t.eq_ignore_ascii_case("inf") {
        return Ok(EPoint::Infinity);
    }
    let parts: Vec<&str> = t.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::input(path, format!("expected x,y or O, got {s:?}")));
    }
    Ok(EPoint::affine(parse_rat(parts[0], path)?, parse_rat(parts[1], path)?))
}

/// `"a:b"`, a rational `"p/q"`, or `"inf"`.
fn parse_p1(s: &str, path: &str) -> Result<ProjectivePoint, CliError> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") {
        return Ok(ProjectivePoint::p1_infinity());
    }
    if t.contains(':') {
        let parts: Vec<BigRat> = t
            .split(':')
            .map(|x| parse_rat(x, path))
            .collect::<Result<_, _>>()?;
        if parts.len() != 2 {
            return Err(CliError::input(path, "a point of P^1 has two coordinates"));
        }
        return normalize(&parts).map_err(|e| CliError::core_at(path, e));
    }
    Ok(ProjectivePoint::p1_from_rational(&parse_rat(t, path)?))
}

/// Parses a point for the given system.
///
/// * `p1`: `a:b`, `p/q` or `inf`
/// * `lattice`: `x1,x2,...`
/// * `abelian`: `x,y;x,y;...` with `O` for the identity
/// * `wehler`: `a:b,c:d,e:f`
/// * `product`: `left|right`
pub fn parse_point(system: &DynSystem, s: &str) -> Result<SystemPoint, CliError> {
    parse_point_at(system, s, "--point")
}

fn parse_point_at(system: &DynSystem, s: &str, path: &str) -> Result<SystemPoint, CliError> {
    match system {
        DynSystem::P1(_) => Ok(SystemPoint::P1(parse_p1(s, path)?)),
        DynSystem::Lattice(l) => {
            let v: Vec<BigRat> = s
                .split(',')
                .map(|x| parse_rat(x, path))
                .collect::<Result<_, _>>()?;
            if v.len() != l.rank() {
                return Err(CliError::input(path, format!("expected {} coordinates, got {}", l.rank(), v.len())));
            }
            Ok(SystemPoint::Lattice(v))
        }
        DynSystem::Abelian(a) => {
            let ps: Vec<EPoint> = s
                .split(';')
                .map(|x| parse_epoint(x, path))
                .collect::<Result<_, _>>()?;
            if ps.len() != a.rank() {
                return Err(CliError::input(path, format!("expected {} points, got {}", a.rank(), ps.len())));
            }
            if let Some(p) = ps.iter().find(|p| !a.curve().contains(p)) {
                return Err(CliError::input(path, format!("{p} is not on the curve")));
            }
            Ok(SystemPoint::Abelian(ps))
        }
        DynSystem::Wehler(w) => {
            let cs: Vec<ProjectivePoint> = s
                .split(',')
                .map(|x| parse_p1(x, path))
                .collect::<Result<_, _>>()?;
            let [x, y, z]: [ProjectivePoint; 3] = cs
                .try_into()
                .map_err(|_| CliError::input(path, "a Wehler point has three coordinates"))?;
            let p = WehlerPoint::new(x, y, z).map_err(|e| CliError::core_at(path, e))?;
            if !w.form().contains(&p) {
                return Err(CliError::input(path, format!("{p} is not on the surface")));
            }
            Ok(SystemPoint::Wehler(p))
        }
        DynSystem::Picard(_) => Err(CliError::input(path, "a bare Picard action has no points")),
        DynSystem::Product(f, g) => {
            let (a, b) = s
                .split_once('|')
                .ok_or_else(|| CliError::input(path, "product points are written left|right"))?;
            Ok(SystemPoint::Pair(
                Box::new(parse_point_at(f, a, path)?),
                Box::new(parse_point_at(g, b, path)?),
            ))
        }
    }
}
