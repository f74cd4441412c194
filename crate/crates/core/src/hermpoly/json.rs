//! JSON encodings for polynomials and points. Rationals travel as `"p/q"` strings.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::bipoly::{Bipoly, RealBipoly};
use super::holo::HoloPoly;
use super::monomial::MultiIndex;
use super::rational::{parse_rational, ComplexRational};
use super::PolyError;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SurfaceJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub name: Option<String>,
    pub n: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HoloTermJson {
    pub z: Vec<u32>,
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HoloJson {
    pub terms: Vec<HoloTermJson>,
}

fn zero_string() -> String {
    "0".into()
}

pub fn rational_to_string(r: &BigRational) -> String {
    r.to_string()
}

pub fn bipoly_to_json(p: &Bipoly, name: Option<&str>) -> SurfaceJson {
    let terms = p
        .terms()
        .map(|(a, b, c)| TermJson {
            z: a.0.clone(),
            zbar: b.0.clone(),
            re: rational_to_string(&c.re),
            im: rational_to_string(&c.im),
        })
        .collect();
    SurfaceJson { name: name.map(str::to_owned), n: p.n(), terms }
}

pub fn bipoly_from_json(s: &SurfaceJson) -> Result<Bipoly, PolyError> {
    let terms = s
        .terms
        .iter()
        .map(|t| {
            let c = ComplexRational::new(parse_rational(&t.re)?, parse_rational(&t.im)?);
            Ok((MultiIndex(t.z.clone()), MultiIndex(t.zbar.clone()), c))
        })
        .collect::<Result<Vec<_>, PolyError>>()?;
    Bipoly::from_terms(s.n, terms)
}

/// Parses a surface document, rejecting term sets that are not real-valued.
pub fn surface_from_str(text: &str) -> Result<(RealBipoly, Option<String>), PolyError> {
    let s: SurfaceJson = serde_json::from_str(text)?;
    let p = RealBipoly::new(bipoly_from_json(&s)?)?;
    Ok((p, s.name))
}

pub fn surface_to_string(p: &RealBipoly, name: Option<&str>) -> String {
    serde_json::to_string_pretty(&bipoly_to_json(p, name)).expect("surface serialization")
}

pub fn holo_to_json(h: &HoloPoly) -> HoloJson {
    HoloJson {
        terms: h
            .terms()
            .map(|(a, c)| HoloTermJson { z: a.0.clone(), re: rational_to_string(&c.re), im: rational_to_string(&c.im) })
            .collect(),
    }
}

pub fn holo_from_json(n: usize, h: &HoloJson) -> Result<HoloPoly, PolyError> {
    let terms = h
        .terms
        .iter()
        .map(|t| Ok((MultiIndex(t.z.clone()), ComplexRational::new(parse_rational(&t.re)?, parse_rational(&t.im)?))))
        .collect::<Result<Vec<_>, PolyError>>()?;
    HoloPoly::from_terms(n, terms)
}

fn scalar_from_value(v: &Value) -> Result<BigRational, PolyError> {
    match v {
        // serde_json prints the shortest round-trip decimal, so 0.1 parses as 1/10.
        Value::Number(x) => parse_rational(&x.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(PolyError::Parse(format!("expected a number or rational string, found {other}"))),
    }
}

/// Parses one coordinate: a number, a `"p/q"` string, or a `[re, im]` pair.
pub fn coordinate_from_value(v: &Value) -> Result<ComplexRational, PolyError> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            Ok(ComplexRational::new(scalar_from_value(&pair[0])?, scalar_from_value(&pair[1])?))
        }
        Value::Array(_) => Err(PolyError::Parse("complex coordinate must be a [re, im] pair".into())),
        other => Ok(ComplexRational::real(scalar_from_value(other)?)),
    }
}

pub fn point_from_value(v: &Value) -> Result<Vec<ComplexRational>, PolyError> {
    match v {
        Value::Array(items) => items.iter().map(coordinate_from_value).collect(),
        _ => Err(PolyError::Parse("point must be a JSON array".into())),
    }
}

pub fn point_from_str(text: &str) -> Result<Vec<ComplexRational>, PolyError> {
    let v: Value = serde_json::from_str(text)?;
    point_from_value(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermpoly::rational::rat;

    #[test]
    fn surface_round_trip() {
        let w = HoloPoly::var(2, 1);
        let p = &RealBipoly::im_of(&w) - &RealBipoly::abs_sq(2, 0).scale(&rat(7, 3));
        let text = surface_to_string(&p, Some("test"));
        let (q, name) = surface_from_str(&text).unwrap();
        assert_eq!(p, q);
        assert_eq!(name.as_deref(), Some("test"));
        assert_eq!(surface_to_string(&q, Some("test")), text);
    }

    #[test]
    fn loader_rejects_non_real() {
        let text = r#"{"n":1,"terms":[{"z":[1],"zbar":[0],"re":"1","im":"0"}]}"#;
        assert!(matches!(surface_from_str(text), Err(PolyError::NotReal(_))));
    }

    #[test]
    fn malformed_json_reports_location() {
        let err = surface_from_str("{\"n\": 1,\n \"terms\": [}").unwrap_err();
        match err {
            PolyError::Json { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn point_forms() {
        let p = point_from_str(r#"[0.5, "1/3", [0, -2]]"#).unwrap();
        assert_eq!(p[0], ComplexRational::from_ratio(1, 2));
        assert_eq!(p[1], ComplexRational::from_ratio(1, 3));
        assert_eq!(p[2], ComplexRational::from_ints(0, -2));
        assert!(point_from_str("3").is_err());
    }
}
