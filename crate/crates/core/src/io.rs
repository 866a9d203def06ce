//! JSON encoding of paths, triples, bundles and reports.
//!
//! Exact numbers are written as decimal strings (every dyadic rational has a
//! finite decimal expansion), float numbers as JSON numbers. On input both
//! forms are accepted in either mode, as are `p/q` strings; an exact reader
//! rejects values that are not dyadic.
//!
//! A path is `{"times": [...], "values": [[x1, x2], ...]}`. Documents carry
//! `"mode": "exact" | "float"` at the top level; it defaults to float.

use serde_json::{json, Map, Value};

use crate::classify::{Classification, ReflectionMatrix2};
use crate::counterexample::{AnyBundle, CounterexampleBundle};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::path::{PLPath1, PLPath2, Vec2};
use crate::scalar::{Mode, Real, Scalar};
use crate::solver::SolveResult;
use crate::verifier::{E2Check, SolutionTriple, UniquenessDiagnostics, VerificationReport};

pub fn scalar_to_json<T: Real>(x: &T) -> Value {
    match x.to_scalar() {
        Scalar::Exact(d) => Value::String(d.to_string()),
        Scalar::Float(v) => serde_json::Number::from_f64(v)
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(v.to_string())),
    }
}

pub fn scalar_from_json<T: Real>(v: &Value) -> Result<T> {
    let s = match v {
        Value::String(s) => Scalar::parse(s, T::MODE)?,
        Value::Number(n) => {
            let x = n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("number out of range: {n}")))?;
            match T::MODE {
                Mode::Float => Scalar::Float(x),
                Mode::Exact => Scalar::Exact(Dyadic::from_f64(x)?),
            }
        }
        other => return Err(Error::Parse(format!("expected a number, got {other}"))),
    };
    T::from_scalar(&s)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

pub fn mode_of(doc: &Value) -> Result<Mode> {
    match doc.get("mode") {
        None => Ok(Mode::Float),
        Some(m) => serde_json::from_value(m.clone()).map_err(|_| Error::Parse(format!("unknown mode {m}"))),
    }
}

fn pair_to_json<T: Real>(v: &Vec2<T>) -> Value {
    Value::Array(vec![scalar_to_json(&v.x1), scalar_to_json(&v.x2)])
}

fn pair_from_json<T: Real>(v: &Value) -> Result<Vec2<T>> {
    match array(v, "a point")?.as_slice() {
        [a, b] => Ok(Vec2::new(scalar_from_json(a)?, scalar_from_json(b)?)),
        _ => Err(Error::Parse("a point needs exactly two coordinates".into())),
    }
}

pub fn path_to_json<T: Real>(p: &PLPath2<T>) -> Value {
    json!({
        "times": p.times().iter().map(scalar_to_json).collect::<Vec<_>>(),
        "values": p.values().iter().map(pair_to_json).collect::<Vec<_>>(),
    })
}

pub fn path_from_json<T: Real>(v: &Value) -> Result<PLPath2<T>> {
    let times = array(field(v, "times")?, "times")?
        .iter()
        .map(scalar_from_json)
        .collect::<Result<Vec<T>>>()?;
    let values = array(field(v, "values")?, "values")?
        .iter()
        .map(pair_from_json)
        .collect::<Result<Vec<_>>>()?;
    PLPath2::new(times, values)
}

pub fn path1_to_json<T: Real>(p: &PLPath1<T>) -> Value {
    json!({
        "times": p.times().iter().map(scalar_to_json).collect::<Vec<_>>(),
        "values": p.values().iter().map(scalar_to_json).collect::<Vec<_>>(),
    })
}

/// A standalone path document with its mode.
pub fn path_document<T: Real>(p: &PLPath2<T>) -> Value {
    let mut doc = path_to_json(p);
    doc["mode"] = json!(T::MODE);
    doc
}

pub fn matrix_to_json<T: Real>(r: &ReflectionMatrix2<T>) -> Value {
    Value::Array(vec![scalar_to_json(&r.a1), scalar_to_json(&r.a2)])
}

pub fn matrix_from_json<T: Real>(v: &Value) -> Result<ReflectionMatrix2<T>> {
    let p = pair_from_json(v)?;
    Ok(ReflectionMatrix2::new(p.x1, p.x2))
}

pub fn triple_to_json<T: Real>(t: &SolutionTriple<T>) -> Value {
    let mut doc = json!({
        "mode": T::MODE,
        "matrix": matrix_to_json(&t.r),
        "f": path_to_json(&t.f),
        "g": path_to_json(&t.g),
        "m": path_to_json(&t.m),
    });
    if let Some(b) = &t.tail_bound {
        doc["tail_bound"] = scalar_to_json(b);
    }
    doc
}

/// Reads a triple; `matrix` overrides (or supplies) the document's matrix.
pub fn triple_from_json<T: Real>(v: &Value, matrix: Option<&ReflectionMatrix2<T>>) -> Result<SolutionTriple<T>> {
    let r = match (matrix, v.get("matrix")) {
        (Some(r), _) => r.clone(),
        (None, Some(m)) => matrix_from_json(m)?,
        (None, None) => return Err(Error::Usage("no reflection matrix given".into())),
    };
    let tail_bound = match v.get("tail_bound") {
        None | Some(Value::Null) => None,
        Some(b) => Some(scalar_from_json(b)?),
    };
    Ok(SolutionTriple {
        r,
        f: path_from_json(field(v, "f")?)?,
        g: path_from_json(field(v, "g")?)?,
        m: path_from_json(field(v, "m")?)?,
        tail_bound,
    })
}

pub fn solve_result_to_json(r: &ReflectionMatrix2<f64>, f: &PLPath2<f64>, res: &SolveResult) -> Value {
    let mut doc = triple_to_json(&res.triple(r, f));
    doc["iterations"] = json!(res.iterations);
    doc["converged"] = json!(res.converged);
    doc["residual"] = scalar_to_json(&res.residual);
    doc
}

pub fn bundle_to_json<T: Real>(b: &CounterexampleBundle<T>) -> Value {
    json!({
        "mode": T::MODE,
        "matrix": matrix_to_json(&b.r),
        "depth": b.depth,
        "tail_bound": scalar_to_json(&b.tail_bound),
        "u": path_to_json(&b.u),
        "m": path_to_json(&b.decomp.m),
        "mbar": path_to_json(&b.decomp.mbar),
        "f": path_to_json(&b.f),
        "g": path_to_json(&b.g),
        "gbar": path_to_json(&b.gbar),
    })
}

pub fn any_bundle_to_json(b: &AnyBundle) -> Value {
    match b {
        AnyBundle::Exact(b) => bundle_to_json(b),
        AnyBundle::Float(b) => bundle_to_json(b),
    }
}

pub fn report_to_json<T: Real>(r: &VerificationReport<T>) -> Value {
    let mut doc = json!({
        "pass": r.pass,
        "represented_pass": r.represented_pass,
        "failures": r.failures,
        "eq_residual": scalar_to_json(&r.eq_residual),
        "min_g": scalar_to_json(&r.min_g),
        "m_start": scalar_to_json(&r.m_start),
        "monotone_violation": scalar_to_json(&r.monotone_violation),
        "comp_integrals": [scalar_to_json(&r.comp_integrals[0]), scalar_to_json(&r.comp_integrals[1])],
        "m_variation": scalar_to_json(&r.m_variation),
        "strict_violations": r.strict_violations,
        "tol": scalar_to_json(&r.tol),
    });
    if let Some(b) = &r.tail_bound {
        doc["tail_bound"] = scalar_to_json(b);
    }
    doc
}

pub fn classification_to_json<T: Real>(r: &ReflectionMatrix2<T>, c: &Classification<T>) -> Value {
    let mut radius = Map::new();
    radius.insert("value".into(), json!(c.radius.value));
    radius.insert(
        "exact".into(),
        c.radius.exact.as_ref().map(scalar_to_json).unwrap_or(Value::Null),
    );
    json!({
        "mode": T::MODE,
        "matrix": matrix_to_json(r),
        "regime": c.regime.label(),
        "unique": c.regime.is_unique(),
        "note": c.regime.uniqueness_note(),
        "completely_s": c.completely_s,
        "spectral_radius": Value::Object(radius),
        "near_boundary": c.near_boundary,
    })
}

pub fn diagnostics_to_json<T: Real>(d: &UniquenessDiagnostics<T>, e2: Option<&E2Check<T>>) -> Value {
    let mut doc = json!({
        "u": path_to_json(&d.u),
        "v": path1_to_json(&d.v),
        "sectors": d.sectors,
        "v_monotone_on_support": d.v_monotone_on_support,
        "first_increase": d.first_increase,
        "max_v": scalar_to_json(&d.max_v),
    });
    if let Some(e) = e2 {
        doc["e2"] = json!({
            "holds": e.holds,
            "first_violation": e.first_violation,
            "worst_excess": scalar_to_json(&e.worst_excess),
        });
    }
    doc
}

/// A triple whose mode is known only at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyTriple {
    Exact(SolutionTriple<Dyadic>),
    Float(SolutionTriple<f64>),
}

impl AnyTriple {
    /// Reads a triple in the document's mode; `matrix` is parsed in that
    /// mode and overrides the document's matrix.
    pub fn from_json(v: &Value, matrix: Option<(&str, &str)>) -> Result<AnyTriple> {
        fn read<T: Real>(v: &Value, matrix: Option<(&str, &str)>) -> Result<SolutionTriple<T>> {
            let r = match matrix {
                None => None,
                Some((a1, a2)) => Some(ReflectionMatrix2::new(
                    T::from_scalar(&Scalar::parse(a1, T::MODE)?)?,
                    T::from_scalar(&Scalar::parse(a2, T::MODE)?)?,
                )),
            };
            triple_from_json(v, r.as_ref())
        }
        Ok(match mode_of(v)? {
            Mode::Exact => AnyTriple::Exact(read(v, matrix)?),
            Mode::Float => AnyTriple::Float(read(v, matrix)?),
        })
    }

    pub fn mode(&self) -> Mode {
        match self {
            AnyTriple::Exact(_) => Mode::Exact,
            AnyTriple::Float(_) => Mode::Float,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyTriple::Exact(t) => triple_to_json(t),
            AnyTriple::Float(t) => triple_to_json(t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::build_counterexample;

    #[test]
    fn exact_numbers_are_decimal_strings() {
        let x: Dyadic = "-3/8".parse().unwrap();
        assert_eq!(scalar_to_json(&x), json!("-0.375"));
        assert_eq!(scalar_from_json::<Dyadic>(&json!("-0.375")).unwrap(), x);
        assert_eq!(scalar_from_json::<Dyadic>(&json!(-0.375)).unwrap(), x);
        assert_eq!(scalar_from_json::<Dyadic>(&json!("-3/8")).unwrap(), x);
        assert!(scalar_from_json::<Dyadic>(&json!("0.1")).is_err());
        assert_eq!(scalar_from_json::<f64>(&json!("0.1")).unwrap(), 0.1);
        assert_eq!(scalar_to_json(&0.25f64), json!(0.25));
        assert!(scalar_from_json::<f64>(&json!(true)).is_err());
    }

    #[test]
    fn bundle_triples_round_trip() {
        let b = build_counterexample(&Dyadic::from_i64(-2), 40).unwrap();
        for t in [b.triple(), b.triple_bar()] {
            let text = serde_json::to_string(&triple_to_json(&t)).unwrap();
            let back: Value = serde_json::from_str(&text).unwrap();
            assert_eq!(mode_of(&back).unwrap(), Mode::Exact);
            assert_eq!(triple_from_json::<Dyadic>(&back, None).unwrap(), t);
            assert_eq!(AnyTriple::from_json(&back, None).unwrap(), AnyTriple::Exact(t));
        }
    }

    #[test]
    fn float_triple_round_trip_and_matrix_override() {
        let b = build_counterexample(&-3.0f64, 12).unwrap();
        let t = b.triple();
        let doc = triple_to_json(&t);
        assert_eq!(triple_from_json::<f64>(&doc, None).unwrap(), t);
        let AnyTriple::Float(o) = AnyTriple::from_json(&doc, Some(("-1", "1/2"))).unwrap() else {
            panic!("mode changed")
        };
        assert_eq!(o.r, ReflectionMatrix2::new(-1.0, 0.5));
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(path_from_json::<f64>(&json!({"times": [0]})), Err(Error::Parse(_))));
        assert!(matches!(
            path_from_json::<f64>(&json!({"times": [0, 1], "values": [[0, 0], [1]]})),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            path_from_json::<f64>(&json!({"times": [1, 0], "values": [[0, 0], [1, 1]]})),
            Err(Error::InvalidPath(_))
        ));
        assert!(matches!(mode_of(&json!({"mode": "fuzzy"})), Err(Error::Parse(_))));
        let no_matrix = json!({"f": {"times": [0], "values": [[0, 0]]}});
        assert!(matches!(triple_from_json::<f64>(&no_matrix, None), Err(Error::Usage(_))));
    }
}
