//! JSON encoding of closed forms and reduced sums. Rationals are strings
//! `"p/q"` (or `"p"` when integral), never floats.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toricount::{ClosedForm, ConePiece, IntVector, MultiPoly, Rational, ReducedForm};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),

    #[error("integer {0} does not fit in 64 bits")]
    TooLarge(BigInt),

    #[error("invalid rational {0:?}")]
    BadRational(String),

    #[error("inconsistent closed form: {0}")]
    Shape(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosedFormJson {
    pub dimension: usize,
    pub vectors: Vec<Vec<i64>>,
    pub pieces: Vec<PieceJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceJson {
    pub basis: Vec<Vec<i64>>,
    pub offset: Vec<i64>,
    pub poly: Vec<MonomialJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialJson {
    pub exponents: Vec<u32>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedJson {
    pub dimension: usize,
    pub vectors: Vec<Vec<i64>>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub shift: Vec<i64>,
    pub denominators: Vec<FactorJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorJson {
    pub vector: Vec<i64>,
    pub power: u32,
}

fn ints(v: &IntVector) -> Result<Vec<i64>, JsonError> {
    v.components()
        .iter()
        .map(|c| c.to_i64().ok_or_else(|| JsonError::TooLarge(c.clone())))
        .collect()
}

fn ints_all(vs: &[IntVector]) -> Result<Vec<Vec<i64>>, JsonError> {
    vs.iter().map(ints).collect()
}

fn rational_string(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn parse_rational(s: &str) -> Result<Rational, JsonError> {
    let bad = || JsonError::BadRational(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

impl ClosedFormJson {
    pub fn from_closed_form(cf: &ClosedForm) -> Result<Self, JsonError> {
        let pieces = cf
            .pieces
            .iter()
            .map(|p| {
                Ok(PieceJson {
                    basis: ints_all(&p.basis)?,
                    offset: ints(&p.offset)?,
                    poly: p
                        .poly
                        .monomials()
                        .map(|(e, c)| MonomialJson {
                            exponents: e.clone(),
                            coeff: rational_string(c),
                        })
                        .collect(),
                })
            })
            .collect::<Result<_, JsonError>>()?;
        Ok(ClosedFormJson {
            dimension: cf.dim(),
            vectors: ints_all(&cf.source)?,
            pieces,
        })
    }

    pub fn to_closed_form(&self) -> Result<ClosedForm, JsonError> {
        let s = self.dimension;
        let vector = |v: &[i64]| {
            if v.len() == s {
                Ok(IntVector::from_i64s(v))
            } else {
                Err(JsonError::Shape(format!(
                    "vector of length {} in dimension {s}",
                    v.len()
                )))
            }
        };
        let source = self
            .vectors
            .iter()
            .map(|v| vector(v))
            .collect::<Result<Vec<_>, _>>()?;
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                if p.basis.len() != s {
                    return Err(JsonError::Shape(format!(
                        "basis with {} vectors in dimension {s}",
                        p.basis.len()
                    )));
                }
                let poly = MultiPoly::from_monomials(
                    s,
                    p.poly
                        .iter()
                        .map(|m| Ok((m.exponents.clone(), parse_rational(&m.coeff)?)))
                        .collect::<Result<Vec<_>, JsonError>>()?,
                )
                .map_err(|e| JsonError::Shape(e.to_string()))?;
                Ok(ConePiece {
                    basis: p
                        .basis
                        .iter()
                        .map(|b| vector(b))
                        .collect::<Result<_, _>>()?,
                    offset: vector(&p.offset)?,
                    poly,
                })
            })
            .collect::<Result<Vec<_>, JsonError>>()?;
        Ok(ClosedForm { source, pieces })
    }
}

impl ReducedJson {
    pub fn from_reduced(r: &ReducedForm) -> Result<Self, JsonError> {
        let terms = r
            .terms()
            .map(|t| {
                Ok(TermJson {
                    coeff: rational_string(t.coeff()),
                    shift: ints(t.shift())?,
                    denominators: t
                        .denom()
                        .iter()
                        .map(|f| {
                            Ok(FactorJson {
                                vector: ints(&f.vector)?,
                                power: f.power,
                            })
                        })
                        .collect::<Result<_, JsonError>>()?,
                })
            })
            .collect::<Result<_, JsonError>>()?;
        Ok(ReducedJson {
            dimension: r.dim(),
            vectors: ints_all(&r.source)?,
            terms,
        })
    }
}

pub fn render_closed_form(cf: &ClosedForm) -> Result<String, JsonError> {
    Ok(serde_json::to_string_pretty(
        &ClosedFormJson::from_closed_form(cf)?,
    )?)
}

pub fn parse_closed_form(text: &str) -> Result<ClosedForm, JsonError> {
    serde_json::from_str::<ClosedFormJson>(text)?.to_closed_form()
}

pub fn render_reduced(r: &ReducedForm) -> Result<String, JsonError> {
    Ok(serde_json::to_string_pretty(&ReducedJson::from_reduced(
        r,
    )?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use toricount::closed_form;

    #[test]
    fn rationals() {
        let q = parse_rational("-3/6").unwrap();
        assert_eq!(rational_string(&q), "-1/2");
        assert_eq!(rational_string(&parse_rational("4").unwrap()), "4");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn round_trip_structure() {
        let x: Vec<IntVector> = [[1, 0], [0, 1], [-1, 2]]
            .iter()
            .map(|v| IntVector::from_i64s(v))
            .collect();
        let cf = closed_form(&x).unwrap();
        let back = parse_closed_form(&render_closed_form(&cf).unwrap()).unwrap();
        assert_eq!(back, cf);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_shapes() {
        assert!(parse_closed_form(r#"{"dimension":1,"vectors":[[1]],"pieces":[],"x":1}"#).is_err());
        assert!(parse_closed_form(r#"{"dimension":2,"vectors":[[1]],"pieces":[]}"#).is_err());
    }
}
