//! JSON file formats for modules, frescos, vectors and lattices.

use abcalc_core::abalg::LinearFactor;
use abcalc_core::abmod::{Lattice, ModulePresentation, ModuleVector, SeriesMatrix};
use abcalc_core::fresco::FactoredFresco;
use abcalc_core::series::{int, parse_rational};
use abcalc_core::{Rational, TruncSeries};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

pub type SeriesJson = Vec<String>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleJson {
    pub rank: usize,
    pub b_order: usize,
    pub amat: Vec<Vec<SeriesJson>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorJson {
    pub lambda: String,
    #[serde(rename = "T")]
    pub t: SeriesJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrescoJson {
    pub b_order: usize,
    pub factors: Vec<FactorJson>,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

pub fn rational(text: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| schema(e.to_string()))
}

pub fn series_from_json(coeffs: &[String], order: usize) -> Result<TruncSeries, CliError> {
    if coeffs.len() > order {
        return Err(schema(format!(
            "series has {} coefficients, order is {order}",
            coeffs.len()
        )));
    }
    let c = coeffs
        .iter()
        .map(|s| rational(s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TruncSeries::from_prefix(&c, order))
}

/// Coefficients up to the last nonzero one.
pub fn series_to_json(s: &TruncSeries) -> SeriesJson {
    let c = s.coeffs();
    let len = c.iter().rposition(|x| *x != int(0)).map_or(1, |i| i + 1);
    c.iter().take(len).map(ToString::to_string).collect()
}

pub fn module_from_json(
    m: &ModuleJson,
    order: Option<usize>,
) -> Result<ModulePresentation, CliError> {
    if m.amat.len() != m.rank || m.amat.iter().any(|r| r.len() != m.rank) {
        return Err(schema(format!("amat must be {0}×{0}", m.rank)));
    }
    if m.b_order < 2 {
        return Err(schema("b_order must be at least 2"));
    }
    let rows = m
        .amat
        .iter()
        .map(|r| {
            r.iter()
                .map(|s| series_from_json(s, m.b_order))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let e = ModulePresentation::from_entries(&rows, m.b_order)?;
    Ok(match order {
        Some(n) => e.resize(n),
        None => e,
    })
}

pub fn module_to_json(e: &ModulePresentation) -> ModuleJson {
    let k = e.rank();
    ModuleJson {
        rank: k,
        b_order: e.b_order(),
        amat: (0..k)
            .map(|i| (0..k).map(|j| series_to_json(&e.entry(i, j))).collect())
            .collect(),
    }
}

pub fn fresco_from_json(f: &FrescoJson, order: Option<usize>) -> Result<FactoredFresco, CliError> {
    let n = f.b_order;
    let factors = f
        .factors
        .iter()
        .map(|x| {
            Ok(LinearFactor::new(
                rational(&x.lambda)?,
                series_from_json(&x.t, n)?,
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let fresco = FactoredFresco::new(factors, n)?;
    Ok(match order {
        Some(m) if m < n => fresco.truncate(m)?,
        Some(m) => {
            let padded = fresco
                .factors()
                .iter()
                .map(|x| LinearFactor::new(x.lambda.clone(), x.unit.resize(m)))
                .collect();
            FactoredFresco::new(padded, m)?
        }
        None => fresco,
    })
}

pub fn fresco_to_json(f: &FactoredFresco) -> FrescoJson {
    FrescoJson {
        b_order: f.b_order(),
        factors: f
            .factors()
            .iter()
            .map(|x| FactorJson {
                lambda: x.lambda.to_string(),
                t: series_to_json(&x.unit),
            })
            .collect(),
    }
}

pub fn vector_from_json(v: &Value, rank: usize, order: usize) -> Result<ModuleVector, CliError> {
    let parts: Vec<Vec<String>> =
        serde_json::from_value(v.clone()).map_err(|e| schema(format!("vector: {e}")))?;
    if parts.len() != rank {
        return Err(schema(format!(
            "vector has {} coordinates, module rank is {rank}",
            parts.len()
        )));
    }
    Ok(ModuleVector(
        parts
            .iter()
            .map(|s| series_from_json(s, order))
            .collect::<Result<_, _>>()?,
    ))
}

pub fn vector_to_json(v: &ModuleVector) -> Value {
    json!(v.0.iter().map(series_to_json).collect::<Vec<_>>())
}

pub fn matrix_to_json(m: &SeriesMatrix) -> Value {
    json!(m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(series_to_json).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

pub fn lattice_to_json(l: &Lattice) -> Value {
    json!({ "generators": l.generators().iter().map(vector_to_json).collect::<Vec<_>>() })
}
