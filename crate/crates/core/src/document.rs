//! The JSON interchange format for algebroids. Indices are 1-based; values
//! are expression strings over the declared coordinates or integers.

use leibniz_scalar::{parse_scalar, Budget, Matrix, Scalar};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebroid::Algebroid;
use crate::array::SparseArray;
use crate::connection::{Connection, Metric};
use crate::error::{GeomError, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Expr {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Entry {
    idx: Vec<usize>,
    val: Expr,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    dimension: usize,
    rank: usize,
    coordinates: Vec<String>,
    anchor: Vec<Vec<Expr>>,
    #[serde(default)]
    gamma: Vec<Entry>,
    #[serde(rename = "L", default)]
    loc: Vec<Entry>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    proj: Option<Vec<Vec<Expr>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metric: Option<Vec<Vec<Expr>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    connection: Option<Vec<Entry>>,
}

/// An algebroid with its optional metric and connection blocks.
#[derive(Clone, Debug)]
pub struct Document {
    pub algebroid: Algebroid,
    pub metric: Option<Metric>,
    pub connection: Option<Connection>,
}

fn parse_expr(e: &Expr, coords: &[String], at: &str) -> Result<Scalar> {
    match e {
        Expr::Int(k) => Ok(Scalar::from_int(*k)),
        Expr::Text(s) => parse_scalar(s, coords).map_err(|err| GeomError::Document(format!("{at}: {err}"))),
    }
}

fn parse_matrix(m: &[Vec<Expr>], rows: usize, cols: usize, coords: &[String], name: &str) -> Result<Matrix> {
    if m.len() != rows || m.iter().any(|row| row.len() != cols) {
        return Err(GeomError::Document(format!("{name} must be {rows}x{cols}")));
    }
    m.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, e)| parse_expr(e, coords, &format!("{name}[{}][{}]", i + 1, j + 1)))
                .collect()
        })
        .collect()
}

fn parse_sparse(entries: &[Entry], r: usize, order: usize, coords: &[String], name: &str) -> Result<SparseArray> {
    let mut out = SparseArray::new(&vec![r; order]);
    for (k, e) in entries.iter().enumerate() {
        let at = format!("{name}[{k}]");
        if e.idx.len() != order || e.idx.iter().any(|&i| i == 0 || i > r) {
            return Err(GeomError::Document(format!("{at}: index must be {order} values in 1..={r}")));
        }
        let idx: Vec<usize> = e.idx.iter().map(|i| i - 1).collect();
        out.add_to(&idx, &parse_expr(&e.val, coords, &at)?);
    }
    Ok(out)
}

fn expr(s: &Scalar, coords: &[String]) -> Expr {
    let int = s
        .as_rational()
        .filter(|q| q.is_integer())
        .and_then(|q| q.numer().to_string().parse::<i64>().ok());
    match int {
        Some(k) => Expr::Int(k),
        None => Expr::Text(s.to_expr(coords)),
    }
}

fn matrix_out(m: &Matrix, coords: &[String]) -> Vec<Vec<Expr>> {
    m.iter().map(|row| row.iter().map(|s| expr(s, coords)).collect()).collect()
}

/// Sparse entries in index order with 1-based indices.
pub fn sparse_json(t: &SparseArray, coords: &[String]) -> Value {
    serde_json::to_value(sparse_out(t, coords)).expect("serializable")
}

fn sparse_out(t: &SparseArray, coords: &[String]) -> Vec<Entry> {
    t.iter()
        .map(|(idx, v)| Entry {
            idx: idx.iter().map(|i| i + 1).collect(),
            val: expr(v, coords),
        })
        .collect()
}

impl Document {
    pub fn new(algebroid: Algebroid) -> Self {
        Document {
            algebroid,
            metric: None,
            connection: None,
        }
    }

    pub fn parse(text: &str, budget: &Budget) -> Result<Document> {
        let raw: Raw = serde_json::from_str(text).map_err(|e| GeomError::Document(e.to_string()))?;
        let (n, r) = (raw.dimension, raw.rank);
        if raw.coordinates.len() != n {
            return Err(GeomError::Document(format!("expected {n} coordinate names")));
        }
        let coords = raw.coordinates.clone();
        let anchor = parse_matrix(&raw.anchor, n, r, &coords, "anchor")?;
        let gamma = parse_sparse(&raw.gamma, r, 3, &coords, "gamma")?;
        let loc = parse_sparse(&raw.loc, r, 4, &coords, "L")?;
        let proj = match &raw.proj {
            Some(p) => Some(parse_matrix(p, r, r, &coords, "P")?),
            None => None,
        };
        let metric = match &raw.metric {
            Some(m) => Some(Metric::new(parse_matrix(m, r, r, &coords, "metric")?, budget)?),
            None => None,
        };
        let connection = match &raw.connection {
            Some(c) => Some(Connection::new(parse_sparse(c, r, 3, &coords, "connection")?)?),
            None => None,
        };
        let algebroid = Algebroid::new(coords, r, anchor, gamma, loc, proj)?;
        Ok(Document {
            algebroid,
            metric,
            connection,
        })
    }

    pub fn to_json(&self) -> Value {
        let alg = &self.algebroid;
        let coords = alg.coords();
        let raw = Raw {
            dimension: alg.dim(),
            rank: alg.rank(),
            coordinates: coords.to_vec(),
            anchor: matrix_out(alg.anchor(), coords),
            gamma: sparse_out(alg.gamma(), coords),
            loc: sparse_out(alg.loc(), coords),
            proj: alg.proj().map(|p| matrix_out(p, coords)),
            metric: self.metric.as_ref().map(|m| matrix_out(m.g(), coords)),
            connection: self.connection.as_ref().map(|c| sparse_out(c.coeff(), coords)),
        };
        serde_json::to_value(raw).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"dimension":1,"rank":1,"coordinates":["t"],"anchor":[["t^2"]],
            "gamma":[{"idx":[1,1,1],"val":0}],"metric":[[2]],"connection":[{"idx":[1,1,1],"val":"1/t"}]}"#;
        let doc = Document::parse(text, &Budget::default()).unwrap();
        let again = Document::parse(&doc.to_json().to_string(), &Budget::default()).unwrap();
        assert_eq!(doc.to_json(), again.to_json());
        assert_eq!(doc.connection.unwrap().get(0, 0, 0).to_expr(&["t".into()]), "1/t");
    }

    #[test]
    fn rejects_bad_index() {
        let text = r#"{"dimension":1,"rank":1,"coordinates":["x"],"anchor":[[1]],"gamma":[{"idx":[0,1,1],"val":1}]}"#;
        assert!(matches!(Document::parse(text, &Budget::default()), Err(GeomError::Document(_))));
    }

    #[test]
    fn parse_error_carries_position() {
        let text = r#"{"dimension":1,"rank":1,"coordinates":["x1"],"anchor":[["x1^"]]}"#;
        let err = Document::parse(text, &Budget::default()).unwrap_err().to_string();
        assert!(err.contains("position"), "{err}");
    }
}
