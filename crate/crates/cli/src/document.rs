//! The on-disk document format.
//!
//! Every input is a single versioned UTF-8 JSON document with top-level
//! fields `{version, kind, shape?, data}`. Complex numbers are always
//! two-element `[re, im]` arrays of decimal floats and matrices are
//! row-major nested arrays.
//!
//! * `state`: `shape` lists the block dimensions, `data.blocks` the
//!   per-block matrices.
//! * `channel`: `data` is `{shape_in, shape_out, kraus: [matrix, ...]}`.
//! * `coupling`: `data` is `{shape_a, shape_b, omega: matrix}`.
//! * `ensemble`: `shape` plus `data.weights` and `data.states` (each a
//!   list of block matrices), optionally `data.average`.
//!
//! Parsing validates all domain invariants (PSD blocks, unit trace,
//! trace-preserving Kraus sets, compound-density membership); violations
//! surface as semantic failures naming the invariant, distinct from
//! syntax errors.

use crate::error::CliError;
use qent_core::coupling::Ensemble;
use qent_core::matcore::{CMatrix, C64};
use qent_core::{AlgebraState, BlockShape, Channel, Coupling};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Serialize, Deserialize)]
pub struct RawDocument {
    pub version: u64,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<usize>>,
    pub data: Value,
}

#[derive(Debug)]
pub enum ParsedDocument {
    State(AlgebraState),
    Channel(Channel),
    Coupling(Coupling),
    Ensemble(Ensemble),
}

impl ParsedDocument {
    /// Total embedded dimension, checked against the dimension guard.
    pub fn embedded_dim(&self) -> usize {
        match self {
            ParsedDocument::State(s) => s.shape().total_dim(),
            ParsedDocument::Channel(ch) => {
                ch.shape_in().total_dim().max(ch.shape_out().total_dim())
            }
            ParsedDocument::Coupling(c) => c.shape_a().total_dim() * c.shape_b().total_dim(),
            ParsedDocument::Ensemble(e) => e.shape().total_dim(),
        }
    }
}

fn complex_from_value(v: &Value, what: &str) -> Result<C64, CliError> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| CliError::parse(format!("{what}: complex entries must be [re, im]")))?;
    let re = arr[0]
        .as_f64()
        .ok_or_else(|| CliError::parse(format!("{what}: non-numeric real part")))?;
    let im = arr[1]
        .as_f64()
        .ok_or_else(|| CliError::parse(format!("{what}: non-numeric imaginary part")))?;
    Ok(C64::new(re, im))
}

fn matrix_from_value(v: &Value, what: &str) -> Result<CMatrix, CliError> {
    let rows = v
        .as_array()
        .ok_or_else(|| CliError::parse(format!("{what}: matrix must be an array of rows")))?;
    if rows.is_empty() {
        return Err(CliError::parse(format!("{what}: matrix has no rows")));
    }
    let ncols = rows[0]
        .as_array()
        .ok_or_else(|| CliError::parse(format!("{what}: rows must be arrays")))?
        .len();
    let mut data = Vec::with_capacity(rows.len() * ncols);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| CliError::parse(format!("{what}: row {i} is not an array")))?;
        if row.len() != ncols {
            return Err(CliError::parse(format!(
                "{what}: row {i} has {} entries, expected {ncols}",
                row.len()
            )));
        }
        for entry in row {
            data.push(complex_from_value(entry, what)?);
        }
    }
    CMatrix::from_entries(rows.len(), ncols, data)
        .map_err(|e| CliError::semantic(format!("{what}: {e}")))
}

#[allow(dead_code)] // exercised by the round-trip tests
pub fn matrix_to_value(m: &CMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            let row: Vec<Value> = (0..m.cols())
                .map(|j| {
                    let z = m[(i, j)];
                    Value::Array(vec![json_num(z.re), json_num(z.im)])
                })
                .collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

#[allow(dead_code)]
fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn shape_from(dims: &[usize], what: &str) -> Result<BlockShape, CliError> {
    BlockShape::new(dims.to_vec()).map_err(|e| CliError::semantic(format!("{what}: {e}")))
}

fn field<'a>(data: &'a Value, name: &str, kind: &str) -> Result<&'a Value, CliError> {
    data.get(name)
        .ok_or_else(|| CliError::parse(format!("{kind} document is missing data.{name}")))
}

fn usize_list(v: &Value, what: &str) -> Result<Vec<usize>, CliError> {
    v.as_array()
        .ok_or_else(|| CliError::parse(format!("{what} must be an array")))?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| CliError::parse(format!("{what} entries must be nonneg integers")))
        })
        .collect()
}

fn blocks_from_value(v: &Value, shape: &BlockShape, what: &str) -> Result<AlgebraState, CliError> {
    let blocks_raw = v
        .as_array()
        .ok_or_else(|| CliError::parse(format!("{what}: blocks must be an array")))?;
    if blocks_raw.len() != shape.num_blocks() {
        return Err(CliError::semantic(format!(
            "{what}: {} blocks given for a shape with {}",
            blocks_raw.len(),
            shape.num_blocks()
        )));
    }
    let mut blocks = Vec::with_capacity(blocks_raw.len());
    for (i, b) in blocks_raw.iter().enumerate() {
        let m = matrix_from_value(b, &format!("{what} block {i}"))?;
        if m.rows() != shape.dims()[i] || m.cols() != shape.dims()[i] {
            return Err(CliError::semantic(format!(
                "{what}: block {i} is {}x{}, shape demands {0}x{0}",
                shape.dims()[i],
                m.rows()
            )));
        }
        blocks.push(m);
    }
    AlgebraState::from_blocks(blocks).map_err(|e| CliError::semantic(format!("{what}: {e}")))
}

/// Parses and validates a document from its textual form.
pub fn parse_document(text: &str) -> Result<ParsedDocument, CliError> {
    let raw: RawDocument =
        serde_json::from_str(text).map_err(|e| CliError::parse(format!("syntax: {e}")))?;
    if raw.version != FORMAT_VERSION {
        return Err(CliError::parse(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            raw.version
        )));
    }
    match raw.kind.as_str() {
        "state" => {
            let dims = raw
                .shape
                .ok_or_else(|| CliError::parse("state document needs a top-level shape".into()))?;
            let shape = shape_from(&dims, "state")?;
            let blocks = field(&raw.data, "blocks", "state")?;
            Ok(ParsedDocument::State(blocks_from_value(
                blocks, &shape, "state",
            )?))
        }
        "channel" => {
            let shape_in = shape_from(&usize_list(field(&raw.data, "shape_in", "channel")?, "shape_in")?, "channel")?;
            let shape_out = shape_from(&usize_list(field(&raw.data, "shape_out", "channel")?, "shape_out")?, "channel")?;
            let kraus_raw = field(&raw.data, "kraus", "channel")?
                .as_array()
                .ok_or_else(|| CliError::parse("channel kraus must be an array".into()))?;
            let mut kraus = Vec::with_capacity(kraus_raw.len());
            for (j, k) in kraus_raw.iter().enumerate() {
                kraus.push(matrix_from_value(k, &format!("kraus operator {j}"))?);
            }
            Channel::from_kraus(kraus, shape_in, shape_out)
                .map(ParsedDocument::Channel)
                .map_err(|e| CliError::semantic(format!("channel: {e}")))
        }
        "coupling" => {
            let shape_a = shape_from(&usize_list(field(&raw.data, "shape_a", "coupling")?, "shape_a")?, "coupling")?;
            let shape_b = shape_from(&usize_list(field(&raw.data, "shape_b", "coupling")?, "shape_b")?, "coupling")?;
            let omega = matrix_from_value(field(&raw.data, "omega", "coupling")?, "coupling omega")?;
            Coupling::new(shape_a, shape_b, omega)
                .map(ParsedDocument::Coupling)
                .map_err(|e| CliError::semantic(format!("coupling: {e}")))
        }
        "ensemble" => {
            let dims = raw.shape.ok_or_else(|| {
                CliError::parse("ensemble document needs a top-level shape".into())
            })?;
            let shape = shape_from(&dims, "ensemble")?;
            let weights: Vec<f64> = field(&raw.data, "weights", "ensemble")?
                .as_array()
                .ok_or_else(|| CliError::parse("ensemble weights must be an array".into()))?
                .iter()
                .map(|w| {
                    w.as_f64()
                        .ok_or_else(|| CliError::parse("ensemble weights must be numbers".into()))
                })
                .collect::<Result<_, _>>()?;
            let states_raw = field(&raw.data, "states", "ensemble")?
                .as_array()
                .ok_or_else(|| CliError::parse("ensemble states must be an array".into()))?;
            let mut states = Vec::with_capacity(states_raw.len());
            for (n, s) in states_raw.iter().enumerate() {
                states.push(blocks_from_value(s, &shape, &format!("ensemble state {n}"))?);
            }
            let average = match raw.data.get("average") {
                Some(avg) => Some(blocks_from_value(avg, &shape, "ensemble average")?),
                None => None,
            };
            Ensemble::with_average(weights, states, average.as_ref())
                .map(ParsedDocument::Ensemble)
                .map_err(|e| CliError::semantic(format!("ensemble: {e}")))
        }
        other => Err(CliError::parse(format!(
            "unknown document kind {other:?} (state, channel, coupling, ensemble)"
        ))),
    }
}

/// Serializes a domain object back into document form.
#[allow(dead_code)] // exercised by the round-trip tests
pub fn serialize_document(doc: &ParsedDocument) -> String {
    let raw = match doc {
        ParsedDocument::State(s) => RawDocument {
            version: FORMAT_VERSION,
            kind: "state".into(),
            shape: Some(s.shape().dims().to_vec()),
            data: serde_json::json!({
                "blocks": s.blocks().iter().map(matrix_to_value).collect::<Vec<_>>(),
            }),
        },
        ParsedDocument::Channel(ch) => RawDocument {
            version: FORMAT_VERSION,
            kind: "channel".into(),
            shape: None,
            data: serde_json::json!({
                "shape_in": ch.shape_in().dims(),
                "shape_out": ch.shape_out().dims(),
                "kraus": ch.kraus().iter().map(matrix_to_value).collect::<Vec<_>>(),
            }),
        },
        ParsedDocument::Coupling(c) => RawDocument {
            version: FORMAT_VERSION,
            kind: "coupling".into(),
            shape: None,
            data: serde_json::json!({
                "shape_a": c.shape_a().dims(),
                "shape_b": c.shape_b().dims(),
                "omega": matrix_to_value(c.omega()),
            }),
        },
        ParsedDocument::Ensemble(e) => RawDocument {
            version: FORMAT_VERSION,
            kind: "ensemble".into(),
            shape: Some(e.shape().dims().to_vec()),
            data: serde_json::json!({
                "weights": e.weights(),
                "states": e
                    .states()
                    .iter()
                    .map(|s| s.blocks().iter().map(matrix_to_value).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            }),
        },
    };
    serde_json::to_string_pretty(&raw).expect("document serialization cannot fail")
}

pub fn load_document(path: &std::path::Path) -> Result<ParsedDocument, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    parse_document(&text)
}
