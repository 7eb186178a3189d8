//! Deterministic report rendering.
//!
//! Reports are ordered key-value sequences. The default rendering is
//! human-readable `key = value` lines; `--json` emits the same keys as a
//! single JSON object. Numeric values carry 9 significant digits in both
//! renderings, and `--bits` divides nat-valued entries by ln 2 at display
//! time.

use qent_core::matcore::CMatrix;
use qent_core::AlgebraState;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Nats,
    Bits,
}

#[derive(Debug, Clone)]
enum Entry {
    /// Value in nats, rescaled under `--bits`.
    Info(f64),
    Int(u64),
    Flag(bool),
    Text(String),
    Blocks(Vec<CMatrix>),
}

#[derive(Debug, Default)]
pub struct Report {
    entries: Vec<(String, Entry)>,
}

/// Formats with 9 significant digits, decimal notation when the exponent
/// allows, scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{:.8e}", x);
    let (mant, exp) = s.split_once('e').expect("exponential format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let mant_f: f64 = mant.parse().expect("mantissa");
        trim_zeros(format!("{:.*}", decimals, mant_f * 10f64.powi(exp)))
    } else {
        format!("{}e{}", trim_zeros(mant.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// Rounds to the 9 significant digits that `fmt_sig` would print.
fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.8e}", x).parse().expect("roundtrip parse")
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report::default();
        r.entries
            .push(("command".into(), Entry::Text(command.into())));
        r
    }

    pub fn info(&mut self, key: &str, nats: f64) -> &mut Self {
        self.entries.push((key.into(), Entry::Info(nats)));
        self
    }

    pub fn int(&mut self, key: &str, value: u64) -> &mut Self {
        self.entries.push((key.into(), Entry::Int(value)));
        self
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.entries.push((key.into(), Entry::Flag(value)));
        self
    }

    pub fn text(&mut self, key: &str, value: &str) -> &mut Self {
        self.entries.push((key.into(), Entry::Text(value.into())));
        self
    }

    pub fn state(&mut self, key: &str, s: &AlgebraState) -> &mut Self {
        self.entries
            .push((key.into(), Entry::Blocks(s.blocks().to_vec())));
        self
    }

    fn scaled(&self, e: &Entry, units: Units) -> Entry {
        match (e, units) {
            (Entry::Info(v), Units::Bits) => Entry::Info(v / std::f64::consts::LN_2),
            other => other.0.clone(),
        }
    }

    pub fn render_human(&self, units: Units) -> String {
        let mut out = String::new();
        for (key, entry) in &self.entries {
            let line = match self.scaled(entry, units) {
                Entry::Info(v) => format!("{key} = {}", fmt_sig(v)),
                Entry::Int(v) => format!("{key} = {v}"),
                Entry::Flag(v) => format!("{key} = {v}"),
                Entry::Text(v) => format!("{key} = {v}"),
                Entry::Blocks(blocks) => format!("{key} = {}", blocks_human(&blocks)),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str(&format!("units = {}\n", units_name(units)));
        out
    }

    pub fn render_json(&self, units: Units) -> String {
        let mut map = Map::new();
        for (key, entry) in &self.entries {
            let value = match self.scaled(entry, units) {
                Entry::Info(v) => num_value(v),
                Entry::Int(v) => Value::Number(v.into()),
                Entry::Flag(v) => Value::Bool(v),
                Entry::Text(v) => Value::String(v),
                Entry::Blocks(blocks) => {
                    Value::Array(blocks.iter().map(rounded_matrix_value).collect())
                }
            };
            map.insert(key.clone(), value);
        }
        map.insert(
            "units".into(),
            Value::String(units_name(units).to_string()),
        );
        let mut text = serde_json::to_string_pretty(&Value::Object(map))
            .expect("report serialization cannot fail");
        text.push('\n');
        text
    }
}

fn units_name(units: Units) -> &'static str {
    match units {
        Units::Nats => "nats",
        Units::Bits => "bits",
    }
}

fn num_value(v: f64) -> Value {
    if v.is_finite() {
        serde_json::Number::from_f64(round_sig(v))
            .map(Value::Number)
            .unwrap_or(Value::Null)
    } else {
        // JSON has no infinities; report them as strings.
        Value::String(fmt_sig(v))
    }
}

fn rounded_matrix_value(m: &CMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            let row: Vec<Value> = (0..m.cols())
                .map(|j| {
                    let z = m[(i, j)];
                    Value::Array(vec![num_value(z.re), num_value(z.im)])
                })
                .collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

fn blocks_human(blocks: &[CMatrix]) -> String {
    let rendered: Vec<String> = blocks
        .iter()
        .map(|m| {
            let rows: Vec<String> = (0..m.rows())
                .map(|i| {
                    let cols: Vec<String> = (0..m.cols())
                        .map(|j| {
                            let z = m[(i, j)];
                            format!("[{}, {}]", fmt_sig(z.re), fmt_sig(z.im))
                        })
                        .collect();
                    format!("[{}]", cols.join(", "))
                })
                .collect();
            format!("[{}]", rows.join(", "))
        })
        .collect();
    format!("[{}]", rendered.join(", "))
}
