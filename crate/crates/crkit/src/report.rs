//! Versioned JSON reports and their flat CSV form.
//!
//! Floats are written with 17 significant digits so that every value reads
//! back bitwise; non-finite floats become `null`.

use std::io::{self, Write};

use crkit_core::series::{LaurentSeries, PowerSeries};
use crkit_core::{ResidualReport, C64};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cgrid::fmt_f64;

pub const SCHEMA: &str = "crkit-report-1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

/// Top-level report object shared by every command.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub status: Status,
    pub tolerance: Option<f64>,
    pub data: Value,
}

impl Report {
    pub fn new(command: impl Into<String>, data: Value) -> Self {
        Self { schema: SCHEMA, command: command.into(), status: Status::Info, tolerance: None, data }
    }

    /// Marks the report as passing iff `measured <= tol`.
    pub fn gated(mut self, measured: f64, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self.status = if measured <= tol { Status::Pass } else { Status::Fail };
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn to_json(&self) -> String {
        let mut out = Vec::new();
        write_json(&mut out, self).expect("writing to a Vec cannot fail");
        String::from_utf8(out).expect("serde_json emits UTF-8")
    }

    /// `key,value` rows, one per leaf of the report, keys joined with `.`.
    pub fn to_csv(&self) -> String {
        let value = serde_json::to_value(self).expect("report serialises");
        let mut rows = Vec::new();
        flatten("", &value, &mut rows);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["key", "value"]).expect("in-memory csv");
        for (k, v) in rows {
            w.write_record([k, v]).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv emits UTF-8")
    }
}

struct Float17;

impl serde_json::ser::Formatter for Float17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            w.write_all(fmt_f64(value).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }
}

/// Pretty-free JSON with 17-significant-digit floats and a trailing newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut w, Float17);
    value.serialize(&mut ser).map_err(io::Error::other)?;
    w.write_all(b"\n")
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::Number(n) => {
            let s = match n.as_f64() {
                Some(x) if !(n.is_i64() || n.is_u64()) => fmt_f64(x),
                _ => n.to_string(),
            };
            out.push((prefix.to_string(), s));
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Null => out.push((prefix.to_string(), String::new())),
    }
}

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

/// Flat object with keys max_abs, l2, num_points, worst_re, worst_im, spacing.
pub fn residual(r: &ResidualReport) -> Value {
    json!({
        "max_abs": r.max_abs,
        "l2": r.l2,
        "num_points": r.num_points,
        "worst_re": r.worst_point.re,
        "worst_im": r.worst_point.im,
        "spacing": r.spacing,
    })
}

/// Series in the exchange format: center, min_index and `[re, im]` coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct SeriesJson {
    pub center: [f64; 2],
    pub min_index: i64,
    pub coeffs: Vec<[f64; 2]>,
}

impl SeriesJson {
    pub fn from_power(s: &PowerSeries) -> Self {
        Self::from_laurent(&s.to_laurent())
    }

    pub fn from_laurent(s: &LaurentSeries) -> Self {
        Self {
            center: [s.center.re, s.center.im],
            min_index: s.min_index(),
            coeffs: s.coeffs().iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn to_laurent(&self) -> LaurentSeries {
        LaurentSeries::new(self.center(), self.min_index, self.coeffs())
    }

    /// The power series `sum c_j (w - center)^(min_index + j)`; negative
    /// indices are rejected.
    pub fn to_power(&self) -> anyhow::Result<PowerSeries> {
        anyhow::ensure!(self.min_index >= 0, "power series needs min_index >= 0, got {}", self.min_index);
        let mut coeffs = vec![C64::default(); self.min_index as usize];
        coeffs.extend(self.coeffs());
        Ok(PowerSeries::new(self.center(), coeffs)?)
    }

    fn center(&self) -> C64 {
        C64::new(self.center[0], self.center[1])
    }

    fn coeffs(&self) -> Vec<C64> {
        self.coeffs.iter().map(|&[re, im]| C64::new(re, im)).collect()
    }
}

pub fn series(s: &PowerSeries) -> Value {
    serde_json::to_value(SeriesJson::from_power(s)).expect("series serialises")
}
