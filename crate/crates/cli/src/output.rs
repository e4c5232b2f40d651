//! Report rendering, file output and run manifests.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// 17 significant digits, so every value round-trips.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// JSON number with the same text as [`fmt_f64`]; non-finite values become null.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt_f64(x)).expect("formatted float parses"))
    } else {
        Value::Null
    }
}

/// Rewrites every non-integer number in place with [`num`].
pub fn normalize_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64() {
                *v = num(x);
            }
        }
        Value::Array(a) => a.iter_mut().for_each(normalize_numbers),
        Value::Object(o) => o.values_mut().for_each(normalize_numbers),
        _ => {}
    }
}

/// Both renderings of one command's result.
pub struct Report {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(json: Value, header: &[&str]) -> Self {
        Report {
            json,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self, format: Format) -> io::Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut v = self.json.clone();
                normalize_numbers(&mut v);
                let mut out = serde_json::to_vec_pretty(&v)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.into_inner().map_err(|e| e.into_error())
            }
        }
    }
}

#[derive(Serialize)]
struct OutputDigest {
    path: PathBuf,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a [String],
    parameters: Value,
    versions: Map<String, Value>,
    outputs: Vec<OutputDigest>,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes to `out` (stdout if absent); a file output also gets a manifest beside it.
pub fn emit(bytes: &[u8], out: Option<&Path>, command: &[String], parameters: Value) -> io::Result<()> {
    let Some(path) = out else {
        return io::stdout().lock().write_all(bytes);
    };
    fs::write(path, bytes)?;
    let mut versions = Map::new();
    versions.insert("largespin".into(), Value::from(largespin::VERSION));
    versions.insert("largespin-cli".into(), Value::from(env!("CARGO_PKG_VERSION")));
    let mut parameters = parameters;
    normalize_numbers(&mut parameters);
    let manifest = RunManifest {
        command,
        parameters,
        versions,
        outputs: vec![OutputDigest {
            path: path.to_path_buf(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }],
    };
    let mut text = serde_json::to_vec_pretty(&manifest)?;
    text.push(b'\n');
    fs::write(manifest_path(path), text)
}
