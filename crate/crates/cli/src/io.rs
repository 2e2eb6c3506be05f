//! Input documents, number rendering and output assembly.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use momentbc::scalar::{format_rational, parse_rational};
use momentbc::{Backend, Diagnostic, Rational, Scalar};
use serde_json::{Map, Number, Value};

pub const SCHEMA: &str = "momentbc/1";

/// Failure classes with distinct exit statuses.
#[derive(Debug)]
pub enum CliError {
    /// Malformed input or arguments (exit status 2).
    Parse(String),
    /// A library precondition failed (exit status 1).
    Domain(momentbc::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, code, message) = match self {
            CliError::Parse(m) => ("parse-error", "parse-error", m.clone()),
            CliError::Domain(e) => ("domain-error", e.code(), e.to_string()),
            CliError::Io(m) => ("io-error", "io-error", m.clone()),
        };
        let mut err = Map::new();
        err.insert("kind".into(), kind.into());
        err.insert("code".into(), code.into());
        err.insert("message".into(), message.into());
        let mut doc = Map::new();
        doc.insert("schema".into(), SCHEMA.into());
        doc.insert("error".into(), Value::Object(err));
        Value::Object(doc)
    }
}

impl From<momentbc::Error> for CliError {
    fn from(e: momentbc::Error) -> Self {
        CliError::Domain(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

/// Reads a JSON object from a path, or from stdin for `-`.
pub fn read_document(path: &Path) -> CliResult<Map<String, Value>> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io(e.to_string()))?;
        s
    } else {
        fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?
    };
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(parse_err("input must be a JSON object")),
        Err(e) => Err(parse_err(format!("malformed JSON: {e}"))),
    }
}

/// Backend named in the document, if any.
pub fn document_backend(doc: &Map<String, Value>) -> CliResult<Option<Backend>> {
    match doc.get("backend") {
        None => Ok(None),
        Some(Value::String(s)) => s.parse().map(Some).map_err(parse_err),
        Some(_) => Err(parse_err("`backend` must be a string")),
    }
}

/// Exact value of a JSON number literal or a `"p/q"` string.
pub fn exact_value(v: &Value) -> CliResult<Rational> {
    match v {
        Value::Number(n) => parse_rational(&n.to_string()).map_err(parse_err),
        Value::String(s) => parse_rational(s).map_err(parse_err),
        other => Err(parse_err(format!(
            "expected a number or \"p/q\" string, got {other}"
        ))),
    }
}

/// Parses a scalar: literals are read exactly, then rounded once for the float backend.
pub fn scalar_value<T: Scalar>(v: &Value) -> CliResult<T> {
    let q = exact_value(v)?;
    if T::EXACT {
        Ok(T::from_rational(&q))
    } else if let Value::Number(n) = v {
        n.to_string()
            .parse::<f64>()
            .map(T::from_f64)
            .map_err(|e| parse_err(e.to_string()))
    } else {
        Ok(T::from_rational(&q))
    }
}

pub fn scalar_text<T: Scalar>(text: &str) -> CliResult<T> {
    scalar_value(&Value::String(text.to_string()))
}

pub fn array<T: Scalar>(doc: &Map<String, Value>, key: &str) -> CliResult<Vec<T>> {
    match doc.get(key) {
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, v)| {
                scalar_value(v).map_err(|e| parse_err(format!("{key}[{i}]: {}", msg(&e))))
            })
            .collect(),
        Some(_) => Err(parse_err(format!("`{key}` must be an array"))),
        None => Err(parse_err(format!("missing `{key}` array"))),
    }
}

fn msg(e: &CliError) -> String {
    match e {
        CliError::Parse(m) | CliError::Io(m) => m.clone(),
        CliError::Domain(d) => d.to_string(),
    }
}

/// Float rendering: 17 significant digits in scientific notation with a signed exponent.
pub fn float_text(x: f64) -> String {
    // Adding 0.0 maps -0 to +0.
    let text = format!("{:.16e}", x + 0.0);
    match text.split_once('e') {
        Some((mantissa, exp)) if !exp.starts_with('-') => format!("{mantissa}e+{exp}"),
        _ => text,
    }
}

pub fn float(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(
            float_text(x)
                .parse::<Number>()
                .expect("formatted float is valid JSON"),
        )
    } else {
        Value::Null
    }
}

/// Renders values of either backend: floats as numbers, rationals as `"p/q"` strings.
pub trait Emit {
    fn json(&self) -> Value;
    fn text(&self) -> String;
}

impl Emit for f64 {
    fn json(&self) -> Value {
        float(*self)
    }

    fn text(&self) -> String {
        if self.is_finite() {
            float_text(*self)
        } else {
            String::new()
        }
    }
}

impl Emit for Rational {
    fn json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn text(&self) -> String {
        format_rational(self)
    }
}

pub fn list<E: Emit>(v: &[E]) -> Value {
    Value::Array(v.iter().map(Emit::json).collect())
}

pub fn matrix<E: Emit + Scalar>(m: &momentbc::Matrix<E>) -> Value {
    Value::Array((0..m.rows()).map(|i| list(m.row(i))).collect())
}

pub fn diagnostics(d: &[Diagnostic]) -> Value {
    Value::Array(
        d.iter()
            .map(|d| {
                let mut m = Map::new();
                m.insert("code".into(), d.code.into());
                m.insert("message".into(), d.message.clone().into());
                Value::Object(m)
            })
            .collect(),
    )
}

/// Rows for CSV emission.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// `# key=value` lines after the schema line.
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Result of one command, renderable in either format.
pub struct Output {
    pub command: &'static str,
    pub backend: Backend,
    pub body: Map<String, Value>,
    pub diagnostics: Vec<Diagnostic>,
    pub table: Table,
    /// Appended to CSV output as a trailing `# verdict=` line.
    pub verdict: Option<Value>,
}

impl Output {
    pub fn new(command: &'static str, backend: Backend) -> Self {
        Output {
            command,
            backend,
            body: Map::new(),
            diagnostics: Vec::new(),
            table: Table::default(),
            verdict: None,
        }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.body.insert(key.to_string(), value);
    }

    pub fn to_json(&self) -> String {
        let mut doc = Map::new();
        doc.insert("schema".into(), SCHEMA.into());
        doc.insert("command".into(), self.command.into());
        doc.insert("backend".into(), self.backend.to_string().into());
        for (k, v) in &self.body {
            doc.insert(k.clone(), v.clone());
        }
        doc.insert("diagnostics".into(), diagnostics(&self.diagnostics));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON output");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut out = format!(
            "# schema={SCHEMA} command={} backend={}\n",
            self.command, self.backend
        );
        for (k, v) in &self.table.notes {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(vec![]);
        w.write_record(&self.table.header)
            .map_err(|e| CliError::Io(e.to_string()))?;
        for row in &self.table.rows {
            w.write_record(row)
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).expect("CSV is UTF-8"));
        for d in &self.diagnostics {
            out.push_str(&format!("# diagnostic={}: {}\n", d.code, d.message));
        }
        if let Some(v) = &self.verdict {
            out.push_str(&format!(
                "# verdict={}\n",
                serde_json::to_string(v).expect("JSON verdict")
            ));
        }
        Ok(out)
    }
}

pub fn write_output(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
