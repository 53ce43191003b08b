//! Input decoding, output encoding and exit-code classification.

use std::io::Read;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Malformed input or invalid arguments (exit 2).
    Usage(String),
    /// The input is well formed but the problem has no solution (exit 1).
    /// The payload is emitted on stdout as the command result.
    Domain { message: String, payload: Value },
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain { .. } => 1,
        }
    }
}

impl From<circarma::Error> for Failure {
    fn from(e: circarma::Error) -> Self {
        use circarma::Error as E;
        let message = e.to_string();
        match e {
            E::Infeasible { reason, direction } => Failure::Domain {
                payload: serde_json::json!({
                    "error": "infeasible",
                    "reason": reason,
                    "boundary_direction": direction,
                }),
                message,
            },
            E::Boundary(_)
            | E::Indeterminate { .. }
            | E::NonPositive { .. }
            | E::Singular { .. }
            | E::NotPositiveDefinite { .. }
            | E::FactorizationOnCircle
            | E::DiscreteOnly
            | E::FactorizationResidual { .. }
            | E::DenseCapExceeded { .. } => Failure::Domain {
                payload: serde_json::json!({ "error": kind_name(&e), "message": message }),
                message,
            },
            _ => Failure::Usage(message),
        }
    }
}

fn kind_name(e: &circarma::Error) -> &'static str {
    use circarma::Error as E;
    match e {
        E::Boundary(_) => "boundary",
        E::Indeterminate { .. } => "indeterminate",
        E::NonPositive { .. } => "non-positive",
        E::Singular { .. } => "singular",
        E::NotPositiveDefinite { .. } => "not-positive-definite",
        E::FactorizationOnCircle => "factorization-on-circle",
        E::DiscreteOnly => "discrete-only",
        E::FactorizationResidual { .. } => "factorization-residual",
        E::DenseCapExceeded { .. } => "dense-cap-exceeded",
        _ => "error",
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

/// Reads the input argument: `-` for stdin, inline JSON when it starts with
/// `{`, a file path otherwise.
pub fn read_input(arg: &str) -> Outcome<Value> {
    let text = if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("reading stdin: {e}")))?;
        s
    } else if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg))
            .map_err(|e| Failure::usage(format!("reading {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("invalid JSON: {e}")))
}

/// Decodes a required field.
pub fn field<T: DeserializeOwned>(v: &Value, name: &str) -> Outcome<T> {
    let raw = v
        .get(name)
        .ok_or_else(|| Failure::usage(format!("missing field `{name}`")))?;
    serde_json::from_value(raw.clone()).map_err(|e| Failure::usage(format!("field `{name}`: {e}")))
}

/// Decodes an optional field.
pub fn opt_field<T: DeserializeOwned>(v: &Value, name: &str) -> Outcome<Option<T>> {
    match v.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => field(v, name).map(Some),
    }
}

/// A CSV table with a header row; numbers use 17 significant digits.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // adding 0.0 turns -0 into +0
            Cell::Num(x) => format!("{:.16e}", x + 0.0),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("writing to memory");
        Self { writer }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        self.writer
            .write_record(cells.iter().map(Cell::render))
            .expect("writing to memory");
    }

    pub fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("flushing to memory");
        String::from_utf8(bytes).expect("CSV fields are UTF-8")
    }
}

/// Writes to the output path, or stdout when none is given.
pub fn emit(output: Option<&Path>, text: &str) -> Outcome<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
