use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Value};

use crate::args::Format;
use crate::error::CliError;

/// Rows for CSV output; every command also has a JSON rendering.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub struct CommandOutput {
    pub inputs: Value,
    pub results: Value,
    pub violations: Vec<Value>,
    pub table: Table,
    pub exit_code: u8,
}

/// Shortest text that parses back to the same `f64`. Non-finite values
/// print as `NaN`, `inf` or `-inf`.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite floats serialize")
    } else {
        x.to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub fn envelope(command: &str, out: &CommandOutput, elapsed_ms: f64) -> Value {
    json!({
        "command": command,
        "inputs": out.inputs,
        "results": out.results,
        "violations": out.violations,
        "elapsed_ms": elapsed_ms,
    })
}

pub fn render(
    command: &str,
    out: &CommandOutput,
    elapsed_ms: f64,
    format: Format,
    dest: Option<&Path>,
) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match dest {
        Some(p) => Box::new(
            File::create(p).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &envelope(command, out, elapsed_ms))
                .map_err(|e| CliError::input(e.to_string()))?;
            writeln!(sink)?;
        }
        Format::Csv => write_csv(&mut sink, &out.table)?,
    }
    sink.flush()?;
    Ok(())
}

pub fn write_csv<W: Write>(sink: W, table: &Table) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
