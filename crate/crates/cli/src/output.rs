use std::fs;
use std::io::{self, Write};
use std::path::Path;

use nbbd_core::exact::{format_decimal, format_rational, parse_rational, to_f64, Rational};
use nbbd_core::linalg::ExactMatrix;
use serde_json::Value;

use crate::{CliError, CliResult};

pub fn rationals_json(values: &[Rational]) -> Value {
    Value::Array(
        values
            .iter()
            .map(|v| Value::String(format_rational(v)))
            .collect(),
    )
}

pub fn matrix_json(m: &ExactMatrix) -> Value {
    Value::Array(m.row_iter().map(rationals_json).collect())
}

pub fn csv_table(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

/// Write to `path` through a sibling temp file and a rename, or to stdout.
pub fn write_output(path: Option<&Path>, text: &str) -> io::Result<()> {
    let Some(path) = path else {
        let mut stdout = io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        return stdout.flush();
    };
    let file_name = path.file_name().ok_or_else(|| {
        io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name")
    })?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = fs::write(&tmp, text).and_then(|()| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn cell_value(cell: &str) -> Option<f64> {
    if cell.contains('/') {
        parse_rational(cell).ok().map(|r| to_f64(&r))
    } else {
        cell.parse().ok()
    }
}

/// Turn a CSV table into whitespace-separated columns with numbers at 12
/// significant digits.
pub fn plot_columns(input: &Path) -> CliResult<String> {
    let text = fs::read_to_string(input)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| CliError::Usage(format!("{} is empty", input.display())))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let mut out = columns.join(" ");
    out.push('\n');
    let mut data_rows = 0;
    for (line_no, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != columns.len() {
            return Err(CliError::Usage(format!(
                "line {}: expected {} columns, found {}",
                line_no + 2,
                columns.len(),
                cells.len()
            )));
        }
        let values: Vec<String> = cells
            .iter()
            .map(|c| cell_value(c).map_or_else(|| c.to_string(), format_decimal))
            .collect();
        out.push_str(&values.join(" "));
        out.push('\n');
        data_rows += 1;
    }
    if data_rows == 0 {
        return Err(CliError::Usage(format!(
            "{} has no data rows",
            input.display()
        )));
    }
    Ok(out)
}
