use std::io::Write;
use std::path::Path;

use super::ResultRow;
use crate::error::Result;

pub const CSV_HEADER: &str =
    "instance,sweep_param,sweep_value,algorithm,trials,errors,error_rate,ci_low,ci_high,min_gap,wall_ms";

/// Rates and gaps at 17 significant digits.
fn sig17(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.16e}")
    }
}

fn field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// One CSV line without the terminator. Failed rows leave the result
/// columns empty.
pub fn csv_line(row: &ResultRow) -> String {
    let sweep_value = row.sweep_value.map(|v| format!("{v}")).unwrap_or_default();
    let mut cells = vec![
        field(&row.instance),
        field(row.sweep_param.as_deref().unwrap_or("")),
        sweep_value,
        field(&row.algorithm),
        row.trials.to_string(),
    ];
    match &row.outcome {
        Ok(o) => cells.extend([
            o.errors.to_string(),
            sig17(o.error_rate),
            sig17(o.ci_low),
            sig17(o.ci_high),
            sig17(o.min_gap),
            o.wall_ms.to_string(),
        ]),
        Err(_) => cells.extend(std::iter::repeat_n(String::new(), 6)),
    }
    cells.join(",")
}

pub fn write_csv<W: Write>(mut out: W, rows: &[ResultRow]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", csv_line(row))?;
    }
    out.flush()
}

pub fn write_csv_file(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(file), rows)?;
    Ok(())
}
