//! CSV output.

use std::io::Write;
use std::path::Path;

use crate::run::Row;
use crate::CliError;

pub const HEADER: [&str; 8] = ["rho_db", "gamma_th_db", "n", "m", "method", "value", "std_error", "flags"];

fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

fn db(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}

pub fn write_csv<W: Write>(w: W, rows: &[Row]) -> Result<(), csv::Error> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(HEADER)?;
    for r in rows {
        out.write_record([
            db(r.rho_db),
            db(r.gamma_th_db),
            r.n.to_string(),
            r.m.map(|m| m.to_string()).unwrap_or_default(),
            r.method.clone(),
            num(r.value),
            num(r.std_error),
            r.flags.join(";"),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, rows: &[Row]) -> Result<(), CliError> {
    ensure_parent(path)?;
    let f = std::fs::File::create(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    write_csv(std::io::BufWriter::new(f), rows).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

/// Checks that `path` starts with the expected header; names the first missing column.
pub fn check_header(path: &Path) -> Result<(), CliError> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let got = rd.headers().map_err(|e| CliError::io(format!("{}: {e}", path.display())))?.clone();
    for col in HEADER {
        if !got.iter().any(|h| h == col) {
            return Err(CliError::schema(format!("{}: CSV header is missing column `{col}`", path.display())));
        }
    }
    Ok(())
}

/// Creates the parent directory of an output file if it is missing.
pub fn ensure_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))
        }
        _ => Ok(()),
    }
}
