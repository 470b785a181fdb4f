use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use super::config::ExperimentConfig;
use super::ConvergenceReport;
use crate::error::Result;

pub const CSV_HEADER: &str = "N,weak_error,strong_error,bound,seconds";

fn number(x: f64) -> String {
    // 17 significant digits round-trip every f64.
    format!("{x:.16e}")
}

/// The report as CSV text. Rows without an analytic bound print `NaN`.
pub fn render_csv(report: &ConvergenceReport) -> String {
    let mut out = String::with_capacity(64 * (report.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.n,
            number(row.weak_error),
            number(row.strong_error),
            number(row.bound.unwrap_or(f64::NAN)),
            number(row.seconds),
        ));
    }
    out
}

/// Writes `contents` next to `path` and renames it into place, so readers
/// never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn emit_csv(report: &ConvergenceReport, path: &Path) -> Result<()> {
    write_atomic(path, render_csv(report).as_bytes())
}

/// Where the config echo for a CSV at `csv_path` goes: `results.csv` gets
/// `results.config.json`.
pub fn config_echo_path(csv_path: &Path) -> std::path::PathBuf {
    csv_path.with_extension("config.json")
}

pub fn write_config_echo(config: &ExperimentConfig, csv_path: &Path) -> Result<std::path::PathBuf> {
    let path = config_echo_path(csv_path);
    write_atomic(&path, config.to_json().as_bytes())?;
    Ok(path)
}
