//! CSV and JSON emission for inequality reports. Every output embeds the
//! fully resolved run configuration, and all formatting is deterministic so
//! identical configurations produce byte-identical files.

use std::io::{self, Write};

use crate::analysis::InequalityReport;

/// Quotes a CSV cell when needed (commas, quotes, newlines).
fn csv_cell(raw: &str) -> String {
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn fmt_opt_bool(x: Option<bool>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes reports as CSV with `# `-prefixed header lines (the config echo
/// and any notes).
pub fn write_reports_csv(
    out: &mut impl Write,
    header_lines: &[String],
    reports: &[InequalityReport],
) -> io::Result<()> {
    for line in header_lines {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "inequality_id,graph,sample,measured,bound,pass")?;
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_cell(r.id.code()),
            csv_cell(&r.graph),
            csv_cell(&r.sample),
            r.measured,
            fmt_opt_f64(r.bound),
            fmt_opt_bool(r.pass),
        )?;
    }
    Ok(())
}

/// Reports as a JSON document carrying the config echo.
pub fn reports_to_json(
    config: &serde_json::Value,
    notes: &[String],
    reports: &[InequalityReport],
) -> serde_json::Value {
    serde_json::json!({
        "config": config,
        "notes": notes,
        "rows": reports.iter().map(|r| serde_json::json!({
            "inequality_id": r.id.code(),
            "graph": r.graph,
            "sample": r.sample,
            "measured": r.measured,
            "bound": r.bound,
            "pass": r.pass,
        })).collect::<Vec<_>>(),
    })
}

/// True when some row measured against a numeric bound failed.
pub fn any_bound_failure(reports: &[InequalityReport]) -> bool {
    reports.iter().any(|r| r.pass == Some(false))
}
