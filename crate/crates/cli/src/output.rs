use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use qutrit_esd::esd::{Classification, EsdReport, EsdTable};
use qutrit_esd::validation::ValidationReport;
use serde::Serialize;

use crate::{config, CliError, Format};

pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(config)?;
    s.push('\n');
    Ok(s)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn class(c: Classification) -> &'static str {
    match c {
        Classification::Esd => "ESD",
        Classification::NoEsd => "NoESD",
    }
}

fn csv_text(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(config)?;
    for row in rows {
        w.write_record(&row).map_err(config)?;
    }
    String::from_utf8(w.into_inner().map_err(config)?).map_err(config)
}

const ESD_COLUMNS: [&str; 8] = [
    "kind",
    "mode",
    "b",
    "c",
    "esd_gamma",
    "analytic_gamma",
    "classification",
    "revival_gamma",
];

fn esd_row(r: &EsdReport) -> Vec<String> {
    vec![
        r.setting.kind.name().to_string(),
        r.setting.mode.name().to_string(),
        r.params.b().to_string(),
        r.params.c().to_string(),
        opt(r.esd_gamma),
        opt(r.analytic_gamma),
        class(r.classification).to_string(),
        opt(r.revival_gamma),
    ]
}

pub fn esd(reports: &[EsdReport], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(&reports),
        Format::Csv => csv_text(&ESD_COLUMNS, reports.iter().map(esd_row)),
        Format::Text => {
            let dash = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.9}"));
            let mut out = format!(
                "{:<26}{:<22}{:>8}{:>14}{:>14}{:>14}\n",
                "setting", "state", "class", "death", "closed form", "revival"
            );
            for r in reports {
                let _ = writeln!(
                    out,
                    "{:<26}{:<22}{:>8}{:>14}{:>14}{:>14}",
                    r.setting.to_string(),
                    format!("b={:.4} c={:.4}", r.params.b(), r.params.c()),
                    class(r.classification),
                    dash(r.esd_gamma),
                    dash(r.analytic_gamma),
                    dash(r.revival_gamma)
                );
            }
            Ok(out)
        }
    }
}

pub fn table(table: &EsdTable, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(table),
        Format::Csv => {
            let mut header = vec!["label", "holds"];
            header.extend(ESD_COLUMNS);
            let rows = table.cells.iter().flat_map(|cell| {
                cell.reports.iter().map(move |r| {
                    let mut row = vec![cell.label.clone(), cell.holds.to_string()];
                    row.extend(esd_row(r));
                    row
                })
            });
            csv_text(&header, rows)
        }
        Format::Text => {
            let mut out = table.render_text();
            let failing = table.cells.iter().filter(|c| !c.holds).count();
            let _ = writeln!(
                out,
                "\n{}/{} cells hold",
                table.cells.len() - failing,
                table.cells.len()
            );
            Ok(out)
        }
    }
}

pub fn validation(report: &ValidationReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(report),
        Format::Csv => csv_text(
            &["check", "passed", "max_error", "tolerance", "detail"],
            report.checks.iter().map(|c| {
                vec![
                    c.name.clone(),
                    c.passed.to_string(),
                    c.max_error.to_string(),
                    c.tolerance.to_string(),
                    c.detail.clone(),
                ]
            }),
        ),
        Format::Text => {
            let mut out = String::new();
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    out,
                    "[{tag}] {:<40} {:>10.2e} <= {:.0e}",
                    c.name, c.max_error, c.tolerance
                );
                let _ = writeln!(out, "       {}", c.detail);
            }
            let _ = writeln!(out, "\ndiscrepancies with published formulas:");
            for d in &report.discrepancies {
                let _ = writeln!(out, "- {}", d.source);
                let _ = writeln!(out, "    printed:  {}", d.printed);
                let _ = writeln!(out, "    measured: {}", d.measured);
                if d.max_deviation > 0.0 {
                    let _ = writeln!(
                        out,
                        "    max deviation of printed form: {:.3e}",
                        d.max_deviation
                    );
                }
                let _ = writeln!(out, "    {}", d.note);
            }
            let _ = writeln!(
                out,
                "\noverall: {}",
                if report.passed { "PASS" } else { "FAIL" }
            );
            Ok(out)
        }
    }
}
