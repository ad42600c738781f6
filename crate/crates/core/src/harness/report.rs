use std::io::Write;
use std::path::Path;

use super::{ExplorationReport, HarnessError};

/// Column order of the report CSV.
pub const CSV_HEADER: [&str; 10] = [
    "target",
    "strategy",
    "walks",
    "repetition",
    "executions",
    "pairs",
    "capability",
    "cost",
    "wall_ms",
    "error",
];

fn fmt_cost(c: f64) -> String {
    if c.is_finite() {
        c.to_string()
    } else {
        "inf".to_string()
    }
}

/// Writes one row per (walk count, repetition), then one `mean` row per
/// walk count.
pub fn write_csv<W: Write>(report: &ExplorationReport, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let strategy = report.strategy.as_str();
    for r in &report.rows {
        w.write_record([
            report.target.as_str(),
            strategy,
            &r.walks.to_string(),
            &r.repetition.to_string(),
            &r.executions.to_string(),
            &r.pairs.to_string(),
            &r.capability().to_string(),
            &fmt_cost(r.cost()),
            &format!("{:.3}", r.wall.as_secs_f64() * 1e3),
            r.error.as_deref().unwrap_or(""),
        ])?;
    }
    for a in &report.aggregates {
        w.write_record([
            report.target.as_str(),
            strategy,
            &a.walks.to_string(),
            "mean",
            &a.mean_executions.to_string(),
            &a.mean_pairs.to_string(),
            &a.capability.to_string(),
            &fmt_cost(a.cost),
            &format!("{:.3}", a.mean_wall.as_secs_f64() * 1e3),
            "",
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_csv(report: &ExplorationReport, path: &Path) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path)?;
    write_csv(report, std::io::BufWriter::new(file))
}
