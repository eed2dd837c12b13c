//! Report files: CSV table, JSON dump and a gnuplot-ready data file.

use super::StudyReport;
use crate::system::format_g;
use crate::Result;
use std::fmt::Write as _;
use std::path::Path;

pub const CSV_HEADER: &str = "h,ndof,energy,h1_nabla,h1_zero,l2_zero,l2_nabla,linf_edge,tau_max,alpha_h";

const DIGITS: usize = 12;

fn row_fields(report: &StudyReport) -> Vec<Vec<String>> {
    report
        .levels
        .iter()
        .map(|l| {
            let mut fields = vec![format_g(l.h, DIGITS), l.ndof.to_string()];
            fields.extend(l.errors.values().iter().map(|&v| format_g(v, DIGITS)));
            fields.push(format_g(l.tau_max, DIGITS));
            fields.push(format_g(l.alpha_h, DIGITS));
            fields
        })
        .collect()
}

pub fn csv_string(report: &StudyReport) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for fields in row_fields(report) {
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

pub fn write_csv(report: &StudyReport, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, csv_string(report))?;
    Ok(())
}

pub fn write_json(report: &StudyReport, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(report)? + "\n")?;
    Ok(())
}

/// Whitespace-separated columns with `#` comment lines for the slopes.
pub fn write_rates_dat(report: &StudyReport, path: impl AsRef<Path>) -> Result<()> {
    let mut s = String::new();
    let c = &report.config;
    let _ = writeln!(s, "# dim={} k={} stab={} family={} case={}", c.dim, c.k, c.stab, c.family, c.case);
    let slopes: Vec<String> = report
        .slopes
        .values()
        .iter()
        .map(|v| v.map_or("nan".into(), |v| format!("{v:.4}")))
        .collect();
    let _ = writeln!(s, "# slopes energy h1_nabla h1_zero l2_zero l2_nabla linf_edge: {}", slopes.join(" "));
    let _ = writeln!(s, "# {}", CSV_HEADER.replace(',', " "));
    for fields in row_fields(report) {
        let _ = writeln!(s, "{}", fields.join(" "));
    }
    std::fs::write(path, s)?;
    Ok(())
}
