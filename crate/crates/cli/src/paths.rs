//! The `paths` report: crossings and Conley-Zehnder index of a path file.

use std::fmt::Write as _;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sftmd::rational::format_rational;
use sftmd::symplectic::pathfile::load_path;
use sftmd::symplectic::{cz_index_report, CrossingTolerances};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathReport {
    pub name: String,
    pub dimension: usize,
    pub segments: usize,
    pub crossings: Vec<CrossingRow>,
    pub index: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingRow {
    pub segment: usize,
    /// Normalized time along the whole path: exact when known, otherwise a
    /// decimal.
    pub time: String,
    pub kernel_dim: usize,
    pub signature: i64,
    pub endpoint: bool,
}

pub fn analyze_path(name: &str, document: &[u8], tol: &CrossingTolerances) -> Result<PathReport> {
    let path = load_path(document, tol).with_context(|| name.to_string())?;
    let report = cz_index_report(&path, tol).with_context(|| name.to_string())?;
    Ok(PathReport {
        name: name.to_string(),
        dimension: report.dimension,
        segments: path.segments().len(),
        crossings: report
            .crossings
            .iter()
            .map(|c| CrossingRow {
                segment: c.segment,
                time: match &c.exact_time {
                    Some(t) => format_rational(t),
                    None => format!("{:.9}", c.time),
                },
                kernel_dim: c.kernel_dim,
                signature: c.signature,
                endpoint: c.endpoint,
            })
            .collect(),
        index: report.index.to_string(),
    })
}

pub fn path_to_text(report: &PathReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "input     {}", report.name);
    let _ = writeln!(out, "dimension {}", report.dimension);
    let _ = writeln!(out, "segments  {}", report.segments);
    if report.crossings.is_empty() {
        out.push_str("crossings none\n");
    } else {
        out.push_str("crossings\n");
        let _ = writeln!(out, "  {:<8} {:<14} {:<7} {:<10} weight", "segment", "time", "kernel", "signature");
        for c in &report.crossings {
            let weight = if c.endpoint { "half" } else { "full" };
            let _ = writeln!(
                out,
                "  {:<8} {:<14} {:<7} {:<10} {weight}",
                c.segment, c.time, c.kernel_dim, c.signature
            );
        }
    }
    let _ = writeln!(out, "index     {}", report.index);
    out
}
