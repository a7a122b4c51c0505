//! Session analysis over a ledger, and the cost report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use borrowlens_core::telemetry::{
    aggregate, detect_sessions, partition_indeterminate, CostRow, TelemetryError, NO_CODE,
};
use serde::{Deserialize, Serialize};

use crate::ledger::LedgerContents;

/// One resolved error, as written by `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub workspace: String,
    pub code: String,
    pub file: String,
    pub key: String,
    pub first_build: u64,
    pub resolved_build: u64,
    pub arc_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnresolvedRecord {
    pub workspace: String,
    pub code: String,
    pub file: String,
    pub key: String,
    pub first_build: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Analysis {
    pub sessions: Vec<SessionRecord>,
    pub unresolved: Vec<UnresolvedRecord>,
    /// `(workspace, seq)` of failed builds that reported no errors.
    pub skipped_builds: Vec<(String, u64)>,
}

#[derive(Debug, thiserror::Error)]
#[error("workspace {workspace}: {source}")]
pub struct AnalysisError {
    pub workspace: String,
    pub source: TelemetryError,
}

/// Detects sessions in every workspace of the ledger.
///
/// Failed builds without errors say nothing about which errors are present,
/// so they are dropped; the interval around them is measured between the
/// neighbouring builds.
pub fn analyze(ledger: &LedgerContents, cap: f64) -> Result<Analysis, AnalysisError> {
    let mut out = Analysis::default();
    for (workspace, snapshots) in ledger.by_workspace() {
        let (kept, dropped) = partition_indeterminate(snapshots);
        for s in dropped {
            log::warn!("{workspace}: build {} failed without errors; skipped", s.seq);
            out.skipped_builds.push((workspace.to_string(), s.seq));
        }
        let found = detect_sessions(&kept, cap)
            .map_err(|source| AnalysisError { workspace: workspace.to_string(), source })?;
        out.sessions.extend(found.sessions.into_iter().map(|s| SessionRecord {
            workspace: workspace.to_string(),
            code: s.fingerprint.code,
            file: s.fingerprint.file,
            key: s.fingerprint.key,
            first_build: s.first_build,
            resolved_build: s.resolved_build,
            arc_seconds: s.arc_seconds,
        }));
        out.unresolved.extend(found.unresolved.into_iter().map(|u| UnresolvedRecord {
            workspace: workspace.to_string(),
            code: u.fingerprint.code,
            file: u.fingerprint.file,
            key: u.fingerprint.key,
            first_build: u.first_build,
        }));
    }
    Ok(out)
}

/// Cost rows for the sessions of an analysis.
pub fn cost_rows(analysis: &Analysis) -> Vec<CostRow> {
    let sessions: Vec<_> = analysis
        .sessions
        .iter()
        .map(|s| borrowlens_core::ResolutionSession {
            fingerprint: borrowlens_core::ErrorFingerprint {
                code: s.code.clone(),
                file: s.file.clone(),
                key: s.key.clone(),
            },
            first_build: s.first_build,
            resolved_build: s.resolved_build,
            arc_seconds: s.arc_seconds,
        })
        .collect();
    aggregate(&sessions)
}

pub const COLUMNS: [&str; 6] = ["code", "description", "count", "total_percent", "avg_seconds", "stddev_seconds"];
const TABLE_HEADERS: [&str; 6] = ["Code", "Description", "Count", "Total", "Avg (s)", "Stddev (s)"];

fn description<'a>(code: &str, descriptions: &'a BTreeMap<String, String>) -> &'a str {
    match descriptions.get(code) {
        Some(d) => d,
        None if code == NO_CODE => "Syntax error",
        None => "",
    }
}

/// CSV with a header row. Percentages keep full precision.
pub fn write_csv<W: io::Write>(rows: &[CostRow], descriptions: &BTreeMap<String, String>, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record([
            r.code.clone(),
            description(&r.code, descriptions).to_string(),
            r.session_count.to_string(),
            (r.total_share * 100.0).to_string(),
            r.avg_seconds.to_string(),
            r.stddev_seconds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Plain-text table with aligned columns; numbers are right-aligned.
pub fn format_table(rows: &[CostRow], descriptions: &BTreeMap<String, String>) -> String {
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.code.clone(),
                description(&r.code, descriptions).to_string(),
                r.session_count.to_string(),
                format!("{:.1}%", r.total_share * 100.0),
                format!("{:.1}", r.avg_seconds),
                format!("{:.1}", r.stddev_seconds),
            ]
        })
        .collect();
    let mut widths = TABLE_HEADERS.map(|h| h.chars().count());
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |row: [&str; 6]| {
        let mut text = String::new();
        for (i, (cell, w)) in row.iter().zip(widths).enumerate() {
            if i > 0 {
                text.push_str("  ");
            }
            if i < 2 {
                let _ = write!(text, "{cell:<w$}");
            } else {
                let _ = write!(text, "{cell:>w$}");
            }
        }
        out.push_str(text.trim_end());
        out.push('\n');
    };
    line(TABLE_HEADERS);
    for row in &cells {
        line([&row[0], &row[1], &row[2], &row[3], &row[4], &row[5]]);
    }
    out
}

/// One `code,arc_seconds` row per session, for distribution plots.
pub fn write_violin_csv<W: io::Write>(sessions: &[SessionRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["code", "arc_seconds"])?;
    for s in sessions {
        w.write_record([s.code.clone(), s.arc_seconds.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(code: &str, n: usize, total: f64, share: f64, sd: f64) -> CostRow {
        CostRow {
            code: code.into(),
            session_count: n,
            total_seconds: total,
            total_share: share,
            avg_seconds: total / n as f64,
            stddev_seconds: sd,
        }
    }

    #[test]
    fn table_aligns_columns() {
        let rows = [row("E0382", 2, 160.0, 0.8, 30.0), row("N/A", 1, 40.0, 0.2, 0.0)];
        let mut d = BTreeMap::new();
        d.insert("E0382".to_string(), "A value was used after it was moved".to_string());
        let t = format_table(&rows, &d);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("Code   Description"));
        assert!(lines[1].contains("A value was used after it was moved"));
        assert!(lines[1].ends_with("30.0"));
        assert!(lines[2].contains("Syntax error"));
        assert!(lines[2].contains("20.0%"));
        // Right-aligned numeric columns end at the same offset.
        assert_eq!(lines[1].len(), lines[0].len());
        assert_eq!(lines[2].len(), lines[0].len());
    }

    #[test]
    fn csv_has_six_columns() {
        let rows = [row("E0597", 1, 10.0, 1.0, 0.0)];
        let mut buf = Vec::new();
        write_csv(&rows, &BTreeMap::new(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "code,description,count,total_percent,avg_seconds,stddev_seconds\nE0597,,1,100,10,0\n");
    }
}
