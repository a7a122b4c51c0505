//! Resolution sessions and Active Resolution Cost over build snapshots.
//!
//! A session for an error starts at the first build in which it appears
//! and closes at the first later build where it is gone. Its cost is the
//! sum, over the builds it spans, of the (capped) time until the next
//! build divided by the number of distinct errors that build carried:
//!
//! ```text
//! ARC = Σ_{i = first}^{resolved - 1}  min(t_{i+1} - t_i, cap) / |E_i|
//! ```

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::diagnostic::{BuildReport, Diagnostic};

/// Default cap on a single inter-build interval, in seconds.
pub const DEFAULT_CAP_SECONDS: f64 = 1500.0;

/// Code used for diagnostics that carry no error code (syntax errors).
pub const NO_CODE: &str = "N/A";

/// Identity of an error across builds. Line numbers are deliberately absent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ErrorFingerprint {
    pub code: String,
    pub file: String,
    pub key: String,
}

impl ErrorFingerprint {
    pub fn of(diag: &Diagnostic) -> Self {
        let primary = diag.primary_span().or(diag.spans.first());
        let label = primary.map(|s| s.label_str()).unwrap_or("");
        let mut key = strip_line_numbers(label);
        key.push('|');
        for (i, ident) in diag.quoted_identifiers().into_iter().enumerate() {
            if i > 0 {
                key.push(',');
            }
            key.push_str(ident);
        }
        Self {
            code: diag.code.clone().unwrap_or_else(|| NO_CODE.to_string()),
            file: primary.map(|s| s.file.clone()).unwrap_or_default(),
            key,
        }
    }
}

/// Replaces digits that follow `line ` or `:` with `#`.
fn strip_line_numbers(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        out.push(c);
        if (c == ':' || out.ends_with("line ")) && chars.peek().is_some_and(char::is_ascii_digit) {
            while chars.peek().is_some_and(char::is_ascii_digit) {
                chars.next();
            }
            out.push('#');
        }
    }
    out
}

/// The error population of one build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildSnapshot {
    pub seq: u64,
    pub timestamp: f64,
    pub errors: BTreeSet<ErrorFingerprint>,
    pub success: bool,
}

impl BuildSnapshot {
    pub fn from_report(seq: u64, report: &BuildReport) -> Self {
        Self {
            seq,
            timestamp: report.timestamp,
            errors: report.errors().map(ErrorFingerprint::of).collect(),
            success: report.success,
        }
    }

    /// A failed build that reported no errors (toolchain crash, killed
    /// build). Such snapshots say nothing about which errors are present.
    pub fn is_indeterminate(&self) -> bool {
        !self.success && self.errors.is_empty()
    }
}

/// Splits off indeterminate snapshots, which analysis skips.
pub fn partition_indeterminate(snapshots: Vec<BuildSnapshot>) -> (Vec<BuildSnapshot>, Vec<BuildSnapshot>) {
    snapshots.into_iter().partition(|s| !s.is_indeterminate())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionSession {
    pub fingerprint: ErrorFingerprint,
    pub first_build: u64,
    pub resolved_build: u64,
    pub arc_seconds: f64,
}

/// An error still present in the final snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnresolvedError {
    pub fingerprint: ErrorFingerprint,
    pub first_build: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionDetection {
    pub sessions: Vec<ResolutionSession>,
    pub unresolved: Vec<UnresolvedError>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TelemetryError {
    #[error("interval ends before it starts ({earlier} > {later})")]
    NegativeInterval { earlier: f64, later: f64 },
    #[error("snapshot {index} is out of order")]
    UnorderedInput { index: usize },
    #[error("session spans no interval")]
    EmptySession,
    #[error("build {0} is not in the snapshot list")]
    UnknownBuild(u64),
    #[error("fingerprint absent from build {0} inside its session")]
    InconsistentSession(u64),
    #[error("cap must be positive")]
    InvalidCap,
}

/// `min(later - earlier, cap)`.
pub fn capped_interval(earlier: f64, later: f64, cap: f64) -> Result<f64, TelemetryError> {
    if cap.partial_cmp(&0.0) != Some(Ordering::Greater) {
        return Err(TelemetryError::InvalidCap);
    }
    if later < earlier {
        return Err(TelemetryError::NegativeInterval { earlier, later });
    }
    Ok((later - earlier).min(cap))
}

fn check_order(snapshots: &[BuildSnapshot]) -> Result<(), TelemetryError> {
    for (index, pair) in snapshots.windows(2).enumerate() {
        if pair[1].seq <= pair[0].seq || pair[1].timestamp < pair[0].timestamp {
            return Err(TelemetryError::UnorderedInput { index: index + 1 });
        }
    }
    Ok(())
}

/// Finds every resolution session and computes its cost.
pub fn detect_sessions(snapshots: &[BuildSnapshot], cap: f64) -> Result<SessionDetection, TelemetryError> {
    check_order(snapshots)?;
    if cap.partial_cmp(&0.0) != Some(Ordering::Greater) {
        return Err(TelemetryError::InvalidCap);
    }
    let mut open: BTreeMap<&ErrorFingerprint, u64> = BTreeMap::new();
    let mut out = SessionDetection::default();
    for snap in snapshots {
        let closed: Vec<&ErrorFingerprint> =
            open.keys().copied().filter(|fp| !snap.errors.contains(*fp)).collect();
        for fp in closed {
            let first_build = open.remove(fp).unwrap_or(snap.seq);
            let mut session = ResolutionSession {
                fingerprint: fp.clone(),
                first_build,
                resolved_build: snap.seq,
                arc_seconds: 0.0,
            };
            session.arc_seconds = compute_arc(&session, snapshots, cap)?;
            out.sessions.push(session);
        }
        for fp in &snap.errors {
            open.entry(fp).or_insert(snap.seq);
        }
    }
    out.unresolved = open
        .into_iter()
        .map(|(fp, first_build)| UnresolvedError { fingerprint: fp.clone(), first_build })
        .collect();
    Ok(out)
}

/// One term of the cost sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalShare {
    pub from_build: u64,
    pub to_build: u64,
    pub capped_seconds: f64,
    pub concurrent_errors: usize,
    pub share: f64,
}

/// The per-interval terms whose sum is the session's cost.
pub fn interval_shares(
    session: &ResolutionSession,
    snapshots: &[BuildSnapshot],
    cap: f64,
) -> Result<Vec<IntervalShare>, TelemetryError> {
    let index_of = |seq: u64| {
        snapshots
            .iter()
            .position(|s| s.seq == seq)
            .ok_or(TelemetryError::UnknownBuild(seq))
    };
    let first = index_of(session.first_build)?;
    let resolved = index_of(session.resolved_build)?;
    if resolved <= first {
        return Err(TelemetryError::EmptySession);
    }
    snapshots[first..=resolved]
        .windows(2)
        .map(|pair| {
            let (cur, next) = (&pair[0], &pair[1]);
            if !cur.errors.contains(&session.fingerprint) {
                return Err(TelemetryError::InconsistentSession(cur.seq));
            }
            let capped_seconds = capped_interval(cur.timestamp, next.timestamp, cap)?;
            let concurrent_errors = cur.errors.len();
            Ok(IntervalShare {
                from_build: cur.seq,
                to_build: next.seq,
                capped_seconds,
                concurrent_errors,
                share: capped_seconds / concurrent_errors as f64,
            })
        })
        .collect()
}

/// Active Resolution Cost of one session, in seconds.
pub fn compute_arc(session: &ResolutionSession, snapshots: &[BuildSnapshot], cap: f64) -> Result<f64, TelemetryError> {
    Ok(interval_shares(session, snapshots, cap)?.iter().map(|s| s.share).sum())
}

/// Per-code cost summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub code: String,
    pub session_count: usize,
    pub total_seconds: f64,
    /// Fraction of the grand-total cost over all codes.
    pub total_share: f64,
    pub avg_seconds: f64,
    /// Population standard deviation.
    pub stddev_seconds: f64,
}

/// Groups sessions by code, sorted by total cost (descending, then code).
///
/// When every session costs zero, all shares are zero.
pub fn aggregate(sessions: &[ResolutionSession]) -> Vec<CostRow> {
    let mut by_code: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for s in sessions {
        by_code.entry(s.fingerprint.code.as_str()).or_default().push(s.arc_seconds);
    }
    let grand: f64 = sessions.iter().map(|s| s.arc_seconds).sum();
    let mut rows: Vec<CostRow> = by_code
        .into_iter()
        .map(|(code, costs)| {
            let n = costs.len() as f64;
            let total: f64 = costs.iter().sum();
            let mean = total / n;
            let var = costs.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / n;
            CostRow {
                code: code.to_string(),
                session_count: costs.len(),
                total_seconds: total,
                total_share: if grand > 0.0 { total / grand } else { 0.0 },
                avg_seconds: mean,
                stddev_seconds: libm::sqrt(var),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.total_seconds
            .partial_cmp(&a.total_seconds)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.code.cmp(&b.code))
    });
    rows
}
