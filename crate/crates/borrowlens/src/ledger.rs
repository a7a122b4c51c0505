//! Append-only JSONL ledger of build snapshots.
//!
//! Each line is one [`LedgerRecord`]. Records of several workspaces may
//! share a ledger; `seq` counts builds per workspace. A final line without
//! a newline that does not parse is a torn write from an interrupted
//! append: readers skip it and the next append cuts it off.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use borrowlens_core::telemetry::{BuildSnapshot, ErrorFingerprint};
use borrowlens_core::BuildReport;
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub format_version: u32,
    pub workspace: String,
    pub seq: u64,
    /// Seconds since the Unix epoch at build invocation.
    pub timestamp: f64,
    pub success: bool,
    pub errors: Vec<ErrorFingerprint>,
    /// Short explanation of each error code seen in this build.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub descriptions: BTreeMap<String, String>,
}

impl LedgerRecord {
    pub fn snapshot(&self) -> BuildSnapshot {
        BuildSnapshot {
            seq: self.seq,
            timestamp: self.timestamp,
            errors: self.errors.iter().cloned().collect(),
            success: self.success,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LedgerError {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: malformed record: {reason}", .path.display())]
    Malformed { path: PathBuf, line: usize, reason: String },
    #[error("{}:{line}: unsupported format version {version}", .path.display())]
    UnsupportedVersion { path: PathBuf, line: usize, version: u32 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LedgerContents {
    pub records: Vec<LedgerRecord>,
    /// 1-based line number of a skipped torn final line.
    pub torn_line: Option<usize>,
    /// Byte length of the complete records; a torn tail starts here.
    valid_len: u64,
    ends_with_newline: bool,
}

impl LedgerContents {
    /// Snapshots grouped by workspace, each group in ledger order.
    pub fn by_workspace(&self) -> BTreeMap<&str, Vec<BuildSnapshot>> {
        let mut out: BTreeMap<&str, Vec<BuildSnapshot>> = BTreeMap::new();
        for r in &self.records {
            out.entry(r.workspace.as_str()).or_default().push(r.snapshot());
        }
        out
    }

    /// Latest description seen for each error code.
    pub fn descriptions(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for r in &self.records {
            out.extend(r.descriptions.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        out
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> LedgerError + '_ {
    move |source| LedgerError::Io { path: path.to_path_buf(), source }
}

/// Reads a ledger. A torn final line is skipped with a warning.
pub fn read_ledger(path: &Path) -> Result<LedgerContents, LedgerError> {
    let text = std::fs::read(path).map_err(io_err(path))?;
    parse_ledger(path, &text)
}

fn parse_ledger(path: &Path, bytes: &[u8]) -> Result<LedgerContents, LedgerError> {
    let mut out = LedgerContents { ends_with_newline: bytes.is_empty() || bytes.ends_with(b"\n"), ..Default::default() };
    let mut offset = 0usize;
    let mut lines = bytes.split_inclusive(|&b| b == b'\n').enumerate().peekable();
    while let Some((idx, raw)) = lines.next() {
        let line = idx + 1;
        let is_last = lines.peek().is_none();
        let complete = raw.ends_with(b"\n");
        let parsed = std::str::from_utf8(raw)
            .map_err(|e| e.to_string())
            .and_then(|s| {
                let s = s.trim();
                if s.is_empty() {
                    Ok(None)
                } else {
                    serde_json::from_str::<LedgerRecord>(s).map(Some).map_err(|e| e.to_string())
                }
            });
        match parsed {
            Ok(record) => {
                if let Some(record) = record {
                    if record.format_version != FORMAT_VERSION {
                        return Err(LedgerError::UnsupportedVersion {
                            path: path.to_path_buf(),
                            line,
                            version: record.format_version,
                        });
                    }
                    out.records.push(record);
                }
                offset += raw.len();
            }
            Err(_) if is_last && !complete => {
                log::warn!("{}:{line}: skipping torn final record", path.display());
                out.torn_line = Some(line);
                out.ends_with_newline = true;
                break;
            }
            Err(reason) => {
                return Err(LedgerError::Malformed { path: path.to_path_buf(), line, reason });
            }
        }
    }
    out.valid_len = offset as u64;
    Ok(out)
}

/// Builds the record that [`append`] would write for `report`.
fn next_record(contents: &LedgerContents, report: &BuildReport) -> LedgerRecord {
    let last = contents.records.iter().rev().find(|r| r.workspace == report.workspace);
    let seq = last.map_or(1, |r| r.seq + 1);
    let timestamp = last.map_or(report.timestamp, |r| r.timestamp.max(report.timestamp));
    let mut errors: BTreeSet<ErrorFingerprint> = BTreeSet::new();
    let mut descriptions = BTreeMap::new();
    for d in report.errors() {
        let fp = ErrorFingerprint::of(d);
        if let (Some(code), Some(summary)) = (&d.code, &d.summary) {
            descriptions.insert(code.clone(), summary.clone());
        }
        errors.insert(fp);
    }
    LedgerRecord {
        format_version: FORMAT_VERSION,
        workspace: report.workspace.clone(),
        seq,
        timestamp,
        success: report.success,
        errors: errors.into_iter().collect(),
        descriptions,
    }
}

/// Appends one snapshot of `report`, creating the ledger and its directory
/// when needed. A torn final line is removed first.
pub fn append(path: &Path, report: &BuildReport) -> Result<LedgerRecord, LedgerError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(path))?;
    }
    let mut file: File = OpenOptions::new()
        .read(true)
        .write(true)
        .create(true)
        .truncate(false)
        .open(path)
        .map_err(io_err(path))?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes).map_err(io_err(path))?;
    let contents = parse_ledger(path, &bytes)?;
    if contents.torn_line.is_some() {
        file.set_len(contents.valid_len).map_err(io_err(path))?;
    }
    let record = next_record(&contents, report);
    let mut line = String::new();
    if !contents.ends_with_newline {
        line.push('\n');
    }
    line.push_str(&serde_json::to_string(&record).map_err(|e| LedgerError::Malformed {
        path: path.to_path_buf(),
        line: contents.records.len() + 1,
        reason: e.to_string(),
    })?);
    line.push('\n');
    file.seek(SeekFrom::End(0)).map_err(io_err(path))?;
    file.write_all(line.as_bytes()).map_err(io_err(path))?;
    file.sync_data().map_err(io_err(path))?;
    Ok(record)
}
