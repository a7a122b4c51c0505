//! Structured compiler diagnostics.
//!
//! The parser accepts three record shapes, one JSON object per line:
//!
//! * cargo's `--message-format=json` envelopes (`"reason": "compiler-message"`),
//! * rustc's `--error-format=json` records (`"$message_type": "diagnostic"`),
//! * this crate's own canonical form (what [`Diagnostic`] serializes to).
//!
//! Anything else (artifact notices, build-script output, `build-finished`)
//! is skipped.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// 1-based line/column position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourcePosition {
    pub line: u32,
    pub column: u32,
}

impl SourcePosition {
    pub fn new(line: u32, column: u32) -> Self {
        Self { line: line.max(1), column: column.max(1) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub file: String,
    pub start: SourcePosition,
    pub end: SourcePosition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub is_primary: bool,
}

impl SourceSpan {
    pub fn label_str(&self) -> &str {
        self.label.as_deref().unwrap_or("")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Note,
    Help,
}

impl Severity {
    /// Maps a rustc `level` string. Unknown levels are treated as notes.
    pub fn from_level(level: &str) -> Self {
        match level {
            "error" | "error: internal compiler error" => Severity::Error,
            "warning" => Severity::Warning,
            "help" => Severity::Help,
            _ => Severity::Note,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Note => "note",
            Severity::Help => "help",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One compiler message with its labeled spans and child notes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: Option<String>,
    pub severity: Severity,
    pub message: String,
    pub spans: Vec<SourceSpan>,
    #[serde(default)]
    pub children: Vec<Diagnostic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rendered: Option<String>,
    /// First line of the compiler's explanation of `code`, when it ships one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
}

impl Diagnostic {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// The first span flagged primary, if any.
    pub fn primary_span(&self) -> Option<&SourceSpan> {
        self.spans.iter().find(|s| s.is_primary)
    }

    /// Identifiers quoted in backticks in the message, in order of appearance.
    pub fn quoted_identifiers(&self) -> Vec<&str> {
        backticked(&self.message)
    }

    /// Serializes to the canonical single-line JSON form.
    pub fn to_json(&self) -> String {
        // Serializing plain data with string keys cannot fail.
        serde_json::to_string(self).unwrap_or_default()
    }
}

/// Extracts every `` `...` `` segment of `text`.
pub fn backticked(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('`') {
        let after = &rest[open + 1..];
        match after.find('`') {
            Some(close) => {
                out.push(&after[..close]);
                rest = &after[close + 1..];
            }
            None => break,
        }
    }
    out
}

/// Outcome of a finished build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    /// Seconds since the Unix epoch at invocation.
    pub timestamp: f64,
    pub workspace: String,
    pub success: bool,
    pub diagnostics: Vec<Diagnostic>,
}

impl BuildReport {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: not a JSON object")]
    InvalidJson { line: usize },
    #[error("line {line}: diagnostic record lacks `{field}`")]
    MalformedRecord { line: usize, field: &'static str },
}

/// Parses newline-delimited JSON into diagnostics, in stream order.
pub fn parse_diagnostic_stream(stream: &str) -> Result<Vec<Diagnostic>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in stream.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let value: Value =
            serde_json::from_str(raw).map_err(|_| ParseError::InvalidJson { line })?;
        let Value::Object(obj) = value else {
            return Err(ParseError::InvalidJson { line });
        };
        let Some(record) = diagnostic_record(&obj) else {
            continue;
        };
        if let Some(diag) = map_record(record, line)? {
            out.push(diag);
        }
    }
    Ok(out)
}

enum Record<'a> {
    Rustc(&'a Map<String, Value>),
    Canonical(&'a Map<String, Value>),
}

fn diagnostic_record(obj: &Map<String, Value>) -> Option<Record<'_>> {
    if let Some(reason) = obj.get("reason") {
        if reason.as_str() != Some("compiler-message") {
            return None;
        }
        return match obj.get("message") {
            Some(Value::Object(inner)) => Some(Record::Rustc(inner)),
            // An envelope without a usable payload is still a claimed diagnostic.
            _ => Some(Record::Rustc(obj)),
        };
    }
    if let Some(kind) = obj.get("$message_type") {
        return (kind.as_str() == Some("diagnostic")).then_some(Record::Rustc(obj));
    }
    if obj.contains_key("severity") {
        return Some(Record::Canonical(obj));
    }
    if obj.contains_key("level") {
        return Some(Record::Rustc(obj));
    }
    None
}

fn map_record(record: Record<'_>, line: usize) -> Result<Option<Diagnostic>, ParseError> {
    match record {
        Record::Canonical(obj) => serde_json::from_value::<Diagnostic>(Value::Object(obj.clone()))
            .map(Some)
            .map_err(|_| {
                let field = if obj.get("message").and_then(Value::as_str).is_none() {
                    "message"
                } else {
                    "spans"
                };
                ParseError::MalformedRecord { line, field }
            }),
        Record::Rustc(obj) => {
            let diag = map_rustc(obj, line)?;
            // rustc's trailing "aborting due to N previous errors" carries no location.
            if diag.is_error()
                && diag.code.is_none()
                && diag.spans.is_empty()
                && diag.message.starts_with("aborting due to")
            {
                return Ok(None);
            }
            Ok(Some(diag))
        }
    }
}

fn map_rustc(obj: &Map<String, Value>, line: usize) -> Result<Diagnostic, ParseError> {
    let message = obj
        .get("message")
        .and_then(Value::as_str)
        .ok_or(ParseError::MalformedRecord { line, field: "message" })?
        .to_string();
    let spans = obj
        .get("spans")
        .and_then(Value::as_array)
        .ok_or(ParseError::MalformedRecord { line, field: "spans" })?
        .iter()
        .map(|s| map_span(s).ok_or(ParseError::MalformedRecord { line, field: "spans" }))
        .collect::<Result<Vec<_>, _>>()?;
    let (code, summary) = match obj.get("code") {
        Some(Value::Object(c)) => (
            c.get("code").and_then(Value::as_str).map(str::to_string),
            c.get("explanation").and_then(Value::as_str).and_then(explanation_summary),
        ),
        Some(Value::String(s)) => (Some(s.clone()), None),
        _ => (None, None),
    };
    let severity = Severity::from_level(obj.get("level").and_then(Value::as_str).unwrap_or("note"));
    let children = match obj.get("children").and_then(Value::as_array) {
        Some(children) => children
            .iter()
            .filter_map(Value::as_object)
            .map(|c| map_rustc(c, line))
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    let rendered = obj.get("rendered").and_then(Value::as_str).map(str::to_string);
    Ok(Diagnostic { code, severity, message, spans, children, rendered, summary })
}

fn explanation_summary(text: &str) -> Option<String> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty())?;
    let first = first.strip_prefix("#### Note:").unwrap_or(first).trim();
    Some(first.trim_end_matches('.').to_string())
}

fn map_span(value: &Value) -> Option<SourceSpan> {
    let obj = value.as_object()?;
    let num = |key: &str| obj.get(key).and_then(Value::as_u64).map(|n| n as u32);
    let start = SourcePosition::new(num("line_start")?, num("column_start")?);
    let mut end = SourcePosition::new(num("line_end")?, num("column_end")?);
    if end < start {
        end = start;
    }
    Some(SourceSpan {
        file: obj.get("file_name")?.as_str()?.to_string(),
        start,
        end,
        label: obj.get("label").and_then(Value::as_str).map(str::to_string),
        is_primary: obj.get("is_primary").and_then(Value::as_bool).unwrap_or(false),
    })
}

/// Keeps the diagnostics whose code is in `codes`, preserving order.
pub fn filter_supported<'a, I>(diags: &[Diagnostic], codes: I) -> Vec<Diagnostic>
where
    I: IntoIterator<Item = &'a str>,
{
    let codes: BTreeSet<&str> = codes.into_iter().collect();
    diags
        .iter()
        .filter(|d| d.code.as_deref().is_some_and(|c| codes.contains(c)))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn span(line: u32, primary: bool, label: Option<&str>) -> SourceSpan {
        SourceSpan {
            file: "src/main.rs".into(),
            start: SourcePosition::new(line, 1),
            end: SourcePosition::new(line, 4),
            label: label.map(Into::into),
            is_primary: primary,
        }
    }

    fn diag(code: Option<&str>) -> Diagnostic {
        Diagnostic {
            code: code.map(Into::into),
            severity: Severity::Error,
            message: "borrow of moved value: `x`".into(),
            spans: vec![span(3, true, Some("value used here"))],
            children: vec![],
            rendered: None,
            summary: None,
        }
    }

    #[test]
    fn empty_stream_is_empty() {
        assert_eq!(parse_diagnostic_stream("").unwrap(), vec![]);
        assert_eq!(parse_diagnostic_stream("\n\n").unwrap(), vec![]);
    }

    #[test]
    fn skips_non_diagnostic_records() {
        let stream = concat!(
            r#"{"reason":"compiler-artifact","package_id":"x"}"#, "\n",
            r#"{"$message_type":"artifact","artifact":"out.rmeta","emit":"metadata"}"#, "\n",
            r#"{"reason":"build-finished","success":true}"#, "\n",
        );
        assert!(parse_diagnostic_stream(stream).unwrap().is_empty());
    }

    #[test]
    fn rustc_record_with_object_code() {
        let stream = r#"{"$message_type":"diagnostic","message":"m","code":{"code":"E0499","explanation":"long"},"level":"error","spans":[{"file_name":"a.rs","byte_start":0,"byte_end":1,"line_start":2,"line_end":2,"column_start":3,"column_end":5,"is_primary":true,"text":[],"label":"here","suggested_replacement":null,"expansion":null}],"children":[{"message":"note","code":null,"level":"note","spans":[],"children":[],"rendered":null}],"rendered":"error"}"#;
        let diags = parse_diagnostic_stream(stream).unwrap();
        assert_eq!(diags.len(), 1);
        let d = &diags[0];
        assert_eq!(d.code.as_deref(), Some("E0499"));
        assert_eq!(d.spans[0].start, SourcePosition::new(2, 3));
        assert_eq!(d.spans[0].label.as_deref(), Some("here"));
        assert_eq!(d.children.len(), 1);
        assert_eq!(d.children[0].severity, Severity::Note);
        assert_eq!(d.summary.as_deref(), Some("long"));
    }

    #[test]
    fn drops_aborting_summary() {
        let stream = r#"{"$message_type":"diagnostic","message":"aborting due to 1 previous error","code":null,"level":"error","spans":[],"children":[],"rendered":"error: aborting"}"#;
        assert!(parse_diagnostic_stream(stream).unwrap().is_empty());
    }

    #[test]
    fn failure_note_maps_to_note() {
        let stream = r#"{"reason":"compiler-message","message":{"message":"For more information","code":null,"level":"failure-note","spans":[],"children":[]}}"#;
        let diags = parse_diagnostic_stream(stream).unwrap();
        assert_eq!(diags[0].severity, Severity::Note);
    }

    #[test]
    fn malformed_record_reports_line() {
        let stream = concat!(
            r#"{"reason":"build-finished","success":true}"#, "\n",
            r#"{"reason":"compiler-message","message":{"level":"error","spans":[]}}"#,
        );
        assert_eq!(
            parse_diagnostic_stream(stream),
            Err(ParseError::MalformedRecord { line: 2, field: "message" })
        );
        let stream = r#"{"$message_type":"diagnostic","message":"m","level":"error"}"#;
        assert_eq!(
            parse_diagnostic_stream(stream),
            Err(ParseError::MalformedRecord { line: 1, field: "spans" })
        );
    }

    #[test]
    fn non_json_line_is_rejected() {
        assert_eq!(
            parse_diagnostic_stream("Compiling foo v0.1.0"),
            Err(ParseError::InvalidJson { line: 1 })
        );
    }

    #[test]
    fn canonical_round_trip() {
        let d = diag(Some("E0382"));
        let parsed = parse_diagnostic_stream(&d.to_json()).unwrap();
        assert_eq!(parsed, vec![d]);
    }

    #[test]
    fn filter_keeps_registry_members_in_order() {
        assert!(filter_supported(&[], ["E0382"]).is_empty());
        let input = vec![diag(Some("E0382")), diag(Some("E0308")), diag(None), diag(Some("E0597"))];
        let out = filter_supported(&input, ["E0382", "E0597"]);
        let codes: Vec<_> = out.iter().map(|d| d.code.as_deref().unwrap()).collect();
        assert_eq!(codes, ["E0382", "E0597"]);
    }

    #[test]
    fn backticked_extracts_in_order() {
        assert_eq!(backticked("cannot borrow `v` as `mut` `"), ["v", "mut"]);
        assert!(backticked("no ticks").is_empty());
    }
}
