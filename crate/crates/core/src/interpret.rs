//! Turns supported borrow-checker diagnostics into [`VisualizationPlan`]s.
//!
//! Each registered error code has one rule. Rules read the labeled spans
//! of the diagnostic first and the message text second: span labels are
//! stable across compiler releases in a way free-form messages are not.
//! A diagnostic whose labels do not fit its rule is reported as a
//! [`InterpretError::PatternMismatch`], which usually means the compiler's
//! wording drifted.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::diagnostic::{BuildReport, Diagnostic, SourceSpan};
use crate::plan::{Arrow, Level, Region, RegionEnd, TailAnchor, Tip, VisualizationPlan};
use crate::source::SourceText;

/// Interpretation rule attached to a supported code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    UseAfterMove,
    ClosureOutlivesFunction,
    DoubleMutableBorrow,
    BorrowKindConflict,
    UseWhileMutablyBorrowed,
    MoveWhileBorrowed,
    AssignWhileBorrowed,
    DroppedWhileBorrowed,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::UseAfterMove => "use_after_move",
            Rule::ClosureOutlivesFunction => "closure_outlives_function",
            Rule::DoubleMutableBorrow => "double_mutable_borrow",
            Rule::BorrowKindConflict => "borrow_kind_conflict",
            Rule::UseWhileMutablyBorrowed => "use_while_mutably_borrowed",
            Rule::MoveWhileBorrowed => "move_while_borrowed",
            Rule::AssignWhileBorrowed => "assign_while_borrowed",
            Rule::DroppedWhileBorrowed => "dropped_while_borrowed",
        }
    }
}

const BUILTIN: [(&str, Rule); 8] = [
    ("E0373", Rule::ClosureOutlivesFunction),
    ("E0382", Rule::UseAfterMove),
    ("E0499", Rule::DoubleMutableBorrow),
    ("E0502", Rule::BorrowKindConflict),
    ("E0503", Rule::UseWhileMutablyBorrowed),
    ("E0505", Rule::MoveWhileBorrowed),
    ("E0506", Rule::AssignWhileBorrowed),
    ("E0597", Rule::DroppedWhileBorrowed),
];

/// Codes that can never be removed from a registry.
pub const ALWAYS_SUPPORTED: [&str; 2] = ["E0382", "E0597"];

/// The error codes this build can visualize, each with its rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportedCodeRegistry {
    entries: BTreeMap<String, Rule>,
}

impl Default for SupportedCodeRegistry {
    fn default() -> Self {
        Self { entries: BUILTIN.iter().map(|&(c, r)| (c.to_string(), r)).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no interpretation rule for error code {0}")]
pub struct UnknownCode(pub String);

impl SupportedCodeRegistry {
    /// Restricts the registry to `codes`. E0382 and E0597 stay regardless.
    pub fn with_codes<'a, I>(codes: I) -> Result<Self, UnknownCode>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let all = Self::default();
        let mut entries = BTreeMap::new();
        for code in codes.into_iter().chain(ALWAYS_SUPPORTED) {
            let code = code.trim();
            let rule = all.rule(code).ok_or_else(|| UnknownCode(code.to_string()))?;
            entries.insert(code.to_string(), rule);
        }
        Ok(Self { entries })
    }

    pub fn rule(&self, code: &str) -> Option<Rule> {
        self.entries.get(code).copied()
    }

    pub fn contains(&self, code: &str) -> bool {
        self.entries.contains_key(code)
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpretError {
    #[error("error code {0} is not supported")]
    UnsupportedCode(String),
    #[error("diagnostic has no error code")]
    NoCode,
    #[error("{code}: {reason} (message: {message:?})")]
    PatternMismatch { code: String, reason: String, message: String },
}

/// Why a diagnostic produced no plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SkipReason {
    NoCode,
    UnsupportedCode,
    PatternMismatch { detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skip {
    pub code: Option<String>,
    pub file: Option<String>,
    pub line: Option<u32>,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub plans: Vec<VisualizationPlan>,
    pub skipped: Vec<Skip>,
}

/// Builds the plan for one diagnostic.
///
/// `source` is the text of the diagnosed file, or empty when unavailable.
pub fn interpret(
    diag: &Diagnostic,
    source: &str,
    registry: &SupportedCodeRegistry,
) -> Result<VisualizationPlan, InterpretError> {
    let code = diag.code.as_deref().ok_or(InterpretError::NoCode)?;
    let rule = registry
        .rule(code)
        .ok_or_else(|| InterpretError::UnsupportedCode(code.to_string()))?;
    let ctx = Ctx { diag, code, source: SourceText::new(source) };
    let primary = ctx.primary()?;
    let parts = match rule {
        Rule::UseAfterMove => use_after_move(&ctx, primary)?,
        Rule::ClosureOutlivesFunction => closure_outlives(&ctx, primary)?,
        Rule::DroppedWhileBorrowed => dropped_while_borrowed(&ctx, primary)?,
        Rule::DoubleMutableBorrow
        | Rule::BorrowKindConflict
        | Rule::UseWhileMutablyBorrowed
        | Rule::MoveWhileBorrowed
        | Rule::AssignWhileBorrowed => borrow_conflict(&ctx, rule, primary)?,
    };
    let plan = VisualizationPlan::new(
        code,
        primary.file.clone(),
        diag.message.clone(),
        parts.regions,
        parts.arrows,
        Tip { lines: parts.tip },
    );
    let line_count = (!ctx.source.is_empty()).then(|| ctx.source.line_count());
    plan.validate(line_count).map_err(|e| ctx.mismatch(e.to_string()))?;
    Ok(plan)
}

/// Interprets every error diagnostic of a build.
///
/// `load` returns the text of a file named by a span, or `None` when it is
/// missing or not UTF-8. Failures are collected into `skipped`.
pub fn interpret_all<F>(
    report: &BuildReport,
    registry: &SupportedCodeRegistry,
    mut load: F,
) -> Interpretation
where
    F: FnMut(&str) -> Option<String>,
{
    let mut sources: BTreeMap<String, String> = BTreeMap::new();
    let mut out = Interpretation::default();
    for diag in report.errors() {
        let primary = diag.primary_span().or(diag.spans.first());
        let file = primary.map(|s| s.file.clone());
        let source: &str = match &file {
            Some(f) => sources.entry(f.clone()).or_insert_with(|| load(f).unwrap_or_default()),
            None => "",
        };
        let reason = match interpret(diag, source, registry) {
            Ok(plan) => {
                out.plans.push(plan);
                continue;
            }
            Err(InterpretError::NoCode) => SkipReason::NoCode,
            Err(InterpretError::UnsupportedCode(_)) => SkipReason::UnsupportedCode,
            Err(e @ InterpretError::PatternMismatch { .. }) => {
                SkipReason::PatternMismatch { detail: e.to_string() }
            }
        };
        out.skipped.push(Skip {
            code: diag.code.clone(),
            file,
            line: primary.map(|s| s.start.line),
            reason,
        });
    }
    out
}

struct Parts {
    regions: Vec<Region>,
    arrows: Vec<Arrow>,
    tip: Vec<String>,
}

struct Ctx<'a> {
    diag: &'a Diagnostic,
    code: &'a str,
    source: SourceText<'a>,
}

impl<'a> Ctx<'a> {
    fn mismatch(&self, reason: impl Into<String>) -> InterpretError {
        InterpretError::PatternMismatch {
            code: self.code.to_string(),
            reason: reason.into(),
            message: self.diag.message.clone(),
        }
    }

    fn primary(&self) -> Result<&'a SourceSpan, InterpretError> {
        self.diag.primary_span().ok_or_else(|| self.mismatch("no primary span"))
    }

    /// First quoted identifier in the message.
    fn subject(&self) -> Result<&'a str, InterpretError> {
        self.diag
            .quoted_identifiers()
            .into_iter()
            .next()
            .ok_or_else(|| self.mismatch("message names no variable"))
    }

    fn secondary(&self, pred: impl Fn(&str) -> bool) -> Option<&'a SourceSpan> {
        self.diag.spans.iter().find(|s| !s.is_primary && pred(s.label_str()))
    }

    fn child_span(&self, pred: impl Fn(&str) -> bool) -> Option<&'a SourceSpan> {
        self.diag
            .children
            .iter()
            .filter(|c| pred(&c.message))
            .flat_map(|c| c.spans.iter())
            .next()
    }

    fn fn_end(&self, line: u32) -> Option<u32> {
        self.source.enclosing_fn_end(line)
    }
}

fn arrow(line: u32, label: String, severity: Level, tail_anchor: TailAnchor) -> Arrow {
    Arrow { line, label, severity, tail_anchor }
}

fn tail_at(region: usize, end: RegionEnd) -> TailAnchor {
    TailAnchor::RegionEnd { region, end }
}

fn use_after_move(ctx: &Ctx<'_>, primary: &SourceSpan) -> Result<Parts, InterpretError> {
    let var = ctx.subject()?;
    let use_line = primary.start.line;
    let moves: Vec<&SourceSpan> = ctx
        .diag
        .spans
        .iter()
        .filter(|s| !s.is_primary && s.label_str().contains("moved"))
        .filter(|s| !s.label_str().starts_with("move occurs because"))
        .collect();
    // The move closest above the use, else the first one.
    let mv = moves
        .iter()
        .filter(|s| s.start.line <= use_line)
        .max_by_key(|s| s.start.line)
        .or(moves.first())
        .ok_or_else(|| ctx.mismatch("no span labeled as the move"))?;
    let move_line = mv.start.line;
    let decl = ctx.secondary(|l| l.starts_with("move occurs because"));

    let region = match decl {
        Some(d) if d.start.line <= move_line => {
            Region::closed(d.start.line, move_line, format!("lifetime of `{var}`"), Level::Information)
        }
        _ => Region {
            open_start: true,
            ..Region::closed(move_line, move_line, format!("lifetime of `{var}`"), Level::Information)
        },
    };
    Ok(Parts {
        regions: vec![region],
        arrows: vec![
            arrow(move_line, move_label(ctx, var, mv), Level::Information, tail_at(0, RegionEnd::End)),
            arrow(use_line, format!("use of moved `{var}`"), Level::Error, TailAnchor::LineCenter),
        ],
        tip: vec![
            format!("`{var}` is used after its value was moved, which ends its lifetime."),
            format!("Borrow `{var}` (`&{var}`) or clone it before the move if it is still needed."),
        ],
    })
}

/// Describes where a moved value went, from the code under the move span.
fn move_label(ctx: &Ctx<'_>, var: &str, mv: &SourceSpan) -> String {
    if mv.label_str().contains("into closure") {
        return format!("`{var}` moved into a closure");
    }
    let Some(line) = ctx.source.line(mv.start.line) else {
        return format!("`{var}` moved");
    };
    let col = (mv.start.column as usize).saturating_sub(1);
    let before = line.char_indices().nth(col).map_or(line, |(i, _)| &line[..i]).trim_end();
    if before.ends_with('=') && !before.ends_with("==") {
        format!("`{var}` moved to another variable")
    } else if before.ends_with('(') || before.ends_with(',') {
        format!("`{var}` moved into a function call")
    } else {
        format!("`{var}` moved")
    }
}

fn closure_outlives(ctx: &Ctx<'_>, primary: &SourceSpan) -> Result<Parts, InterpretError> {
    let var = ctx.subject()?;
    let noun = ctx.diag.message.split(" may outlive").next().unwrap_or("closure").trim();
    let noun = if noun.is_empty() { "closure" } else { noun };
    let start = primary.start.line;
    let borrow = ctx
        .secondary(|l| l.contains("is borrowed here"))
        .map_or(start, |s| s.start.line);
    let end = ctx
        .fn_end(start)
        .or_else(|| ctx.child_span(|m| m.contains("returned here")).map(|s| s.start.line))
        .ok_or_else(|| ctx.mismatch("cannot locate the end of the enclosing function"))?;
    if end < start {
        return Err(ctx.mismatch("function ends before the closure"));
    }
    Ok(Parts {
        regions: vec![Region {
            open_end: true,
            ..Region::closed(start, end, format!("{noun} may live past the function"), Level::Information)
        }],
        arrows: vec![
            arrow(borrow, format!("`{var}` borrowed by the {noun}"), Level::Information, TailAnchor::LineCenter),
            arrow(end, format!("`{var}` dropped when the function returns"), Level::Error, TailAnchor::LineCenter),
        ],
        tip: vec![
            format!("The {noun} borrows `{var}`, but `{var}` is dropped when the function returns."),
            format!("Use a `move` {noun} so it takes ownership of `{var}`."),
        ],
    })
}

fn dropped_while_borrowed(ctx: &Ctx<'_>, primary: &SourceSpan) -> Result<Parts, InterpretError> {
    let var = ctx.subject()?;
    let drop = ctx
        .secondary(|l| l.contains("dropped here"))
        .ok_or_else(|| ctx.mismatch("no span labeled as the drop"))?;
    let drop_line = drop.start.line;
    let captured = ctx.secondary(|l| l.contains("captured here"));
    let borrow_line = captured.map_or(primary.start.line, |s| s.start.line);
    let decl = ctx.secondary(|l| l.contains("declared here"));
    let later = ctx.secondary(|l| l.contains("later") || l.contains("might be used"));
    let outlives = ctx.secondary(|l| l.contains("requires that") && l.contains("borrowed for"));

    let mut regions = Vec::new();
    let label = format!("lifetime of `{var}`");
    regions.push(match decl {
        Some(d) if d.start.line <= drop_line => {
            Region::closed(d.start.line, drop_line, label, Level::Information)
        }
        _ => Region {
            open_start: true,
            ..Region::closed(borrow_line.min(drop_line), drop_line, label, Level::Information)
        },
    });
    if let Some(req) = outlives {
        let start = req.start.line;
        let end = ctx.fn_end(start).unwrap_or(drop_line).max(start);
        let holder = if captured.is_some() { "closure" } else { "borrow" };
        regions.push(Region {
            open_end: true,
            ..Region::closed(start, end, format!("{holder} lives past the function"), Level::Information)
        });
    }

    let holder = if captured.is_some() { "a closure that captured it" } else { "a reference to it" };
    let mut arrows = vec![arrow(
        borrow_line,
        if captured.is_some() {
            format!("`{var}` captured by the closure")
        } else {
            format!("`{var}` borrowed here")
        },
        Level::Information,
        TailAnchor::LineCenter,
    )];
    let drop_severity = if later.is_some() { Level::Information } else { Level::Error };
    arrows.push(arrow(
        drop_line,
        format!("`{var}` dropped here while still borrowed"),
        drop_severity,
        tail_at(0, RegionEnd::End),
    ));
    if let Some(later) = later {
        arrows.push(arrow(
            later.start.line,
            format!("borrow used here, after `{var}` is dropped"),
            Level::Error,
            TailAnchor::LineCenter,
        ));
    }
    Ok(Parts {
        regions,
        arrows,
        tip: vec![
            format!("`{var}` is dropped while {holder} is still in use."),
            format!("Declare `{var}` in an outer scope, or give the borrower an owned value."),
        ],
    })
}

struct ConflictWording {
    region: String,
    first: String,
    conflict: String,
    later: String,
    tip: [String; 2],
}

fn conflict_wording(ctx: &Ctx<'_>, rule: Rule, var: &str) -> Result<ConflictWording, InterpretError> {
    let later = "borrow still used here".to_owned();
    Ok(match rule {
        Rule::DoubleMutableBorrow => ConflictWording {
            region: format!("first mutable borrow of `{var}`"),
            first: format!("`{var}` mutably borrowed"),
            conflict: format!("second mutable borrow of `{var}`"),
            later: "first borrow still used here".to_owned(),
            tip: [
                format!("`{var}` can only be mutably borrowed once at a time."),
                "End the first mutable borrow before taking the second.".to_owned(),
            ],
        },
        Rule::BorrowKindConflict => {
            let msg = &ctx.diag.message;
            let (wanted, held) = if msg.contains("as mutable because it is also borrowed as immutable") {
                ("mutable", "immutable")
            } else if msg.contains("as immutable because it is also borrowed as mutable") {
                ("immutable", "mutable")
            } else {
                return Err(ctx.mismatch("message does not name the two borrow kinds"));
            };
            ConflictWording {
                region: format!("{held} borrow of `{var}`"),
                first: format!("`{var}` borrowed as {held}"),
                conflict: format!("{wanted} borrow of `{var}`"),
                later: format!("{held} borrow still used here"),
                tip: [
                    format!("`{var}` cannot be borrowed as {wanted} while it is borrowed as {held}."),
                    format!("Finish using the {held} borrow before this point, or copy the value out."),
                ],
            }
        }
        Rule::UseWhileMutablyBorrowed => ConflictWording {
            region: format!("mutable borrow of `{var}`"),
            first: format!("`{var}` mutably borrowed"),
            conflict: format!("use of `{var}` while borrowed"),
            later,
            tip: [
                format!("`{var}` cannot be used while a mutable borrow of it is live."),
                "Use the value through the mutable reference, or end the borrow first.".to_owned(),
            ],
        },
        Rule::MoveWhileBorrowed => ConflictWording {
            region: format!("borrow of `{var}`"),
            first: format!("`{var}` borrowed"),
            conflict: format!("`{var}` moved while borrowed"),
            later,
            tip: [
                format!("`{var}` cannot be moved while a borrow of it is still used."),
                format!("Move `{var}` after the last use of the borrow, or clone it."),
            ],
        },
        Rule::AssignWhileBorrowed => ConflictWording {
            region: format!("borrow of `{var}`"),
            first: format!("`{var}` borrowed"),
            conflict: format!("`{var}` assigned while borrowed"),
            later,
            tip: [
                format!("`{var}` cannot be assigned while a borrow of it is still used."),
                "Assign after the last use of the borrow.".to_owned(),
            ],
        },
        _ => return Err(ctx.mismatch("not a borrow-conflict rule")),
    })
}

/// Shared shape: an existing borrow (region) violated by the primary action.
fn borrow_conflict(ctx: &Ctx<'_>, rule: Rule, primary: &SourceSpan) -> Result<Parts, InterpretError> {
    let var = ctx.subject()?;
    let words = conflict_wording(ctx, rule, var)?;
    let conflict_line = primary.start.line;
    let first = ctx
        .secondary(|l| {
            l.contains("borrow")
                && (l.contains("occurs here") || l.contains("borrowed here"))
                && !l.contains("later")
                && !l.contains("might")
        })
        .ok_or_else(|| ctx.mismatch("no span labeled as the first borrow"))?;
    let first_line = first.start.line;
    let later = ctx.secondary(|l| l.contains("later") || l.contains("might be used"));

    let (region, later_arrow) = match later {
        Some(later) => {
            let (lo, hi) = (first_line.min(later.start.line), first_line.max(later.start.line));
            let tail = if later.start.line == hi { tail_at(0, RegionEnd::End) } else { TailAnchor::LineCenter };
            (
                Region::closed(lo, hi, words.region, Level::Information),
                Some(arrow(later.start.line, words.later, Level::Information, tail)),
            )
        }
        None => (
            Region {
                open_end: true,
                ..Region::closed(
                    first_line.min(conflict_line),
                    first_line.max(conflict_line),
                    words.region,
                    Level::Information,
                )
            },
            None,
        ),
    };
    let first_tail = if region.start_line == first_line { tail_at(0, RegionEnd::Start) } else { TailAnchor::LineCenter };
    let mut arrows = vec![
        arrow(first_line, words.first, Level::Information, first_tail),
        arrow(conflict_line, words.conflict, Level::Error, TailAnchor::LineCenter),
    ];
    arrows.extend(later_arrow);
    Ok(Parts { regions: vec![region], arrows, tip: words.tip.into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostic::{Severity, SourcePosition};

    fn span(line: u32, primary: bool, label: &str) -> SourceSpan {
        SourceSpan {
            file: "src/main.rs".into(),
            start: SourcePosition::new(line, 5),
            end: SourcePosition::new(line, 9),
            label: (!label.is_empty()).then(|| label.into()),
            is_primary: primary,
        }
    }

    fn diag(code: &str, message: &str, spans: Vec<SourceSpan>) -> Diagnostic {
        Diagnostic {
            code: Some(code.into()),
            severity: Severity::Error,
            message: message.into(),
            spans,
            children: vec![],
            rendered: None,
            summary: None,
        }
    }

    #[test]
    fn registry_has_eight_codes() {
        let reg = SupportedCodeRegistry::default();
        assert_eq!(reg.len(), 8);
        for code in ALWAYS_SUPPORTED {
            assert!(reg.contains(code));
        }
        assert!(!reg.contains("E0308"));
    }

    #[test]
    fn registry_override_keeps_required_codes() {
        let reg = SupportedCodeRegistry::with_codes(["E0499"]).unwrap();
        let codes: Vec<_> = reg.codes().collect();
        assert_eq!(codes, ["E0382", "E0499", "E0597"]);
        assert_eq!(
            SupportedCodeRegistry::with_codes(["E0308"]),
            Err(UnknownCode("E0308".into()))
        );
    }

    #[test]
    fn unsupported_and_uncoded() {
        let reg = SupportedCodeRegistry::default();
        let d = diag("E0308", "mismatched types", vec![span(2, true, "expected `u32`")]);
        assert_eq!(interpret(&d, "", &reg), Err(InterpretError::UnsupportedCode("E0308".into())));
        let mut d = d;
        d.code = None;
        assert_eq!(interpret(&d, "", &reg), Err(InterpretError::NoCode));
    }

    #[test]
    fn use_after_move_without_declaration_opens_region() {
        let d = diag(
            "E0382",
            "use of moved value: `v`",
            vec![span(4, false, "value moved here"), span(6, true, "value used here after move")],
        );
        let plan = interpret(&d, "", &SupportedCodeRegistry::default()).unwrap();
        assert!(plan.regions[0].open_start);
        assert_eq!((plan.regions[0].start_line, plan.regions[0].end_line), (4, 4));
        assert_eq!(plan.arrows[1].label, "use of moved `v`");
        assert_eq!(plan.arrows[0].label, "`v` moved");
    }

    #[test]
    fn move_label_reads_the_source() {
        let src = "fn f(v: String) {\n    take(v);\n    let w = v;\n}\n";
        let reg = SupportedCodeRegistry::default();
        let mk = |col| {
            let mut mv = span(2, false, "value moved here");
            mv.start.column = col;
            diag("E0382", "use of moved value: `v`", vec![mv, span(3, true, "value used here after move")])
        };
        let plan = interpret(&mk(10), src, &reg).unwrap();
        assert_eq!(plan.arrows[0].label, "`v` moved into a function call");
    }

    #[test]
    fn missing_move_span_is_a_pattern_mismatch() {
        let d = diag("E0382", "borrow of moved value: `x`", vec![span(5, true, "value borrowed here")]);
        let err = interpret(&d, "", &SupportedCodeRegistry::default()).unwrap_err();
        assert!(matches!(err, InterpretError::PatternMismatch { .. }));
    }

    #[test]
    fn e0502_needs_borrow_kinds_in_message() {
        let spans = vec![
            span(5, false, "immutable borrow occurs here"),
            span(6, true, "mutable borrow occurs here"),
            span(7, false, "immutable borrow later used here"),
        ];
        let reg = SupportedCodeRegistry::default();
        let good = diag(
            "E0502",
            "cannot borrow `v` as mutable because it is also borrowed as immutable",
            spans.clone(),
        );
        let plan = interpret(&good, "", &reg).unwrap();
        assert_eq!(plan.regions[0].label, "immutable borrow of `v`");
        assert_eq!(plan.arrows[1].label, "mutable borrow of `v`");
        let drifted = diag("E0502", "conflicting borrows of `v`", spans);
        assert!(matches!(interpret(&drifted, "", &reg), Err(InterpretError::PatternMismatch { .. })));
    }

    #[test]
    fn conflict_without_later_use_is_open() {
        let d = diag(
            "E0506",
            "cannot assign to `t` because it is borrowed",
            vec![span(3, false, "`t` is borrowed here"), span(5, true, "`t` is assigned to here")],
        );
        let plan = interpret(&d, "", &SupportedCodeRegistry::default()).unwrap();
        let r = &plan.regions[0];
        assert!(r.open_end && !r.open_start);
        assert_eq!((r.start_line, r.end_line), (3, 5));
        assert_eq!(plan.arrows.len(), 2);
    }

    #[test]
    fn lines_past_end_of_source_are_rejected() {
        let d = diag(
            "E0382",
            "use of moved value: `v`",
            vec![span(4, false, "value moved here"), span(60, true, "value used here after move")],
        );
        let src = "fn main() {}\n";
        assert!(matches!(
            interpret(&d, src, &SupportedCodeRegistry::default()),
            Err(InterpretError::PatternMismatch { .. })
        ));
    }

    #[test]
    fn interpret_all_collects_skips() {
        let report = BuildReport {
            timestamp: 0.0,
            workspace: "w".into(),
            success: false,
            diagnostics: vec![
                diag("E0308", "mismatched types", vec![span(2, true, "")]),
                Diagnostic { severity: Severity::Warning, ..diag("E0382", "unused", vec![]) },
            ],
        };
        let out = interpret_all(&report, &SupportedCodeRegistry::default(), |_| None);
        assert!(out.plans.is_empty());
        assert_eq!(out.skipped.len(), 1);
        assert_eq!(out.skipped[0].reason, SkipReason::UnsupportedCode);
        assert_eq!(out.skipped[0].line, Some(2));
    }
}
