//! Interpretation of diagnostics captured from real `cargo check` runs.

mod common;

use borrowlens_core::diagnostic::{filter_supported, Severity};
use borrowlens_core::interpret::{interpret, InterpretError, SkipReason, ALWAYS_SUPPORTED};
use borrowlens_core::plan::{Arrow, Level, Region, RegionEnd, TailAnchor};
use borrowlens_core::telemetry::{ErrorFingerprint, NO_CODE};
use borrowlens_core::{interpret_all, BuildReport, SupportedCodeRegistry};

use common::{diagnostics, source, SUPPORTED_FIXTURES};

fn report(name: &str) -> BuildReport {
    let diagnostics = diagnostics(name);
    let success = !diagnostics.iter().any(|d| d.is_error());
    BuildReport { timestamp: 0.0, workspace: name.into(), success, diagnostics }
}

fn interpret_fixture(name: &str) -> borrowlens_core::Interpretation {
    let src = source(name);
    interpret_all(&report(name), &SupportedCodeRegistry::default(), |file| {
        assert_eq!(file, "src/main.rs");
        Some(src.clone())
    })
}

#[test]
fn every_stream_parses() {
    for entry in std::fs::read_dir(common::fixtures_dir().join("streams")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        borrowlens_core::diagnostic::parse_diagnostic_stream(&text)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn clean_build_has_no_errors() {
    let r = report("clean");
    assert!(r.success);
    assert_eq!(r.errors().count(), 0);
    assert_eq!(interpret_fixture("clean"), Default::default());
}

#[test]
fn each_supported_code_yields_a_valid_plan() {
    let registry = SupportedCodeRegistry::default();
    let mut seen = std::collections::BTreeSet::new();
    for (name, code) in SUPPORTED_FIXTURES {
        let out = interpret_fixture(name);
        let plans: Vec<_> = out.plans.iter().filter(|p| p.code == code).collect();
        assert_eq!(plans.len(), 1, "{name}: {out:?}");
        let plan = plans[0];
        let lines = source(name).lines().count() as u32;
        plan.validate(Some(lines)).unwrap();
        assert!(plan.has_error_component(), "{name}");
        assert!(!plan.tip.lines.is_empty(), "{name}");
        assert!(plan.tip.lines.iter().any(|l| l.contains('`')), "{name}: tip names no identifier");
        seen.insert(code);
    }
    let registered: std::collections::BTreeSet<&str> = registry.codes().collect();
    assert_eq!(seen, registered);
}

#[test]
fn use_after_move_plan_matches_figure() {
    let out = interpret_fixture("fig1_use_after_move");
    assert!(out.skipped.is_empty());
    let [plan] = &out.plans[..] else { panic!("{out:?}") };
    assert_eq!(plan.code, "E0382");
    assert_eq!(plan.anchor_line, 10);
    assert_eq!(
        plan.regions,
        [Region::closed(10, 12, "lifetime of `x`", Level::Information)]
    );
    assert_eq!(
        plan.arrows,
        [
            Arrow {
                line: 12,
                label: "`x` moved to another variable".into(),
                severity: Level::Information,
                tail_anchor: TailAnchor::RegionEnd { region: 0, end: RegionEnd::End },
            },
            Arrow {
                line: 15,
                label: "use of moved `x`".into(),
                severity: Level::Error,
                tail_anchor: TailAnchor::LineCenter,
            },
        ]
    );
    assert_eq!(plan.tip.lines.len(), 2);
}

#[test]
fn closure_capture_plan_has_region_open_at_function_end() {
    let out = interpret_fixture("fig2_closure_capture");
    let [plan] = &out.plans[..] else { panic!("{out:?}") };
    assert_eq!(plan.code, "E0597");
    let open: Vec<_> = plan.regions.iter().filter(|r| r.is_open()).collect();
    assert_eq!(open.len(), 1);
    let r = open[0];
    assert!(r.open_end && !r.open_start);
    // `make_counter` closes on line 15.
    assert_eq!(r.end_line, 15);
    assert_eq!(r.start_line, 10);
    assert!(plan.arrows.iter().any(|a| a.line == 15 && a.severity == Level::Error));
    assert!(plan.arrows.iter().any(|a| a.line == 10 && a.severity == Level::Information));
}

#[test]
fn closure_outliving_function_is_open_at_its_end() {
    let out = interpret_fixture("e0373_closure_outlives");
    let [plan] = &out.plans[..] else { panic!("{out:?}") };
    let [r] = &plan.regions[..] else { panic!() };
    assert_eq!((r.start_line, r.end_line, r.open_start, r.open_end), (5, 6, false, true));
}

#[test]
fn conflicts_span_from_first_borrow_to_later_use() {
    let expected = [
        ("e0499_double_mut_borrow", 5, 6, 7),
        ("e0502_mut_while_shared", 5, 6, 7),
        ("e0503_use_while_mut", 5, 6, 7),
        ("e0505_move_while_borrowed", 7, 8, 9),
        ("e0506_assign_while_borrowed", 5, 6, 7),
    ];
    for (name, first, conflict, later) in expected {
        let out = interpret_fixture(name);
        let [plan] = &out.plans[..] else { panic!("{name}: {out:?}") };
        let [r] = &plan.regions[..] else { panic!("{name}") };
        assert_eq!((r.start_line, r.end_line), (first, later), "{name}");
        assert!(!r.is_open(), "{name}");
        let errors: Vec<u32> =
            plan.arrows.iter().filter(|a| a.severity == Level::Error).map(|a| a.line).collect();
        assert_eq!(errors, [conflict], "{name}");
    }
}

#[test]
fn dropped_while_borrowed_marks_later_use_as_error() {
    let out = interpret_fixture("e0597_dropped_while_borrowed");
    let [plan] = &out.plans[..] else { panic!("{out:?}") };
    assert_eq!(plan.regions, [Region::closed(6, 8, "lifetime of `x`", Level::Information)]);
    let lines: Vec<(u32, Level)> = plan.arrows.iter().map(|a| (a.line, a.severity)).collect();
    assert_eq!(lines, [(7, Level::Information), (8, Level::Information), (9, Level::Error)]);
}

#[test]
fn unsupported_and_codeless_errors_are_skipped() {
    let out = interpret_fixture("mixed_e0308_e0382");
    assert_eq!(out.plans.len(), 1);
    assert_eq!(out.plans[0].code, "E0382");
    assert_eq!(out.skipped.len(), 1);
    assert_eq!(out.skipped[0].code.as_deref(), Some("E0308"));
    assert_eq!(out.skipped[0].reason, SkipReason::UnsupportedCode);

    let out = interpret_fixture("e0308_only");
    assert!(out.plans.is_empty());
    assert_eq!(out.skipped[0].reason, SkipReason::UnsupportedCode);

    let out = interpret_fixture("syntax_error");
    assert!(out.plans.is_empty());
    assert_eq!(out.skipped.len(), 1);
    assert_eq!(out.skipped[0].code, None);
    assert_eq!(out.skipped[0].reason, SkipReason::NoCode);
}

#[test]
fn syntax_error_fingerprint_uses_placeholder_code() {
    let r = report("syntax_error");
    let errors: Vec<_> = r.errors().collect();
    assert!(!errors.is_empty());
    assert!(errors.iter().all(|d| d.code.is_none()));
    assert_eq!(ErrorFingerprint::of(errors[0]).code, NO_CODE);
}

#[test]
fn failure_notes_are_not_errors() {
    let diags = diagnostics("fig1_use_after_move");
    assert!(diags.iter().any(|d| d.severity == Severity::Note && d.spans.is_empty()));
    assert_eq!(diags.iter().filter(|d| d.is_error()).count(), 1);
}

#[test]
fn narrowed_registry_keeps_always_supported_codes() {
    let registry = SupportedCodeRegistry::with_codes(["E0499"]).unwrap();
    for code in ALWAYS_SUPPORTED {
        assert!(registry.contains(code));
    }
    assert!(registry.contains("E0499"));
    assert!(!registry.contains("E0502"));

    let diags = diagnostics("e0502_mut_while_shared");
    let err = diags.iter().find(|d| d.is_error()).unwrap();
    assert_eq!(
        interpret(err, &source("e0502_mut_while_shared"), &registry),
        Err(InterpretError::UnsupportedCode("E0502".into()))
    );
    assert!(SupportedCodeRegistry::with_codes(["E0999"]).is_err());
}

#[test]
fn filter_keeps_only_listed_codes() {
    let diags = diagnostics("mixed_e0308_e0382");
    let kept = filter_supported(&diags, ["E0382"]);
    assert_eq!(kept.len(), 1);
    assert_eq!(kept[0].code.as_deref(), Some("E0382"));
}

#[test]
fn plan_without_source_text_still_valid() {
    let diags = diagnostics("fig1_use_after_move");
    let err = diags.iter().find(|d| d.is_error()).unwrap();
    let plan = interpret(err, "", &SupportedCodeRegistry::default()).unwrap();
    plan.validate(None).unwrap();
    assert_eq!(plan.regions[0].start_line, 10);
    assert_eq!(plan.arrows.len(), 2);
}

#[test]
fn plan_json_round_trips() {
    for (name, _) in SUPPORTED_FIXTURES {
        for plan in interpret_fixture(name).plans {
            let json = serde_json::to_string(&plan).unwrap();
            let back: borrowlens_core::VisualizationPlan = serde_json::from_str(&json).unwrap();
            assert_eq!(back, plan);
        }
    }
}
