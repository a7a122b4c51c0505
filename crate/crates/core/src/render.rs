//! SVG and standalone HTML output.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::layout::{compute_geometry, plan_extents, EndMarker, Geometry, LayoutError, Point, TextMetrics};
use crate::plan::{Level, VisualizationPlan};

/// Severity colors. The first information component of a plan uses
/// `information`, later ones `information_alt`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Palette {
    pub error: String,
    pub information: String,
    pub information_alt: String,
}

impl Default for Palette {
    fn default() -> Self {
        Self {
            error: "#d32f2f".to_string(),
            information: "#1f6feb".to_string(),
            information_alt: "#8e44ad".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvgDocument {
    pub text: String,
    pub width: f64,
    pub height: f64,
}

/// Renders a plan at the given geometry.
pub fn render_svg(plan: &VisualizationPlan, geom: &Geometry, palette: &Palette) -> SvgDocument {
    debug_assert!(plan.is_empty() || plan.has_error_component());
    let cw = geom.char_width;
    let lh = geom.line_height;
    let stroke = cw / 4.0;
    let mut info_seen = 0usize;
    let mut color_of = |level: Level| -> &str {
        match level {
            Level::Error => &palette.error,
            Level::Information => {
                info_seen += 1;
                if info_seen == 1 { &palette.information } else { &palette.information_alt }
            }
        }
    };

    let mut out = String::new();
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="monospace" font-size="{fs}" data-code="{code}">"#,
        w = geom.width,
        h = geom.height,
        fs = geom.font_size,
        code = escape(&plan.code),
    );

    for (i, (region, g)) in plan.regions.iter().zip(&geom.regions).enumerate() {
        let color = escape(color_of(region.severity));
        let _ = write!(
            out,
            r#"<g class="region" id="region-{i}" data-severity="{sev}" stroke="{color}" fill="{color}" stroke-width="{stroke}">"#,
            sev = level_name(region.severity),
        );
        line(&mut out, "region-span", Point { x: g.x, y: g.y_start }, Point { x: g.x, y: g.y_end });
        end_marker(&mut out, g.start_marker, g.x, g.y_start, cw, lh / 4.0);
        end_marker(&mut out, g.end_marker, g.x, g.y_end, cw, -lh / 4.0);
        text(&mut out, "label", None, g.label, &region.label);
        out.push_str("</g>");
    }

    for (i, (arrow, g)) in plan.arrows.iter().zip(&geom.arrows).enumerate() {
        let color = escape(color_of(arrow.severity));
        let _ = write!(
            out,
            r#"<g class="arrow" id="arrow-{i}" data-severity="{sev}" stroke="{color}" fill="{color}" stroke-width="{stroke}">"#,
            sev = level_name(arrow.severity),
        );
        line(&mut out, "shaft", g.tail, Point { x: g.head.x - cw, y: g.head.y });
        polygon(
            &mut out,
            "head",
            &[g.head, Point { x: g.head.x - cw, y: g.head.y - lh / 4.0 }, Point { x: g.head.x - cw, y: g.head.y + lh / 4.0 }],
        );
        text(&mut out, "label", None, g.label, &arrow.label);
        out.push_str("</g>");
    }

    if !plan.tip.lines.is_empty() {
        out.push_str(r#"<g class="tip" id="tip" fill="currentColor">"#);
        for (j, (l, &y)) in plan.tip.lines.iter().zip(&geom.tip.line_centers).enumerate() {
            let id = format!("tip-line-{j}");
            text(&mut out, "tip-line", Some(&id), Point { x: geom.tip.x, y }, l);
        }
        out.push_str("</g>");
    }
    out.push_str("</svg>");
    SvgDocument { text: out, width: geom.width, height: geom.height }
}

fn level_name(level: Level) -> &'static str {
    match level {
        Level::Error => "error",
        Level::Information => "information",
    }
}

fn line(out: &mut String, class: &str, a: Point, b: Point) {
    let _ = write!(out, r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#, a.x, a.y, b.x, b.y);
}

fn polygon(out: &mut String, class: &str, pts: &[Point]) {
    let _ = write!(out, r#"<polygon class="{class}" points=""#);
    for (i, p) in pts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{},{}", p.x, p.y);
    }
    out.push_str(r#""/>"#);
}

/// `inward` is the signed distance from the end point into the region.
fn end_marker(out: &mut String, marker: EndMarker, x: f64, y: f64, cw: f64, inward: f64) {
    match marker {
        EndMarker::Bar => line(out, "end-point", Point { x: x - cw / 2.0, y }, Point { x: x + cw / 2.0, y }),
        EndMarker::Open => polygon(
            out,
            "open-end",
            &[Point { x, y }, Point { x: x - cw / 2.0, y: y + inward }, Point { x: x + cw / 2.0, y: y + inward }],
        ),
    }
}

fn text(out: &mut String, class: &str, id: Option<&str>, at: Point, body: &str) {
    let _ = write!(out, r#"<text class="{class}""#);
    if let Some(id) = id {
        let _ = write!(out, r#" id="{id}""#);
    }
    let _ = write!(
        out,
        r#" x="{}" y="{}" dominant-baseline="central" stroke="none">{}</text>"#,
        at.x,
        at.y,
        escape(body)
    );
}

/// Escapes text for XML/HTML content and attribute values.
pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

/// Rendering settings shared by the SVG and HTML outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderOptions {
    pub metrics: TextMetrics,
    /// Gap between the widest code line and a diagram, and between
    /// horizontally stacked diagrams.
    pub margin: f64,
    pub palette: Palette,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { metrics: TextMetrics::default(), margin: 16.0, palette: Palette::default() }
    }
}

/// A plan with its geometry and rendered SVG.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderedPlan {
    pub plan: VisualizationPlan,
    pub geometry: Geometry,
    pub svg: SvgDocument,
}

pub fn render_plan(plan: &VisualizationPlan, source: &str, opts: &RenderOptions) -> Result<RenderedPlan, LayoutError> {
    let extents = plan_extents(source, plan, &opts.metrics);
    let geometry = compute_geometry(plan, &extents, &opts.metrics, opts.margin)?;
    let svg = render_svg(plan, &geometry, &opts.palette);
    Ok(RenderedPlan { plan: plan.clone(), geometry, svg })
}

/// Left edges of diagrams after horizontal stacking.
///
/// Diagrams are placed in order; one whose covered lines overlap an
/// earlier diagram moves right of it, leaving `gutter` pixels between.
pub fn stack_diagrams(geoms: &[Geometry], gutter: f64) -> Vec<f64> {
    let mut lefts: Vec<f64> = Vec::with_capacity(geoms.len());
    for (i, g) in geoms.iter().enumerate() {
        let mut left = g.x_offset;
        if let Some(range) = g.covered_lines() {
            // Re-scan until stable: moving right can create new overlaps.
            loop {
                let before = left;
                for (j, prev) in geoms[..i].iter().enumerate() {
                    let Some(prange) = prev.covered_lines() else { continue };
                    let vertical = range.start() <= prange.end() && prange.start() <= range.end();
                    let horizontal = left < lefts[j] + prev.width + gutter && lefts[j] < left + g.width + gutter;
                    if vertical && horizontal {
                        left = left.max(lefts[j] + prev.width + gutter);
                    }
                }
                if left == before {
                    break;
                }
            }
        }
        lefts.push(left);
    }
    lefts
}

/// A self-contained page: code on the left, each diagram positioned to
/// its right and aligned with its anchor line.
pub fn render_html_report(
    source: &str,
    plans: &[VisualizationPlan],
    opts: &RenderOptions,
) -> Result<String, LayoutError> {
    let m = &opts.metrics;
    m.validate()?;
    let rendered = plans.iter().map(|p| render_plan(p, source, opts)).collect::<Result<Vec<_>, _>>()?;
    let geoms: Vec<Geometry> = rendered.iter().map(|r| r.geometry.clone()).collect();
    let lefts = stack_diagrams(&geoms, opts.margin);
    let title = plans.first().map_or("source", |p| p.file.as_str());

    let mut out = String::new();
    let _ = write!(
        out,
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{title}</title>\n<style>\n\
body {{ margin: 0; padding: 16px; background: #ffffff; color: #1b1b1b; }}\n\
.view {{ display: flex; font-family: monospace; font-size: {fs}px; line-height: {lh}px; }}\n\
.gutter {{ color: #8a8a8a; text-align: right; padding-right: {cw}px; user-select: none; white-space: pre; }}\n\
.code {{ position: relative; }}\n\
.code pre {{ margin: 0; font: inherit; line-height: inherit; white-space: pre; tab-size: {tab}; }}\n\
details.plan {{ position: absolute; }}\n\
details.plan > summary {{ position: absolute; left: -{lh}px; top: 0; list-style: none; cursor: pointer; color: {err}; }}\n\
details.plan > summary::-webkit-details-marker {{ display: none; }}\n\
details.plan > summary::before {{ content: \"\\25B6\"; }}\n\
details.plan[open] > summary::before {{ content: \"\\25BC\"; }}\n\
details.plan svg {{ display: block; }}\n\
</style>\n</head>\n<body>\n",
        title = escape(title),
        fs = m.font_size,
        lh = m.line_height,
        cw = m.char_width,
        tab = m.tab_width,
        err = escape(&opts.palette.error),
    );

    let line_count = source.lines().count().max(1);
    out.push_str("<div class=\"view\">\n<div class=\"gutter\">");
    for n in 1..=line_count {
        if n > 1 {
            out.push('\n');
        }
        let _ = write!(out, "{n}");
    }
    out.push_str("</div>\n<div class=\"code\">\n<pre>");
    out.push_str(&escape(source.strip_suffix('\n').unwrap_or(source)));
    out.push_str("</pre>\n");

    for (i, (r, left)) in rendered.iter().zip(&lefts).enumerate() {
        let top = m.line_height * f64::from(r.geometry.top_line.saturating_sub(1));
        let _ = writeln!(
            out,
            "<details class=\"plan\" id=\"plan-{i}\" open data-code=\"{code}\" data-left=\"{left}\" data-top=\"{top}\" data-width=\"{w}\" style=\"left: {left}px; top: {top}px;\">\
<summary title=\"{msg}\"></summary>{svg}</details>",
            code = escape(&r.plan.code),
            w = r.geometry.width,
            msg = escape(&r.plan.message),
            svg = r.svg.text,
        );
    }
    out.push_str("</div>\n</div>\n</body>\n</html>\n");
    Ok(out)
}
