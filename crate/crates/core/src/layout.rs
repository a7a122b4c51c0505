//! Pixel placement of a plan beside monospace code.
//!
//! Coordinates inside a [`Geometry`] are local to the diagram: the origin
//! is the diagram's top-left corner, which sits on the top edge of the
//! anchor line. Every coordinate is a small dyadic multiple of
//! `char_width` or `line_height`, so scaling the metrics by a power of two
//! (or by an integer, for integral metrics) scales the output exactly.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::plan::{RegionEnd, TailAnchor, VisualizationPlan};
use crate::source::SourceText;

/// Monospace text metrics of the code view, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextMetrics {
    pub font_size: f64,
    pub line_height: f64,
    pub char_width: f64,
    pub tab_width: u32,
}

impl Default for TextMetrics {
    fn default() -> Self {
        Self { font_size: 14.0, line_height: 20.0, char_width: 8.0, tab_width: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LayoutError {
    #[error("text metrics must be strictly positive")]
    InvalidMetrics,
    #[error("lines {start}..={end} fall outside the file (1..={line_count})")]
    RangeOutOfBounds { start: u32, end: u32, line_count: u32 },
    #[error("no extent measured for line {0}")]
    MissingExtent(u32),
}

impl TextMetrics {
    pub fn new(font_size: f64, line_height: f64, char_width: f64, tab_width: u32) -> Result<Self, LayoutError> {
        let m = Self { font_size, line_height, char_width, tab_width };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), LayoutError> {
        let ok = [self.font_size, self.line_height, self.char_width]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0)
            && self.tab_width > 0;
        if ok { Ok(()) } else { Err(LayoutError::InvalidMetrics) }
    }

    /// Scales the pixel fields; `tab_width` is in columns and stays put.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            font_size: self.font_size * factor,
            line_height: self.line_height * factor,
            char_width: self.char_width * factor,
            tab_width: self.tab_width,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineExtent {
    pub line: u32,
    pub visual_columns: u32,
}

/// Visual width of `line` in columns, expanding tabs to the next stop.
pub fn visual_columns(line: &str, tab_width: u32) -> u32 {
    let tab = tab_width.max(1);
    line.chars().fold(0, |col, c| match c {
        '\t' => (col / tab + 1) * tab,
        '\r' | '\n' => col,
        _ => col + 1,
    })
}

/// Measures each line in `lines`, which must lie inside the file.
pub fn measure_lines(
    source: &str,
    lines: RangeInclusive<u32>,
    metrics: &TextMetrics,
) -> Result<Vec<LineExtent>, LayoutError> {
    let text = SourceText::new(source);
    let line_count = text.line_count();
    let (start, end) = (*lines.start(), *lines.end());
    if start == 0 || start > end || end > line_count {
        return Err(LayoutError::RangeOutOfBounds { start, end, line_count });
    }
    Ok(source
        .lines()
        .enumerate()
        .skip(start as usize - 1)
        .take((end - start + 1) as usize)
        .map(|(i, l)| LineExtent { line: i as u32 + 1, visual_columns: visual_columns(l, metrics.tab_width) })
        .collect())
}

/// Extents for every line a plan's diagram covers; lines outside the
/// file (or an unavailable file) measure as zero.
pub fn plan_extents(source: &str, plan: &VisualizationPlan, metrics: &TextMetrics) -> Vec<LineExtent> {
    let Some(first) = plan.first_line() else {
        return Vec::new();
    };
    let last = covered_last_line(plan);
    let text = SourceText::new(source);
    (first..=last)
        .map(|line| LineExtent {
            line,
            visual_columns: text.line(line).map_or(0, |l| visual_columns(l, metrics.tab_width)),
        })
        .collect()
}

/// Last code line the diagram covers, tip rows included.
fn covered_last_line(plan: &VisualizationPlan) -> u32 {
    let last = plan.last_line().unwrap_or(0);
    last + plan.tip.lines.len() as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndMarker {
    /// Horizontal end point.
    Bar,
    /// Arrowhead pointing away from the region (up at the start, down at the end).
    Open,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionGeometry {
    pub x: f64,
    pub y_start: f64,
    pub y_end: f64,
    pub start_marker: EndMarker,
    pub end_marker: EndMarker,
    pub label: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrowGeometry {
    pub tail: Point,
    pub head: Point,
    pub label: Point,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TipGeometry {
    pub x: f64,
    /// Vertical centre of each tip line.
    pub line_centers: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Geometry {
    /// Left edge of the diagram, measured from the left edge of the code.
    pub x_offset: f64,
    pub top_line: u32,
    pub height_lines: u32,
    pub width: f64,
    pub height: f64,
    /// Sizes the renderer needs besides positions.
    pub char_width: f64,
    pub line_height: f64,
    pub font_size: f64,
    pub regions: Vec<RegionGeometry>,
    pub arrows: Vec<ArrowGeometry>,
    pub tip: TipGeometry,
}

impl Geometry {
    /// Lines the diagram occupies, top to bottom.
    pub fn covered_lines(&self) -> Option<RangeInclusive<u32>> {
        (self.height_lines > 0).then(|| self.top_line..=self.top_line + self.height_lines - 1)
    }
}

/// Places `plan` to the right of the code lines it covers.
///
/// `extents` must include every line a region or arrow touches; tip rows
/// without an extent are taken to be past the end of the file.
pub fn compute_geometry(
    plan: &VisualizationPlan,
    extents: &[LineExtent],
    metrics: &TextMetrics,
    margin: f64,
) -> Result<Geometry, LayoutError> {
    metrics.validate()?;
    let (Some(top), Some(last)) = (plan.first_line(), plan.last_line()) else {
        return Ok(Geometry::default());
    };
    let widths: BTreeMap<u32, u32> = extents.iter().map(|e| (e.line, e.visual_columns)).collect();
    for line in plan.component_lines() {
        if !widths.contains_key(&line) {
            return Err(LayoutError::MissingExtent(line));
        }
    }
    let covered_last = covered_last_line(plan);
    let max_cols = widths.range(top..=covered_last).map(|(_, &c)| c).max().unwrap_or(0);

    let cw = metrics.char_width;
    let lh = metrics.line_height;
    let y_top = |line: u32| f64::from(line - top) * lh;
    let y_center = |line: u32| y_top(line) + lh / 2.0;
    let lane_x = |i: usize| cw * (1 + 2 * i as u32) as f64;
    let head_x = cw * (3 + 2 * plan.regions.len() as u32) as f64;
    let label_x = head_x + cw;

    // Per-line cursor (in columns) along the label column.
    let mut cursor: BTreeMap<u32, u32> = BTreeMap::new();
    let mut right_edge = head_x;
    let place = |line: u32, len: u32, cursor: &mut BTreeMap<u32, u32>| -> Point {
        let col = cursor.entry(line).or_insert(0);
        let p = Point { x: label_x + cw * f64::from(*col), y: y_center(line) };
        *col += len + 2;
        p
    };

    let mut arrows = Vec::with_capacity(plan.arrows.len());
    for a in &plan.arrows {
        let head = Point { x: head_x, y: y_center(a.line) };
        let tail = match a.tail_anchor {
            TailAnchor::LineCenter => Point { x: 0.0, y: head.y },
            TailAnchor::RegionEnd { region, end } => {
                let r = &plan.regions[region];
                let y = match end {
                    RegionEnd::Start => y_top(r.start_line),
                    RegionEnd::End => y_top(r.end_line) + lh,
                };
                Point { x: lane_x(region), y }
            }
        };
        let len = char_len(&a.label);
        let label = place(a.line, len, &mut cursor);
        right_edge = right_edge.max(label.x + cw * f64::from(len));
        arrows.push(ArrowGeometry { tail, head, label });
    }

    let mut regions = Vec::with_capacity(plan.regions.len());
    for (i, r) in plan.regions.iter().enumerate() {
        let len = char_len(&r.label);
        let line = label_line(r.start_line, r.end_line, &cursor);
        let label = place(line, len, &mut cursor);
        right_edge = right_edge.max(label.x + cw * f64::from(len));
        regions.push(RegionGeometry {
            x: lane_x(i),
            y_start: y_top(r.start_line),
            y_end: y_top(r.end_line) + lh,
            start_marker: if r.open_start { EndMarker::Open } else { EndMarker::Bar },
            end_marker: if r.open_end { EndMarker::Open } else { EndMarker::Bar },
            label,
        });
    }

    let line_centers: Vec<f64> = (0..plan.tip.lines.len() as u32).map(|j| y_center(last + 1 + j)).collect();
    for l in &plan.tip.lines {
        right_edge = right_edge.max(cw * f64::from(char_len(l)));
    }

    let height_lines = covered_last - top + 1;
    Ok(Geometry {
        x_offset: cw * f64::from(max_cols) + margin,
        top_line: top,
        height_lines,
        width: right_edge + cw,
        height: lh * f64::from(height_lines),
        char_width: cw,
        line_height: lh,
        font_size: metrics.font_size,
        regions,
        arrows,
        tip: TipGeometry { x: 0.0, line_centers },
    })
}

fn char_len(s: &str) -> u32 {
    s.chars().count() as u32
}

/// Free line inside `start..=end` closest to the middle; falls back to the
/// middle line itself when every line already carries a label.
fn label_line(start: u32, end: u32, cursor: &BTreeMap<u32, u32>) -> u32 {
    let twice_mid = start + end;
    let by_distance = |l: &u32| (l * 2).abs_diff(twice_mid);
    (start..=end)
        .filter(|l| cursor.get(l).copied().unwrap_or(0) == 0)
        .min_by_key(by_distance)
        .unwrap_or_else(|| (start..=end).min_by_key(by_distance).unwrap_or(start))
}
