//! Diagram content for one error: regions, arrows and a tip.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Component severity. Matches the two compiler levels a diagram shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Error,
    Information,
}

/// A vertical span over lines `start_line..=end_line`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub start_line: u32,
    pub end_line: u32,
    pub open_start: bool,
    pub open_end: bool,
    pub label: String,
    pub severity: Level,
}

impl Region {
    pub fn closed(start_line: u32, end_line: u32, label: impl Into<String>, severity: Level) -> Self {
        Self { start_line, end_line, open_start: false, open_end: false, label: label.into(), severity }
    }

    pub fn is_open(&self) -> bool {
        self.open_start || self.open_end
    }

    pub fn is_closed_at(&self, end: RegionEnd) -> bool {
        match end {
            RegionEnd::Start => !self.open_start,
            RegionEnd::End => !self.open_end,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionEnd {
    Start,
    End,
}

/// Where an arrow's tail starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailAnchor {
    /// Left edge of the diagram, on the arrow's own line.
    LineCenter,
    /// The end point of a region in the same plan.
    RegionEnd { region: usize, end: RegionEnd },
}

/// A single-line event marker pointing right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub line: u32,
    pub label: String,
    pub severity: Level,
    pub tail_anchor: TailAnchor,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tip {
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisualizationPlan {
    pub code: String,
    pub file: String,
    pub message: String,
    pub anchor_line: u32,
    pub regions: Vec<Region>,
    pub arrows: Vec<Arrow>,
    pub tip: Tip,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("region {0} ends before it starts")]
    InvertedRegion(usize),
    #[error("region {0} is open at both ends")]
    DoublyOpenRegion(usize),
    #[error("arrow {0} is anchored to a missing region")]
    DanglingAnchor(usize),
    #[error("arrow {0} is anchored to an open region end")]
    OpenEndAnchor(usize),
    #[error("plan has no error-level component")]
    NoErrorComponent,
    #[error("plan has an empty tip")]
    EmptyTip,
    #[error("anchor line {found} differs from first component line {expected}")]
    AnchorMismatch { expected: u32, found: u32 },
    #[error("line {line} lies outside 1..={max}")]
    LineOutOfRange { line: u32, max: u32 },
}

impl VisualizationPlan {
    /// Builds a plan, deriving `anchor_line` from the components.
    pub fn new(
        code: impl Into<String>,
        file: impl Into<String>,
        message: impl Into<String>,
        regions: Vec<Region>,
        arrows: Vec<Arrow>,
        tip: Tip,
    ) -> Self {
        let mut plan = Self {
            code: code.into(),
            file: file.into(),
            message: message.into(),
            anchor_line: 0,
            regions,
            arrows,
            tip,
        };
        plan.anchor_line = plan.first_line().unwrap_or(0);
        plan
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty() && self.arrows.is_empty()
    }

    /// Every line touched by a region end or an arrow.
    pub fn component_lines(&self) -> impl Iterator<Item = u32> + '_ {
        self.regions
            .iter()
            .flat_map(|r| [r.start_line, r.end_line])
            .chain(self.arrows.iter().map(|a| a.line))
    }

    pub fn first_line(&self) -> Option<u32> {
        self.component_lines().min()
    }

    pub fn last_line(&self) -> Option<u32> {
        self.component_lines().max()
    }

    pub fn has_error_component(&self) -> bool {
        self.regions.iter().any(|r| r.severity == Level::Error)
            || self.arrows.iter().any(|a| a.severity == Level::Error)
    }

    /// Checks the structural invariants; `line_count` bounds lines when known.
    pub fn validate(&self, line_count: Option<u32>) -> Result<(), PlanError> {
        for (i, r) in self.regions.iter().enumerate() {
            if r.start_line > r.end_line {
                return Err(PlanError::InvertedRegion(i));
            }
            if r.open_start && r.open_end {
                return Err(PlanError::DoublyOpenRegion(i));
            }
        }
        for (i, a) in self.arrows.iter().enumerate() {
            if let TailAnchor::RegionEnd { region, end } = a.tail_anchor {
                let r = self.regions.get(region).ok_or(PlanError::DanglingAnchor(i))?;
                if !r.is_closed_at(end) {
                    return Err(PlanError::OpenEndAnchor(i));
                }
            }
        }
        if !self.has_error_component() {
            return Err(PlanError::NoErrorComponent);
        }
        if self.tip.lines.iter().all(|l| l.trim().is_empty()) {
            return Err(PlanError::EmptyTip);
        }
        let expected = self.first_line().unwrap_or(0);
        if self.anchor_line != expected {
            return Err(PlanError::AnchorMismatch { expected, found: self.anchor_line });
        }
        let max = line_count.unwrap_or(u32::MAX);
        if let Some(line) = self.component_lines().find(|&l| l == 0 || l > max) {
            return Err(PlanError::LineOutOfRange { line, max });
        }
        Ok(())
    }
}
