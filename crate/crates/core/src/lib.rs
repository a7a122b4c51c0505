//! Explains Rust ownership and lifetime errors as diagrams drawn next to
//! the code, and measures how long developers spend resolving errors.
//!
//! The crate is `no_std` (it needs `alloc`). Running the compiler,
//! reading files and writing ledgers live in the `borrowlens` crate.
//!
//! Pipeline:
//!
//! 1. [`diagnostic::parse_diagnostic_stream`] reads the compiler's JSON output.
//! 2. [`interpret::interpret`] turns a supported error into a
//!    [`plan::VisualizationPlan`] of regions, arrows and a tip.
//! 3. [`layout::compute_geometry`] places the plan right of the code and
//!    [`render::render_svg`] draws it.
//!
//! [`telemetry`] works on snapshots of successive builds: it finds
//! resolution sessions and their Active Resolution Cost.

#![no_std]
extern crate alloc;

pub mod diagnostic;
pub mod interpret;
pub mod layout;
pub mod plan;
pub mod render;
pub mod source;
pub mod telemetry;

pub use diagnostic::{BuildReport, Diagnostic, Severity, SourcePosition, SourceSpan};
pub use interpret::{interpret, interpret_all, Interpretation, SupportedCodeRegistry};
pub use layout::{Geometry, TextMetrics};
pub use plan::VisualizationPlan;
pub use render::{Palette, RenderOptions, SvgDocument};
pub use telemetry::{BuildSnapshot, ErrorFingerprint, ResolutionSession};
