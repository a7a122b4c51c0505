//! Settings from command-line flags over an optional TOML file.
//!
//! The file is the one named by `--config`, or `borrowlens.toml` in the
//! workspace when present. Relative paths in it are relative to the file.

use std::path::{Path, PathBuf};

use borrowlens_core::interpret::UnknownCode;
use borrowlens_core::layout::LayoutError;
use borrowlens_core::render::RenderOptions;
use borrowlens_core::telemetry::DEFAULT_CAP_SECONDS;
use borrowlens_core::{Palette, SupportedCodeRegistry, TextMetrics};
use clap::Args;
use serde::Deserialize;

pub const CONFIG_FILE_NAME: &str = "borrowlens.toml";

/// Options shared by every subcommand. Unset flags fall back to the file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Cargo project or workspace root.
    #[arg(long, global = true, value_name = "DIR")]
    pub workspace: Option<PathBuf>,
    /// TOML file with defaults for these flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory for SVG and HTML output.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Build snapshot ledger (JSONL).
    #[arg(long, global = true, value_name = "FILE", env = "BORROWLENS_LEDGER")]
    pub ledger: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PX")]
    pub font_size: Option<f64>,
    #[arg(long, global = true, value_name = "PX")]
    pub line_height: Option<f64>,
    /// Advance width of one monospace character.
    #[arg(long, global = true, value_name = "PX")]
    pub char_width: Option<f64>,
    #[arg(long, global = true, value_name = "COLUMNS")]
    pub tab_width: Option<u32>,
    /// Gap between the widest code line and a diagram.
    #[arg(long, global = true, value_name = "PX")]
    pub margin: Option<f64>,
    /// Longest inter-build interval counted towards resolution cost.
    #[arg(long, global = true, value_name = "SECONDS")]
    pub cap_seconds: Option<f64>,
    /// Error codes to visualize, comma separated. E0382 and E0597 are always included.
    #[arg(long, global = true, value_delimiter = ',', value_name = "CODES")]
    pub codes: Option<Vec<String>>,
    #[arg(long, global = true, value_name = "COLOR")]
    pub error_color: Option<String>,
    #[arg(long, global = true, value_name = "COLOR")]
    pub info_color: Option<String>,
    /// Color of the second and later information components.
    #[arg(long, global = true, value_name = "COLOR")]
    pub info_alt_color: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub ledger: Option<PathBuf>,
    pub font_size: Option<f64>,
    pub line_height: Option<f64>,
    pub char_width: Option<f64>,
    pub tab_width: Option<u32>,
    pub margin: Option<f64>,
    pub cap_seconds: Option<f64>,
    pub codes: Option<Vec<String>>,
    #[serde(default)]
    pub palette: PaletteConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PaletteConfig {
    pub error: Option<String>,
    pub information: Option<String>,
    pub information_alt: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{}: {source}", .path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", .path.display())]
    Parse { path: PathBuf, source: Box<toml::de::Error> },
    #[error("cap must be a positive number of seconds, got {0}")]
    InvalidCap(f64),
    #[error("margin must be finite and non-negative, got {0}")]
    InvalidMargin(f64),
    #[error(transparent)]
    Metrics(#[from] LayoutError),
    #[error(transparent)]
    UnknownCode(#[from] UnknownCode),
    #[error("resolving {}: {source}", .path.display())]
    Path { path: PathBuf, source: std::io::Error },
}

/// Fully resolved settings. Paths are absolute.
#[derive(Debug, Clone)]
pub struct Config {
    pub workspace: PathBuf,
    pub output_dir: PathBuf,
    pub ledger_path: PathBuf,
    pub render: RenderOptions,
    pub cap_seconds: f64,
    pub registry: SupportedCodeRegistry,
}

fn absolute(path: &Path) -> Result<PathBuf, ConfigError> {
    std::path::absolute(path).map_err(|source| ConfigError::Path { path: path.to_path_buf(), source })
}

pub fn load_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    toml::from_str(&text).map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source: Box::new(source) })
}

impl Config {
    pub fn resolve(flags: &Flags) -> Result<Self, ConfigError> {
        let workspace = absolute(flags.workspace.as_deref().unwrap_or(Path::new(".")))?;
        let (file, file_dir) = match &flags.config {
            Some(path) => {
                let path = absolute(path)?;
                (load_file(&path)?, path.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => {
                let path = workspace.join(CONFIG_FILE_NAME);
                if path.is_file() {
                    (load_file(&path)?, workspace.clone())
                } else {
                    (FileConfig::default(), workspace.clone())
                }
            }
        };
        let from_file = |p: &Option<PathBuf>| p.as_ref().map(|p| file_dir.join(p));

        let output_dir = match flags.out.clone().or_else(|| from_file(&file.out)) {
            Some(p) => absolute(&p)?,
            None => workspace.join("target").join("borrowlens"),
        };
        let ledger_path = match flags.ledger.clone().or_else(|| from_file(&file.ledger)) {
            Some(p) => absolute(&p)?,
            None => workspace.join(".borrowlens").join("ledger.jsonl"),
        };

        let d = TextMetrics::default();
        let metrics = TextMetrics::new(
            flags.font_size.or(file.font_size).unwrap_or(d.font_size),
            flags.line_height.or(file.line_height).unwrap_or(d.line_height),
            flags.char_width.or(file.char_width).unwrap_or(d.char_width),
            flags.tab_width.or(file.tab_width).unwrap_or(d.tab_width),
        )?;
        let margin = flags.margin.or(file.margin).unwrap_or(RenderOptions::default().margin);
        if !(margin.is_finite() && margin >= 0.0) {
            return Err(ConfigError::InvalidMargin(margin));
        }
        let cap_seconds = flags.cap_seconds.or(file.cap_seconds).unwrap_or(DEFAULT_CAP_SECONDS);
        if !(cap_seconds.is_finite() && cap_seconds > 0.0) {
            return Err(ConfigError::InvalidCap(cap_seconds));
        }

        let p = Palette::default();
        let palette = Palette {
            error: flags.error_color.clone().or(file.palette.error).unwrap_or(p.error),
            information: flags.info_color.clone().or(file.palette.information).unwrap_or(p.information),
            information_alt: flags.info_alt_color.clone().or(file.palette.information_alt).unwrap_or(p.information_alt),
        };
        let registry = match flags.codes.as_ref().or(file.codes.as_ref()) {
            Some(codes) => SupportedCodeRegistry::with_codes(codes.iter().map(|c| c.trim()))?,
            None => SupportedCodeRegistry::default(),
        };

        Ok(Self {
            workspace,
            output_dir,
            ledger_path,
            render: RenderOptions { metrics, margin, palette },
            cap_seconds,
            registry,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_without_file() {
        let dir = tempfile::tempdir().unwrap();
        let flags = Flags { workspace: Some(dir.path().into()), ..Default::default() };
        let c = Config::resolve(&flags).unwrap();
        assert_eq!(c.render, RenderOptions::default());
        assert_eq!(c.cap_seconds, 1500.0);
        assert_eq!(c.ledger_path, dir.path().join(".borrowlens/ledger.jsonl"));
        assert_eq!(c.registry.len(), 8);
    }

    #[test]
    fn flags_win_over_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join(CONFIG_FILE_NAME),
            "font-size = 20\nchar-width = 10\nledger = \"data/l.jsonl\"\ncodes = [\"E0499\"]\n[palette]\nerror = \"#000000\"\n",
        )
        .unwrap();
        let flags = Flags {
            workspace: Some(dir.path().into()),
            char_width: Some(12.0),
            ..Default::default()
        };
        let c = Config::resolve(&flags).unwrap();
        assert_eq!(c.render.metrics.font_size, 20.0);
        assert_eq!(c.render.metrics.char_width, 12.0);
        assert_eq!(c.render.palette.error, "#000000");
        assert_eq!(c.ledger_path, dir.path().join("data/l.jsonl"));
        assert!(c.registry.contains("E0499") && c.registry.contains("E0382") && !c.registry.contains("E0502"));
    }

    #[test]
    fn rejects_bad_values() {
        let dir = tempfile::tempdir().unwrap();
        let base = Flags { workspace: Some(dir.path().into()), ..Default::default() };
        let bad = [
            Flags { cap_seconds: Some(0.0), ..base.clone() },
            Flags { margin: Some(-1.0), ..base.clone() },
            Flags { char_width: Some(0.0), ..base.clone() },
            Flags { codes: Some(vec!["E0001".into()]), ..base.clone() },
        ];
        for f in bad {
            assert!(Config::resolve(&f).is_err(), "{f:?}");
        }
        std::fs::write(dir.path().join(CONFIG_FILE_NAME), "unknown = 1\n").unwrap();
        assert!(matches!(Config::resolve(&base), Err(ConfigError::Parse { .. })));
    }
}
