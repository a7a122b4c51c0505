//! Running `cargo check` and collecting its diagnostics.

use std::collections::HashMap;
use std::ffi::OsString;
use std::io;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{SystemTime, UNIX_EPOCH};

use borrowlens_core::diagnostic::{parse_diagnostic_stream, ParseError};
use borrowlens_core::BuildReport;

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error("no Cargo.toml found in workspace {}", .0.display())]
    WorkspaceNotFound(PathBuf),
    #[error("could not run {}: {source}", .program.to_string_lossy())]
    ToolchainMissing { program: OsString, source: io::Error },
    #[error("reading compiler output: {0}")]
    Parse(#[from] ParseError),
    /// Cargo failed without reporting an error diagnostic.
    #[error("build of {} failed without reporting errors:\n{stderr}", .workspace.display())]
    Failed { workspace: PathBuf, timestamp: f64, stderr: String },
}

/// Invokes cargo with JSON diagnostics.
#[derive(Debug, Clone)]
pub struct BuildRunner {
    cargo: OsString,
    target_dir: Option<PathBuf>,
}

impl Default for BuildRunner {
    fn default() -> Self {
        Self::from_env()
    }
}

impl BuildRunner {
    /// Uses the cargo named by `$CARGO`, or `cargo` from `PATH`.
    pub fn from_env() -> Self {
        let cargo = std::env::var_os("CARGO").unwrap_or_else(|| "cargo".into());
        Self { cargo, target_dir: None }
    }

    pub fn with_cargo(mut self, cargo: impl Into<OsString>) -> Self {
        self.cargo = cargo.into();
        self
    }

    /// Builds into `dir` instead of the workspace's own target directory.
    pub fn with_target_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.target_dir = Some(dir.into());
        self
    }

    /// Checks the workspace and returns its diagnostics.
    ///
    /// Builds of the same workspace from this process run one at a time.
    /// A failed build with no error diagnostics (bad manifest, killed
    /// compiler) is reported as [`BuildError::Failed`].
    pub fn run(&self, workspace: &Path) -> Result<BuildReport, BuildError> {
        let workspace = resolve_workspace(workspace)?;
        let guard = workspace_lock(&workspace);
        let _held = guard.lock().unwrap_or_else(|p| p.into_inner());

        let timestamp = now();
        let mut cmd = Command::new(&self.cargo);
        cmd.arg("check")
            .arg("--message-format=json")
            .arg("--manifest-path")
            .arg(workspace.join("Cargo.toml"))
            .current_dir(&workspace)
            .stdin(Stdio::null());
        if let Some(dir) = &self.target_dir {
            cmd.arg("--target-dir").arg(dir);
        }
        log::debug!("running {cmd:?}");
        let output = cmd.output().map_err(|source| BuildError::ToolchainMissing {
            program: self.cargo.clone(),
            source,
        })?;
        let stdout = String::from_utf8_lossy(&output.stdout);
        let diagnostics = parse_diagnostic_stream(&stdout)?;
        let success = output.status.success();
        if !success && !diagnostics.iter().any(|d| d.is_error()) {
            return Err(BuildError::Failed {
                workspace,
                timestamp,
                stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
            });
        }
        Ok(BuildReport {
            timestamp,
            workspace: workspace.to_string_lossy().into_owned(),
            success,
            diagnostics,
        })
    }
}

/// [`BuildRunner::run`] with the default runner.
pub fn run_build(workspace: &Path) -> Result<BuildReport, BuildError> {
    BuildRunner::from_env().run(workspace)
}

/// Absolute, symlink-free path of a directory holding `Cargo.toml`.
pub fn resolve_workspace(workspace: &Path) -> Result<PathBuf, BuildError> {
    let not_found = || BuildError::WorkspaceNotFound(workspace.to_path_buf());
    let dir = workspace.canonicalize().map_err(|_| not_found())?;
    if dir.join("Cargo.toml").is_file() {
        Ok(dir)
    } else {
        Err(not_found())
    }
}

fn workspace_lock(workspace: &Path) -> Arc<Mutex<()>> {
    static LOCKS: OnceLock<Mutex<HashMap<PathBuf, Arc<Mutex<()>>>>> = OnceLock::new();
    let mut locks = LOCKS.get_or_init(Default::default).lock().unwrap_or_else(|p| p.into_inner());
    locks.entry(workspace.to_path_buf()).or_default().clone()
}

/// Seconds since the Unix epoch.
pub fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// Reads a file named by a diagnostic span, relative to the workspace.
/// Missing and non-UTF-8 files yield `None`.
pub fn load_source(workspace: &Path, file: &str) -> Option<String> {
    let bytes = std::fs::read(workspace.join(file)).ok()?;
    String::from_utf8(bytes).ok()
}
