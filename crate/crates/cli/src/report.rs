use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use cr_core::hermpoly::json::{point_from_str, surface_from_str};
use cr_core::hermpoly::ComplexRational;
use cr_core::levi::Hypersurface;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit code 2.
    Usage(String),
    /// Computation failed: exit code 1.
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failed(m) => write!(f, "error: {m}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

pub fn load_surface(path: &Path) -> CliResult<Hypersurface> {
    let text = read_text(path)?;
    let (rho, name) = surface_from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let name = name.unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    Hypersurface::new(name, rho).map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub fn parse_point(text: &str, n: usize) -> CliResult<Vec<ComplexRational>> {
    let p = point_from_str(text).map_err(|e| usage(format!("point {text}: {e}")))?;
    if p.len() != n {
        return Err(usage(format!("point has {} coordinates, the surface lives in C^{n}", p.len())));
    }
    Ok(p)
}

/// Wraps a report with the tool version, seed and tolerances.
pub fn envelope(command: &str, seed: Option<u64>, tolerances: Value, report: impl Serialize) -> CliResult<Value> {
    let mut v = json!({ "tool": "cr", "version": VERSION, "command": command });
    if let Some(s) = seed {
        v["seed"] = json!(s);
    }
    v["tolerances"] = tolerances;
    v["report"] = serde_json::to_value(report).map_err(failed)?;
    Ok(v)
}

pub fn to_pretty(v: &Value) -> CliResult<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(failed)
}

pub fn emit(text: &str, out: Option<&PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| failed(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(failed)
        }
    }
}

pub fn point_strings(p: &[ComplexRational]) -> Vec<String> {
    p.iter().map(|c| c.to_string()).collect()
}
