//! Solver configuration: explicit TOML files or best-effort detection of
//! locally installed solvers.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

fn default_true() -> bool {
    true
}

fn default_timeout() -> u64 {
    300
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct SolverConfig {
    pub name: String,
    /// Executable to spawn.
    pub path: String,
    /// Argument template; `{file}`, `{timeout_s}`, and `{timeout_ms}`
    /// placeholders are substituted per run.
    pub args: Vec<String>,
    #[serde(default = "default_true")]
    pub supports_quantifiers: bool,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

impl SolverConfig {
    pub fn substituted_args(&self, file: &Path) -> Vec<String> {
        self.args
            .iter()
            .map(|a| {
                a.replace("{file}", &file.display().to_string())
                    .replace("{timeout_s}", &self.timeout_secs.to_string())
                    .replace("{timeout_ms}", &(self.timeout_secs * 1000).to_string())
            })
            .collect()
    }
}

#[derive(Debug, Deserialize)]
struct SolversFile {
    #[serde(default)]
    solver: Vec<SolverConfig>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read solver config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse solver config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
}

pub fn load_config(path: &Path) -> Result<Vec<SolverConfig>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parsed: SolversFile = toml::from_str(&text).map_err(|source| ConfigError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parsed.solver)
}

fn on_path(bin: &str) -> bool {
    let Some(paths) = std::env::var_os("PATH") else {
        return false;
    };
    std::env::split_paths(&paths).any(|p| p.join(bin).is_file())
}

fn find_cvc5_shim() -> Option<PathBuf> {
    if let Ok(p) = std::env::var("FLOATDV_CVC5_SHIM") {
        let p = PathBuf::from(p);
        if p.is_file() {
            return Some(p);
        }
    }
    let mut candidates: Vec<PathBuf> = vec![PathBuf::from("tools/cvc5-smt2")];
    // Repo layout relative to this crate, for test runs.
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    candidates.push(manifest.join("../../tools/cvc5-smt2"));
    if let Ok(cwd) = std::env::current_dir() {
        for anc in cwd.ancestors() {
            candidates.push(anc.join("tools/cvc5-smt2"));
        }
    }
    candidates.into_iter().find(|p| p.is_file())
}

fn python_has_cvc5() -> bool {
    std::process::Command::new("python3")
        .args(["-c", "import cvc5"])
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

/// Detect installed solvers: a `z3` binary, a `mathsat` binary, and the
/// cvc5 python bindings behind the bundled SMT-LIB shim.
pub fn detect_solvers(timeout_secs: u64) -> Vec<SolverConfig> {
    let mut out = Vec::new();
    if let Some(shim) = find_cvc5_shim() {
        if python_has_cvc5() {
            out.push(SolverConfig {
                name: "cvc5".into(),
                path: "python3".into(),
                args: vec![
                    shim.display().to_string(),
                    "{file}".into(),
                    "--tlimit-ms".into(),
                    "{timeout_ms}".into(),
                ],
                supports_quantifiers: true,
                timeout_secs,
            });
        }
    }
    if on_path("z3") {
        out.push(SolverConfig {
            name: "z3".into(),
            path: "z3".into(),
            args: vec!["-smt2".into(), "-T:{timeout_s}".into(), "{file}".into()],
            supports_quantifiers: true,
            timeout_secs,
        });
    }
    if on_path("mathsat") {
        out.push(SolverConfig {
            name: "mathsat".into(),
            path: "mathsat".into(),
            args: vec!["{file}".into()],
            supports_quantifiers: false,
            timeout_secs,
        });
    }
    out
}

/// Resolve the solver set: explicit config path, `FLOATDV_CONFIG`, or
/// detection.
pub fn resolve_solvers(
    config_path: Option<&Path>,
    timeout_secs: u64,
) -> Result<Vec<SolverConfig>, ConfigError> {
    if let Some(p) = config_path {
        return load_config(p);
    }
    if let Ok(p) = std::env::var("FLOATDV_CONFIG") {
        return load_config(Path::new(&p));
    }
    Ok(detect_solvers(timeout_secs))
}
