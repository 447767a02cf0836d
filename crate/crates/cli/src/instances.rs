//! Locating instance files by path or by bundled name.

use std::env;
use std::path::{Path, PathBuf};

use tct_core::project::{load_instance, ProjectNetwork};

use crate::error::{CliError, CliResult};

pub const INSTANCE_DIR_VAR: &str = "TCT_INSTANCE_DIR";

/// The `instances/` directory shipped with the source tree.
pub fn bundled_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

/// Directories searched for a bare instance name, in order: `base` (if any),
/// `$TCT_INSTANCE_DIR`, then the bundled directory.
pub fn search_path(base: Option<&Path>) -> Vec<PathBuf> {
    let mut dirs = Vec::new();
    if let Some(b) = base {
        dirs.push(b.to_path_buf());
    }
    if let Some(d) = env::var_os(INSTANCE_DIR_VAR).filter(|d| !d.is_empty()) {
        dirs.push(PathBuf::from(d));
    }
    dirs.push(bundled_dir());
    dirs
}

/// Resolves `name` to an existing file. Tries it as given, then under each
/// search directory with and without a `.tct` extension.
pub fn resolve(name: &str, base: Option<&Path>) -> CliResult<PathBuf> {
    let direct = PathBuf::from(name);
    if direct.is_absolute() && direct.is_file() {
        return Ok(direct);
    }
    if base.is_none() && direct.is_file() {
        return Ok(direct);
    }
    for dir in search_path(base) {
        for candidate in [dir.join(name), dir.join(format!("{name}.tct"))] {
            if candidate.is_file() {
                return Ok(candidate);
            }
        }
    }
    Err(CliError::usage(format!(
        "instance `{name}` not found (searched the working directory, ${INSTANCE_DIR_VAR} and {})",
        bundled_dir().display()
    )))
}

pub fn load(name: &str) -> CliResult<(PathBuf, ProjectNetwork)> {
    let path = resolve(name, None)?;
    let net = load_instance(&path).map_err(CliError::usage)?;
    Ok((path, net))
}
