//! Atomic writers: nothing is left behind when a run fails.

use std::io::Write;
use std::path::Path;

use crate::error::CliError;
use crate::pipeline::OutputTree;

/// Writes the tree into a fresh sibling directory, then moves it into place,
/// replacing any previous contents of `out`.
pub fn write_tree(out: &Path, tree: &OutputTree) -> Result<(), CliError> {
    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => ".".into(),
    };
    std::fs::create_dir_all(&parent).map_err(|e| CliError::write(&parent, e))?;
    let staging = tempfile::Builder::new()
        .prefix(".bfmn-staging-")
        .tempdir_in(&parent)
        .map_err(|e| CliError::write(&parent, e))?;
    for (rel, bytes) in tree {
        let path = staging.path().join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| CliError::write(&path, e))?;
    }
    if out.exists() {
        if !out.is_dir() {
            return Err(CliError::validation(
                "InvalidOutput",
                format!("{} exists and is not a directory", out.display()),
            ));
        }
        std::fs::remove_dir_all(out).map_err(|e| CliError::write(out, e))?;
    }
    let staged = staging.keep();
    std::fs::rename(&staged, out).map_err(|e| {
        let _ = std::fs::remove_dir_all(&staged);
        CliError::write(out, e)
    })
}

/// Writes one file atomically, or to stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(bytes)
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError::Internal(format!("stdout: {e}")));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => ".".into(),
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::write(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::write(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::write(path, e))?;
    tmp.persist(path)
        .map_err(|e| CliError::write(path, e.error))?;
    Ok(())
}
