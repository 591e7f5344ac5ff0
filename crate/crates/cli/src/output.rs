//! Output directories are built in a staging sibling and moved into place
//! only once complete, so a failed run leaves nothing behind.

use std::fs;
use std::path::{Path, PathBuf};

use cgsynth::io::VOCABULARY_FILE;

use crate::Failure;

fn staging_path(out: &Path) -> PathBuf {
    let name = out.file_name().map_or_else(|| "out".into(), |n| n.to_string_lossy().into_owned());
    out.with_file_name(format!(".{name}.partial-{}", std::process::id()))
}

/// An existing target is replaced only if it is empty or looks like a
/// previous output (it holds a vocabulary file).
fn check_replaceable(out: &Path) -> Result<(), Failure> {
    if !out.exists() {
        return Ok(());
    }
    if !out.is_dir() {
        return Err(Failure::config(anyhow::anyhow!("{} exists and is not a directory", out.display())));
    }
    let empty = fs::read_dir(out)?.next().is_none();
    if empty || out.join(VOCABULARY_FILE).is_file() {
        Ok(())
    } else {
        Err(Failure::config(anyhow::anyhow!(
            "{} is not empty and does not look like a cgsynth output; refusing to replace it",
            out.display()
        )))
    }
}

/// Runs `build` against a fresh staging directory and renames it to `out`
/// on success. On failure the staging directory is removed.
pub fn write_atomically<T>(out: &Path, build: impl FnOnce(&Path) -> Result<T, Failure>) -> Result<T, Failure> {
    check_replaceable(out)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let staging = staging_path(out);
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir_all(&staging)?;
    match build(&staging) {
        Ok(v) => {
            if out.exists() {
                fs::remove_dir_all(out)?;
            }
            fs::rename(&staging, out)?;
            Ok(v)
        }
        Err(e) => {
            let _ = fs::remove_dir_all(&staging);
            Err(e)
        }
    }
}
