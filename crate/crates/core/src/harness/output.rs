use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::config::ExperimentConfig;

/// Comment block identifying the command and every experiment setting.
/// Each line is prefixed with `lead`.
pub fn header(command: &str, cfg: &ExperimentConfig, lead: &str) -> String {
    let mut out = format!("{lead}wh-augment {command}\n");
    for line in cfg.to_text().lines() {
        out.push_str(lead);
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Writes `contents` to `dir/name`, creating `dir` as needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
