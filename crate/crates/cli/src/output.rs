use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

/// `# ` header lines: tool version, machine table version and the resolved
/// configuration of the run as one JSON object.
pub fn header<C: Serialize>(command: &str, config: &C) -> Result<String> {
    Ok(format!(
        "# nidkit {} table-v{} command={command}\n# config {}\n",
        env!("CARGO_PKG_VERSION"),
        nidkit::prefix_machine::MACHINE_TABLE_VERSION,
        serde_json::to_string(config)?
    ))
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}
