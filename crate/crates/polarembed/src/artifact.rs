//! Whole-file artifact writes that never leave a partial file behind.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use tempfile::NamedTempFile;

/// Writes `contents` to a temporary file next to `path`, then renames it into
/// place. On any error the destination is untouched.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// `# `-prefixed header recording how an artifact was produced.
pub fn provenance_header(argv: &[String], seed: Option<u64>) -> String {
    let mut h = format!("# polarembed {}\n", argv.join(" "));
    if let Some(s) = seed {
        h.push_str(&format!("# seed {s}\n"));
    }
    h
}
