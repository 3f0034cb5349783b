//! Output-file plumbing shared by the subcommands.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Writes `bytes` to `path` atomically: the data lands in a sibling
/// temporary file first and is renamed into place, so readers never see a
/// half-written file and a crashed run never leaves a truncated one.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating directory {}", parent.display()))?;
        }
    }
    let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
        bail!("output path {} has no file name", path.display());
    };
    let tmp = path.with_file_name(format!("{name}.tmp"));
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming {} into place", tmp.display()))?;
    Ok(())
}

/// Turns a source name into a file-name-safe slug. Anything outside
/// `[A-Za-z0-9._-]` becomes `-`, which also keeps path separators inside the
/// output directory.
pub fn file_slug(source: &str) -> String {
    let slug: String = source
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '-'
            }
        })
        .collect();
    if slug.is_empty() {
        "unnamed".to_string()
    } else {
        slug
    }
}

/// Maps each source to its slug, refusing corpora whose source names
/// collide once slugged — silently overwriting one source's output with
/// another's would corrupt the run.
pub fn slug_map<'a, I>(sources: I) -> Result<Vec<(&'a str, String)>>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut seen: Vec<(&str, String)> = Vec::new();
    for source in sources {
        let slug = file_slug(source);
        if let Some((other, _)) = seen.iter().find(|(_, s)| *s == slug) {
            bail!("sources {other:?} and {source:?} collide on output file name {slug:?}");
        }
        seen.push((source, slug));
    }
    Ok(seen)
}
