use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use seqclust::incremental::{Ordering, Provenance};
use seqclust::metricspace::{detect_format, parse_space, DistanceSpace};
use seqclust::structures::Clustering;

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).with_context(|| format!("temp file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes to `out` when given, otherwise prints.
pub fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_space(path: &Path, metric: bool) -> Result<DistanceSpace> {
    let text = read(path)?;
    parse_space(&text, detect_format(&text), metric).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_clustering(path: &Path) -> Result<Clustering> {
    Clustering::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_ordering(path: &Path) -> Result<Ordering> {
    let provenance = Provenance::File {
        path: path.display().to_string(),
    };
    Ordering::parse(&read(path)?, provenance).with_context(|| format!("parsing {}", path.display()))
}

pub fn require_covers(space: &DistanceSpace, c: &Clustering, what: &str) -> Result<()> {
    if c.len() != space.len() {
        bail!("{what} covers {} items but the space has {}", c.len(), space.len());
    }
    Ok(())
}
