use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use critint::exactnum::Rat;

/// Comma-separated exact rationals, e.g. `1,-3/2,4`.
pub fn parse_rats(s: &str) -> Result<Vec<Rat>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<Rat>()
                .with_context(|| format!("in list {s:?}"))
        })
        .collect()
}

pub fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .with_context(|| format!("bad number {t:?} in {s:?}"))
        })
        .collect()
}

/// Phase-space slot from a name such as `u2` or `v1` (1-based), as a
/// 0-based slot index.
pub fn parse_slot(name: &str, m: usize) -> Result<usize> {
    let name = name.trim();
    let (kind, idx) = name.split_at(name.len().min(1));
    let i: usize = idx
        .parse()
        .with_context(|| format!("bad coordinate {name:?}; expected u<i> or v<i>"))?;
    if i == 0 || i > m {
        bail!("coordinate {name:?} out of range for m = {m}");
    }
    match kind {
        "u" => Ok(i - 1),
        "v" => Ok(m + i - 1),
        _ => bail!("bad coordinate {name:?}; expected u<i> or v<i>"),
    }
}

/// 1-based user index to 0-based.
pub fn index(i: usize, m: usize, what: &str) -> Result<usize> {
    if i == 0 || i > m {
        bail!("{what} index {i} out of range 1..={m}");
    }
    Ok(i - 1)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
pub fn print_out(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

pub fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    print_out(&(serde_json::to_string_pretty(v)? + "\n"))
}
