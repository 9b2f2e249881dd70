//! Resolving `--code` arguments and reading/writing matrix files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qpcode::construct::{self, Code, CodeSpec};
use qpcode::{BitMatrix, Error};

/// Path of the JSON file holding the spec of the matrix at `path`.
pub fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Loads a matrix file, reattaching the saved spec when present.
pub fn load(path: &Path) -> Result<Code> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let h = BitMatrix::from_text(&text)?;
    let meta = sidecar(path);
    if meta.exists() {
        let spec: CodeSpec = serde_json::from_str(&fs::read_to_string(&meta)?)
            .with_context(|| format!("parsing {}", meta.display()))?;
        Ok(Code::with_spec(h, spec)?)
    } else {
        Ok(Code::from_matrix(h, path.display().to_string())?)
    }
}

/// Builds a named code.
///
/// Names: `eh<r>` / `hamming<r>`, `panchenko<r>` / `p<r>`, `qp<r>g<g>` for
/// the general family with its default seed, or a seed name (`M`, `S`,
/// `EH3`, `example_9_5`). A `-<k>` suffix removes the last `k` columns.
pub fn named(name: &str) -> Result<Option<Code>> {
    let (base, shorten) = match name.rsplit_once('-') {
        Some((b, k)) if !b.is_empty() && k.chars().all(|c| c.is_ascii_digit()) && !k.is_empty() => {
            (b, Some(k.parse::<usize>()?))
        }
        _ => (name, None),
    };
    let lower = base.to_ascii_lowercase();
    let number = |prefix: &str| -> Option<usize> { lower.strip_prefix(prefix).and_then(|s| s.parse().ok()) };
    let code = if let Some(r) = number("hamming").or_else(|| number("eh")) {
        construct::extended_hamming(r)?
    } else if let Some(r) = number("panchenko").or_else(|| number("p")) {
        construct::panchenko(r)?
    } else if let Some((r, g)) = lower
        .strip_prefix("qp")
        .and_then(|s| s.split_once('g'))
        .and_then(|(r, g)| Some((r.parse::<usize>().ok()?, g.parse::<u32>().ok()?)))
    {
        let seed = construct::default_seed_for(g).ok_or_else(|| {
            Error::InvalidArgument(format!("no seed available for g = {g}; pass --seed with a matrix"))
        })?;
        construct::general_qp(r, g, &seed)?
    } else if let Ok(seed) = construct::seed_by_name(base) {
        seed
    } else {
        return Ok(None);
    };
    Ok(Some(match shorten {
        Some(k) => construct::shorten_trailing(&code, k)?,
        None => code,
    }))
}

/// A named code, else a matrix file.
pub fn resolve(arg: &str) -> Result<Code> {
    let path = Path::new(arg);
    if path.exists() {
        return load(path);
    }
    named(arg)?.ok_or_else(|| {
        Error::InvalidArgument(format!("`{arg}` is neither a code name nor an existing file")).into()
    })
}
