//! Instances named on the command line: a file path or a built-in name.

use std::path::Path;

use anyhow::{bail, Context, Result};

use stochcuts::instances::{builtin, BUILTIN_NAMES};
use stochcuts::io::parse;
use stochcuts::Instance;

#[derive(Clone, Debug)]
pub struct NamedInstance {
    pub name: String,
    pub instance: Instance,
}

pub fn read_file(path: &Path) -> Result<NamedInstance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read instance {}", path.display()))?;
    let parsed = parse(&text).with_context(|| format!("in {}", path.display()))?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    let name = if parsed.name.is_empty() {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string())
    } else {
        parsed.name
    };
    Ok(NamedInstance {
        name,
        instance: parsed.instance,
    })
}

pub fn resolve(spec: &str) -> Result<NamedInstance> {
    let path = Path::new(spec);
    if path.is_file() {
        return read_file(path);
    }
    match builtin(spec) {
        Ok(instance) => Ok(NamedInstance {
            name: spec.to_string(),
            instance,
        }),
        Err(_) => bail!("{spec:?} is neither a readable file nor a built-in instance ({BUILTIN_NAMES})"),
    }
}

/// Each pattern is a built-in name, a file, or a glob; matches are sorted
/// per pattern.
pub fn expand(patterns: &[String]) -> Result<Vec<NamedInstance>> {
    let mut out = Vec::new();
    for p in patterns {
        if Path::new(p).is_file() || builtin(p).is_ok() {
            out.push(resolve(p)?);
            continue;
        }
        let mut paths: Vec<_> = glob::glob(p)
            .with_context(|| format!("bad pattern {p:?}"))?
            .collect::<std::result::Result<_, _>>()?;
        paths.sort();
        for path in paths.iter().filter(|p| p.is_file()) {
            out.push(read_file(path)?);
        }
    }
    if out.is_empty() {
        bail!("no instances matched {}", patterns.join(" "));
    }
    Ok(out)
}
