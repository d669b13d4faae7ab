use std::cmp::Ordering;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use hypersteiner::{Instance, InstanceClass};

use crate::config::usage;

#[derive(Debug)]
pub struct Entry {
    /// Path relative to the corpus root without extension, or the file stem.
    pub id: String,
    pub instance: Instance,
}

pub fn instance_path(root: &Path, class: InstanceClass, seed: u64) -> PathBuf {
    root.join(class.name()).join(format!("{seed}.stp"))
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Instance::parse(&text).with_context(|| format!("{}", path.display()))
}

/// One entry for a file, every `.stp` below a directory otherwise, in
/// directory order with numeric file names compared as numbers.
pub fn load(input: &Path) -> Result<(Vec<Entry>, bool)> {
    if input.is_file() {
        let id = input.file_stem().map_or_else(|| input.display().to_string(), |s| s.to_string_lossy().into_owned());
        return Ok((vec![Entry { id, instance: read_instance(input)? }], false));
    }
    if !input.is_dir() {
        return Err(usage(format!("{} is neither a file nor a directory", input.display())).into());
    }
    let mut paths = Vec::new();
    collect(input, &mut paths)?;
    if paths.is_empty() {
        return Err(usage(format!("no .stp files below {}", input.display())).into());
    }
    let mut keyed: Vec<(Vec<String>, PathBuf)> = paths
        .into_iter()
        .map(|p| {
            let rel = p.strip_prefix(input).expect("below root").with_extension("");
            let parts = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
            (parts, p)
        })
        .collect();
    keyed.sort_by(|a, b| natural(&a.0, &b.0));
    let entries = keyed
        .into_iter()
        .map(|(parts, path)| Ok(Entry { id: parts.join("/"), instance: read_instance(&path)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok((entries, true))
}

fn collect(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).with_context(|| format!("cannot list {}", dir.display()))? {
        let path = entry?.path();
        if path.is_dir() {
            collect(&path, out)?;
        } else if path.extension().is_some_and(|e| e == "stp") {
            out.push(path);
        }
    }
    Ok(())
}

fn natural(a: &[String], b: &[String]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = match (x.parse::<u64>(), y.parse::<u64>()) {
            (Ok(p), Ok(q)) => p.cmp(&q),
            _ => x.cmp(y),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    a.len().cmp(&b.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(s: &str) -> Vec<String> {
        s.split('/').map(String::from).collect()
    }

    #[test]
    fn numeric_names_sort_as_numbers() {
        let mut ids = vec![parts("general/10"), parts("general/2"), parts("a/30")];
        ids.sort_by(|a, b| natural(a, b));
        assert_eq!(ids, vec![parts("a/30"), parts("general/2"), parts("general/10")]);
    }
}
