use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::schema::{ingest_table, parse_schema, Dataset};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_dataset(schema: &Path, data: &Path) -> Result<Dataset> {
    let schema = parse_schema(&read_text(schema)?)?;
    ingest_table(&read_text(data)?, &schema)
}

/// One label per non-blank line. Labels are arbitrary tokens, coded densely by
/// first appearance.
pub fn parse_labels(text: &str) -> Result<Vec<u32>> {
    let mut codes: HashMap<&str, u32> = HashMap::new();
    let labels: Vec<u32> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let next = codes.len() as u32;
            *codes.entry(l).or_insert(next)
        })
        .collect();
    if labels.is_empty() {
        return Err(Error::format("label file", "no labels found"));
    }
    Ok(labels)
}

pub fn read_labels(path: &Path) -> Result<Vec<u32>> {
    parse_labels(&read_text(path)?)
}

/// 1-based cluster ids, one per line.
pub fn labels_to_text(labels: &[u32]) -> String {
    labels.iter().map(|l| format!("{}\n", l + 1)).collect()
}
