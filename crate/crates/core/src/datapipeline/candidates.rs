use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use super::{io_err, DatasetError};
use crate::metrics::Candidate;

/// Reads a JSON-lines candidate file. Duplicate ids and malformed lines are errors.
pub fn read_candidates(path: &Path) -> Result<Vec<Candidate>, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let c: Candidate = serde_json::from_str(line).map_err(|e| DatasetError::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            reason: e.to_string(),
        })?;
        if !seen.insert(c.id.clone()) {
            return Err(DatasetError::DuplicateId(c.id));
        }
        out.push(c);
    }
    Ok(out)
}

/// Orders candidates by `ids`. Every id needs exactly one candidate and no others may
/// appear; missing ids are listed in id order.
pub fn align_candidates(
    candidates: Vec<Candidate>,
    ids: &[String],
) -> Result<Vec<Candidate>, DatasetError> {
    let mut by_id: BTreeMap<String, Candidate> = BTreeMap::new();
    for c in candidates {
        if by_id.contains_key(&c.id) {
            return Err(DatasetError::DuplicateId(c.id));
        }
        by_id.insert(c.id.clone(), c);
    }
    let mut aligned = Vec::with_capacity(ids.len());
    let mut missing = Vec::new();
    for id in ids {
        match by_id.remove(id) {
            Some(c) => aligned.push(c),
            None => missing.push(id.clone()),
        }
    }
    if !by_id.is_empty() {
        return Err(DatasetError::ExtraIds(by_id.into_keys().collect()));
    }
    if !missing.is_empty() {
        missing.sort();
        return Err(DatasetError::MissingIds(missing));
    }
    Ok(aligned)
}

/// Writes candidates sorted by id, one `{"id","caption"}` object per LF-terminated line.
pub fn write_candidates(path: &Path, candidates: &[Candidate]) -> Result<(), DatasetError> {
    let mut sorted: Vec<&Candidate> = candidates.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = sorted.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(DatasetError::DuplicateId(w[0].id.clone()));
    }
    let mut out = String::new();
    for c in sorted {
        out += &serde_json::to_string(c).expect("candidates serialize");
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err(path))
}
