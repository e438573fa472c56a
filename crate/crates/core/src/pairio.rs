//! Loading buggy/fixed pairs and labeled corpora.
//!
//! A corpus is a directory with one subdirectory per case:
//!
//! ```text
//! <root>/<case>/buggy.py
//! <root>/<case>/fixed.py
//! <root>/<case>/expected.json    {"patterns": ["incorrect_measurement", ...]}
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::detectors::PatternId;

pub const BUGGY_FILE: &str = "buggy.py";
pub const FIXED_FILE: &str = "fixed.py";
pub const EXPECTED_FILE: &str = "expected.json";

#[derive(Debug, thiserror::Error)]
pub enum PairIoError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {message}", path.display())]
    Expected { path: PathBuf, message: String },
}

/// The unit of analysis: one buggy file and its fix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodePair {
    pub pair_id: String,
    pub buggy_source: String,
    pub fixed_source: String,
    pub buggy_path: PathBuf,
    pub fixed_path: PathBuf,
}

impl CodePair {
    /// Build a pair from in-memory sources.
    pub fn from_sources(pair_id: impl Into<String>, buggy: impl Into<String>, fixed: impl Into<String>) -> Self {
        CodePair {
            pair_id: pair_id.into(),
            buggy_source: buggy.into(),
            fixed_source: fixed.into(),
            buggy_path: PathBuf::new(),
            fixed_path: PathBuf::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusCase {
    pub pair: CodePair,
    pub expected_patterns: BTreeSet<PatternId>,
}

/// One case directory and its load outcome. A failed case does not stop the scan.
#[derive(Debug)]
pub struct CaseEntry {
    pub name: String,
    pub outcome: Result<CorpusCase, PairIoError>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpectedJson {
    patterns: Vec<PatternId>,
}

fn read(path: &Path) -> Result<String, PairIoError> {
    fs::read_to_string(path).map_err(|source| PairIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Load a pair. The id is the shared parent directory name, or the buggy
/// file's stem when the files live in different directories.
pub fn load_pair(buggy_path: &Path, fixed_path: &Path) -> Result<CodePair, PairIoError> {
    let buggy_source = read(buggy_path)?;
    let fixed_source = read(fixed_path)?;
    Ok(CodePair {
        pair_id: pair_id_for(buggy_path, fixed_path),
        buggy_source,
        fixed_source,
        buggy_path: buggy_path.to_path_buf(),
        fixed_path: fixed_path.to_path_buf(),
    })
}

fn pair_id_for(buggy: &Path, fixed: &Path) -> String {
    let shared_dir = match (buggy.parent(), fixed.parent()) {
        (Some(a), Some(b)) if a == b => a.file_name(),
        _ => None,
    };
    shared_dir
        .or_else(|| buggy.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn read_expected(path: &Path) -> Result<BTreeSet<PatternId>, PairIoError> {
    let text = read(path)?;
    let parsed: ExpectedJson = serde_json::from_str(&text).map_err(|e| PairIoError::Expected {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(parsed.patterns.into_iter().collect())
}

pub fn write_expected(path: &Path, patterns: &BTreeSet<PatternId>) -> Result<(), PairIoError> {
    let body = ExpectedJson {
        patterns: patterns.iter().copied().collect(),
    };
    let mut text = serde_json::to_string(&body).expect("pattern ids serialize");
    text.push('\n');
    fs::write(path, text).map_err(|source| PairIoError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Enumerate case directories under `root` in lexicographic order.
pub fn scan_corpus(root: &Path) -> Result<Vec<CaseEntry>, PairIoError> {
    let io_err = |source| PairIoError::Io {
        path: root.to_path_buf(),
        source,
    };
    let mut dirs = Vec::new();
    for entry in fs::read_dir(root).map_err(io_err)? {
        let entry = entry.map_err(io_err)?;
        if entry.file_type().map_err(io_err)?.is_dir() {
            dirs.push(entry.path());
        }
    }
    dirs.sort();
    Ok(dirs
        .into_iter()
        .map(|dir| {
            let name = dir
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            CaseEntry {
                name,
                outcome: load_case(&dir),
            }
        })
        .collect())
}

fn load_case(dir: &Path) -> Result<CorpusCase, PairIoError> {
    let pair = load_pair(&dir.join(BUGGY_FILE), &dir.join(FIXED_FILE))?;
    let expected = dir.join(EXPECTED_FILE);
    let expected_patterns = if expected.exists() {
        read_expected(&expected)?
    } else {
        BTreeSet::new()
    };
    Ok(CorpusCase {
        pair,
        expected_patterns,
    })
}
