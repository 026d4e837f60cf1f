//! Append-only JSON-lines cache of point counts.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use kleinzeta_core::Algorithm;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CACHE_ENV: &str = "KLEINZETA_CACHE";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub p: u64,
    pub k: u32,
    pub count: u128,
    pub algorithm: Algorithm,
    pub version: String,
}

pub struct CountCache {
    path: Option<PathBuf>,
    entries: HashMap<(u64, u32, Algorithm), u128>,
}

/// `$KLEINZETA_CACHE`, else `$XDG_CACHE_HOME/kleinzeta/counts.jsonl`, else
/// `$HOME/.cache/kleinzeta/counts.jsonl`.
pub fn default_path() -> Option<PathBuf> {
    if let Some(p) = std::env::var_os(CACHE_ENV) {
        return Some(PathBuf::from(p));
    }
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
    Some(base.join("kleinzeta").join("counts.jsonl"))
}

impl CountCache {
    pub fn disabled() -> Self {
        CountCache {
            path: None,
            entries: HashMap::new(),
        }
    }

    /// Entries written by another tool version, and unparsable lines, are
    /// ignored.
    pub fn open(path: &Path) -> Result<Self, CliError> {
        let mut entries = HashMap::new();
        if path.exists() {
            let file = File::open(path).map_err(|e| CliError::Cache(path.to_owned(), e))?;
            for line in BufReader::new(file).lines() {
                let line = line.map_err(|e| CliError::Cache(path.to_owned(), e))?;
                if let Ok(e) = serde_json::from_str::<CacheEntry>(&line) {
                    if e.version == VERSION {
                        entries.insert((e.p, e.k, e.algorithm), e.count);
                    }
                }
            }
        }
        Ok(CountCache {
            path: Some(path.to_owned()),
            entries,
        })
    }

    pub fn get(&self, p: u64, k: u32, algorithm: Algorithm) -> Option<u128> {
        self.entries.get(&(p, k, algorithm)).copied()
    }

    pub fn insert(&mut self, p: u64, k: u32, algorithm: Algorithm, count: u128) -> Result<(), CliError> {
        if self.entries.insert((p, k, algorithm), count) == Some(count) {
            return Ok(());
        }
        let Some(path) = &self.path else { return Ok(()) };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| CliError::Cache(dir.to_owned(), e))?;
        }
        let entry = CacheEntry {
            p,
            k,
            count,
            algorithm,
            version: VERSION.into(),
        };
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::Cache(path.clone(), e))?;
        let line = serde_json::to_string(&entry).expect("cache entries serialize");
        writeln!(file, "{line}").map_err(|e| CliError::Cache(path.clone(), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_version_filter() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("c.jsonl");
        let mut c = CountCache::open(&path).unwrap();
        c.insert(3, 1, Algorithm::QuadFiber, 40).unwrap();
        c.insert(3, 1, Algorithm::QuadFiber, 40).unwrap();
        let mut text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
        text.push_str("{\"p\":5,\"k\":1,\"count\":156,\"algorithm\":\"direct\",\"version\":\"0.0.0\"}\nnot json\n");
        fs::write(&path, text).unwrap();
        let c = CountCache::open(&path).unwrap();
        assert_eq!(c.get(3, 1, Algorithm::QuadFiber), Some(40));
        assert_eq!(c.get(3, 1, Algorithm::Direct), None);
        assert_eq!(c.get(5, 1, Algorithm::Direct), None);
    }
}
