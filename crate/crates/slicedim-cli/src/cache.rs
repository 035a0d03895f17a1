//! Content-addressed result cache.
//!
//! Entries are keyed by (p, q, computation, n, code version) and stored one
//! file per key; big integers are serialized as decimal strings. A version
//! bump invalidates everything. Corrupt or mismatched entries fall back to
//! recomputation. Writes go through a temp file and rename, so concurrent
//! writers of the same deterministic value end in a consistent state.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Bump to invalidate cached values when computations change.
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub p: u64,
    pub q: u64,
    pub computation: String,
    pub n: usize,
    pub version: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    key: CacheKey,
    value: serde_json::Value,
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: &Path) -> std::io::Result<Cache> {
        fs::create_dir_all(dir)?;
        Ok(Cache {
            dir: dir.to_path_buf(),
        })
    }

    /// Cache directory from the explicit flag or the environment override.
    pub fn from_options(flag: Option<&Path>) -> std::io::Result<Option<Cache>> {
        if let Some(dir) = flag {
            return Ok(Some(Cache::new(dir)?));
        }
        if let Ok(dir) = std::env::var("SLICEDIM_CACHE_DIR") {
            if !dir.is_empty() {
                return Ok(Some(Cache::new(Path::new(&dir))?));
            }
        }
        Ok(None)
    }

    fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!(
            "{}-p{}-q{}-n{}-v{}.json",
            key.computation, key.p, key.q, key.n, key.version
        ))
    }

    pub fn lookup(&self, key: &CacheKey) -> Option<serde_json::Value> {
        let path = self.path_for(key);
        let text = fs::read_to_string(path).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        // a corrupt or foreign entry is treated as a miss
        if &entry.key != key {
            return None;
        }
        Some(entry.value)
    }

    pub fn store(&self, key: &CacheKey, value: serde_json::Value) {
        let entry = CacheEntry {
            key: key.clone(),
            value,
        };
        let Ok(text) = serde_json::to_string_pretty(&entry) else {
            return;
        };
        let path = self.path_for(key);
        let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
        if fs::write(&tmp, text).is_ok() {
            let _ = fs::rename(&tmp, &path);
        }
    }
}

pub fn key(p: u64, q: u64, computation: &str, n: usize) -> CacheKey {
    CacheKey {
        p,
        q,
        computation: computation.to_string(),
        n,
        version: CACHE_VERSION,
    }
}
