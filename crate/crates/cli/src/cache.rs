//! Append-only cache of point counts, one JSON record per line.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const FILE_NAME: &str = "counts.ndjson";

/// Everything a cached count depends on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub scheme: String,
    pub ring: String,
    pub engine: String,
    pub version: String,
}

impl CacheKey {
    pub fn new(scheme: &str, ring: &str, engine: &str) -> Self {
        CacheKey {
            scheme: scheme.into(),
            ring: ring.into(),
            engine: engine.into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for part in [&self.scheme, &self.ring, &self.engine, &self.version] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub hash: String,
    #[serde(flatten)]
    pub key: CacheKey,
    pub count: String,
    pub timestamp: u64,
}

pub struct Cache {
    path: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Cache {
            path: dir.join(FILE_NAME),
        })
    }

    /// The most recent record for `key`. Unreadable lines are skipped with a
    /// warning on stderr.
    pub fn get(&self, key: &CacheKey) -> Option<String> {
        let file = File::open(&self.path).ok()?;
        let digest = key.digest();
        let mut found = None;
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let Ok(line) = line else {
                eprintln!("warning: cache line {} unreadable, skipped", i + 1);
                continue;
            };
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<CacheRecord>(&line) {
                // the digest only narrows the search; the full key decides
                Ok(rec) if rec.hash == digest && rec.key == *key => found = Some(rec.count),
                Ok(_) => {}
                Err(e) => eprintln!("warning: corrupt cache record at line {} skipped: {e}", i + 1),
            }
        }
        found
    }

    pub fn put(&self, key: &CacheKey, count: &str) -> std::io::Result<()> {
        let rec = CacheRecord {
            hash: key.digest(),
            key: key.clone(),
            count: count.into(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let mut line = serde_json::to_string(&rec).expect("records serialize");
        line.push('\n');
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        f.write_all(line.as_bytes())
    }
}
