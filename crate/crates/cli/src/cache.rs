//! Append-only JSONL cache of computed records.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::record::CacheEntry;

pub struct Cache {
    path: PathBuf,
    // (kind, p, fingerprint) -> payload; later lines win
    entries: HashMap<(String, u64, String), serde_json::Value>,
    writer: Option<File>,
}

impl Cache {
    /// Reads `path` if it exists. `None` disables caching.
    pub fn open(path: Option<&Path>) -> Result<Cache> {
        let mut cache = Cache {
            path: path.map(Path::to_path_buf).unwrap_or_default(),
            entries: HashMap::new(),
            writer: None,
        };
        let Some(path) = path else {
            return Ok(cache);
        };
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(CliError::io(path)(e)),
        };
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(CliError::io(path))?;
            if line.trim().is_empty() {
                continue;
            }
            let e: CacheEntry = serde_json::from_str(&line).map_err(|err| CliError::Cache {
                path: path.to_path_buf(),
                line: i + 1,
                detail: err.to_string(),
            })?;
            cache.entries.insert((e.kind, e.p, e.config_fingerprint), e.payload);
        }
        Ok(cache)
    }

    pub fn enabled(&self) -> bool {
        !self.path.as_os_str().is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get<T: DeserializeOwned>(&self, kind: &str, p: u64, fingerprint: &str) -> Option<T> {
        let v = self.entries.get(&(kind.to_string(), p, fingerprint.to_string()))?;
        serde_json::from_value(v.clone()).ok()
    }

    pub fn put<T: Serialize>(&mut self, kind: &str, p: u64, fingerprint: &str, payload: &T) -> Result<()> {
        let payload = serde_json::to_value(payload).expect("payload serializes");
        if self.enabled() {
            let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            let entry = CacheEntry {
                kind: kind.to_string(),
                p,
                payload: payload.clone(),
                config_fingerprint: fingerprint.to_string(),
                timestamp,
            };
            if self.writer.is_none() {
                if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
                }
                let f = OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(&self.path)
                    .map_err(CliError::io(&self.path))?;
                self.writer = Some(f);
            }
            let w = self.writer.as_mut().expect("writer opened");
            let mut line = serde_json::to_string(&entry).expect("entry serializes");
            line.push('\n');
            w.write_all(line.as_bytes()).map_err(CliError::io(&self.path))?;
            w.flush().map_err(CliError::io(&self.path))?;
        }
        self.entries.insert((kind.to_string(), p, fingerprint.to_string()), payload);
        Ok(())
    }
}
