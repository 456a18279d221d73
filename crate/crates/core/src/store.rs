//! Memoized resolutions, optionally persisted in a cache directory.
//!
//! Requests for a module already seen are answered by extending the stored
//! resolution, so asking for larger bounds never redoes the smaller work.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::modules::FdModule;
use crate::resolution::{resolve, Resolution, ResolutionError};

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "ADAMSEXT_CACHE_DIR";

#[derive(Debug, Default)]
pub struct ResolutionStore {
    dir: Option<PathBuf>,
    memory: HashMap<String, Resolution>,
    /// Cache files that could not be read and were recomputed.
    pub discarded: Vec<PathBuf>,
}

impl ResolutionStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Result<Self, ResolutionError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|source| ResolutionError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(ResolutionStore {
            dir: Some(dir),
            ..Self::default()
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn file_for(&self, key: &str) -> Option<PathBuf> {
        let digest = hex::encode(Sha256::digest(key.as_bytes()));
        self.dir.as_ref().map(|d| d.join(format!("{}.res", &digest[..24])))
    }

    /// A resolution of `m` covering at least `(max_s, max_t)`.
    pub fn get(&mut self, m: &FdModule, max_s: u32, max_t: i32) -> Result<Resolution, ResolutionError> {
        let key = m.to_dsl();
        let path = self.file_for(&key);
        let mut current = self.memory.remove(&key);
        if current.is_none() {
            if let Some(p) = path.as_ref().filter(|p| p.exists()) {
                match Resolution::load_for(p, m) {
                    Ok(r) => current = Some(r),
                    Err(_) => self.discarded.push(p.clone()),
                }
            }
        }
        let r = match current {
            Some(r) if r.max_s() >= max_s && r.max_t() >= max_t => {
                self.memory.insert(key, r.clone());
                return Ok(r);
            }
            Some(mut r) => {
                r.extend(max_s, max_t);
                r
            }
            None => resolve(m, max_s, max_t),
        };
        if let Some(p) = path {
            r.save(&p)?;
        }
        self.memory.insert(key, r.clone());
        Ok(r)
    }

    /// Every resolution held in memory, in a fixed order.
    pub fn resolutions(&self) -> Vec<&Resolution> {
        let mut keys: Vec<&String> = self.memory.keys().collect();
        keys.sort();
        keys.into_iter().map(|k| &self.memory[k]).collect()
    }
}
