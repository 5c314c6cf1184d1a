//! Content-addressed on-disk cache for computed tables.
//!
//! Keys are digests of a structured key string (module, quiver, prime,
//! grading, operation); values are JSON. Writes are idempotent, so
//! concurrent runs sharing a directory are safe.

use crate::{Error, Result};
use sha2::{Digest, Sha256};
use std::path::PathBuf;

/// A cache handle; `None` directory disables caching entirely.
#[derive(Debug, Clone, Default)]
pub struct Cache {
    pub dir: Option<PathBuf>,
}

impl Cache {
    pub fn disabled() -> Cache {
        Cache { dir: None }
    }

    pub fn at(dir: PathBuf) -> Cache {
        Cache { dir: Some(dir) }
    }

    fn path_for(&self, key: &str) -> Option<PathBuf> {
        let dir = self.dir.as_ref()?;
        let mut h = Sha256::new();
        h.update(key.as_bytes());
        Some(dir.join(format!("{}.json", hex::encode(&h.finalize()[..16]))))
    }

    pub fn get(&self, key: &str) -> Option<serde_json::Value> {
        let path = self.path_for(key)?;
        let text = std::fs::read_to_string(path).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, key: &str, value: &serde_json::Value) -> Result<()> {
        let Some(path) = self.path_for(key) else {
            return Ok(());
        };
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::Cache(format!("create {}: {e}", parent.display())))?;
        }
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_string(value).expect("serializable"))
            .map_err(|e| Error::Cache(format!("write {}: {e}", tmp.display())))?;
        std::fs::rename(&tmp, &path)
            .map_err(|e| Error::Cache(format!("rename {}: {e}", path.display())))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let dir = std::env::temp_dir().join(format!("hallforge-cache-test-{}", std::process::id()));
        let cache = Cache::at(dir.clone());
        let v = serde_json::json!({"a": 1});
        cache.put("k", &v).unwrap();
        assert_eq!(cache.get("k"), Some(v));
        assert_eq!(cache.get("missing"), None);
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn disabled_cache_is_silent() {
        let cache = Cache::disabled();
        cache.put("k", &serde_json::json!(1)).unwrap();
        assert_eq!(cache.get("k"), None);
    }
}
