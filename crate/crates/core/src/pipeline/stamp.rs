//! Content-hash stamps deciding whether a stage can be skipped.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stamp {
    pub inputs: String,
    pub config: String,
    /// Output file name to content hash.
    pub outputs: BTreeMap<String, String>,
    pub counts: serde_json::Value,
}

pub fn hash_file(path: &Path) -> Result<String> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    let mut reader = BufReader::with_capacity(1 << 20, file);
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 20];
    loop {
        let n = reader.read(&mut buf).map_err(|e| Error::file(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Hash of several files, sensitive to their order and names.
pub fn hash_files(paths: &[&Path]) -> Result<String> {
    let mut hasher = Sha256::new();
    for p in paths {
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        hasher.update(name.as_bytes());
        hasher.update([0]);
        hasher.update(hash_file(p)?.as_bytes());
    }
    Ok(hex::encode(hasher.finalize()))
}

pub fn hash_value<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config values serialize");
    hex::encode(Sha256::digest(bytes))
}

pub fn read(path: &Path) -> Option<Stamp> {
    let file = File::open(path).ok()?;
    serde_json::from_reader(BufReader::new(file)).ok()
}

impl Stamp {
    /// True when the recorded outputs still exist with the recorded content.
    pub fn outputs_intact(&self, dir: &Path) -> bool {
        self.outputs.iter().all(|(name, hash)| hash_file(&dir.join(name)).is_ok_and(|h| &h == hash))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hashes_track_content_and_names() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        std::fs::write(&a, "x").unwrap();
        std::fs::write(&b, "x").unwrap();
        assert_eq!(hash_file(&a).unwrap(), hash_file(&b).unwrap());
        assert_ne!(hash_files(&[&a]).unwrap(), hash_files(&[&b]).unwrap());
        let before = hash_files(&[&a, &b]).unwrap();
        std::fs::write(&b, "y").unwrap();
        assert_ne!(before, hash_files(&[&a, &b]).unwrap());
        assert!(hash_file(&dir.path().join("missing")).is_err());
    }
}
