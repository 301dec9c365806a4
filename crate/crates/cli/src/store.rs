//! Content-addressed artifact store: JSON bytes keyed by their hash, with
//! timestamps kept in a sidecar so the artifact itself stays deterministic.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use interpolab_core::cert::Artifact;

pub struct CertificateStore {
    dir: PathBuf,
}

impl CertificateStore {
    pub fn new(dir: &Path) -> Self {
        CertificateStore { dir: dir.to_path_buf() }
    }

    /// Writes `<kind>-<hash16>.json` plus a `.meta.json` sidecar; returns the
    /// artifact path. Identical artifacts land on identical paths.
    pub fn save(&self, kind: &str, artifact: &Artifact) -> std::io::Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let hash = artifact.content_hash();
        let path = self.dir.join(format!("{kind}-{}.json", &hash[..16]));
        fs::write(&path, artifact.to_json_bytes())?;
        write_sidecar(&path)?;
        Ok(path)
    }
}

/// Timestamp sidecar for any written artifact path.
pub fn write_sidecar(artifact_path: &Path) -> std::io::Result<()> {
    let meta = artifact_path.with_extension("meta.json");
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
    fs::write(meta, format!("{{\n  \"created_unix_ms\": {now}\n}}\n"))
}
