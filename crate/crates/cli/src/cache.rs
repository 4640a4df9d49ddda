use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use crate::report::{ReportV1, ARTIFACT_VERSION};

pub const DEFAULT_DIR: &str = ".realstrata-cache";
pub const ENV_VAR: &str = "REALSTRATA_CACHE";

/// Identity of a detection job for caching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobKey {
    pub model: String,
    pub spec: String,
    pub t_gram: Option<[i64; 3]>,
}

impl JobKey {
    pub fn digest(&self) -> String {
        let t = match self.t_gram {
            Some([a, b, d]) => format!("{a},{b},{d}"),
            None => "-".into(),
        };
        let text = format!(
            "model={}\nspec={}\ntgram={}\nversion={}\n",
            self.model, self.spec, t, ARTIFACT_VERSION
        );
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// The environment variable wins over the flag.
    pub fn resolve(flag: Option<&Path>) -> Self {
        let dir = std::env::var_os(ENV_VAR)
            .map(PathBuf::from)
            .or_else(|| flag.map(Path::to_path_buf))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_DIR));
        Cache { dir }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &JobKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.digest()))
    }

    /// Unreadable or stale entries count as misses.
    pub fn load(&self, key: &JobKey) -> Option<ReportV1> {
        let text = fs::read_to_string(self.path_for(key)).ok()?;
        let report: ReportV1 = serde_json::from_str(&text).ok()?;
        (report.artifact == ARTIFACT_VERSION).then_some(report)
    }

    pub fn store(&self, key: &JobKey, report: &ReportV1) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating cache dir {}", self.dir.display()))?;
        let path = self.path_for(key);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string_pretty(report)?)
            .with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }
}
