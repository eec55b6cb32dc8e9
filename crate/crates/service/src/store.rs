use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use qtutor_core::{Presentation, SessionRng, SessionState};
use serde::{Deserialize, Serialize};

/// Everything persisted for one session, including the position of its
/// random stream so a restart continues the same sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionEnvelope {
    pub session_id: String,
    pub created_at: DateTime<Utc>,
    pub seed: u64,
    pub rng: SessionRng,
    pub session: SessionState,
    pub pending: Option<Presentation>,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: corrupt session document: {message}")]
    Corrupt { path: PathBuf, message: String },
}

#[derive(Debug, Clone)]
pub struct SessionStore {
    dir: PathBuf,
}

impl SessionStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| StoreError::Io { path: dir.clone(), source })?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Ids are generated server-side; anything outside `[A-Za-z0-9-]` cannot exist.
    pub fn is_valid_id(id: &str) -> bool {
        !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
    }

    fn path_for(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    pub fn load(&self, id: &str) -> Result<Option<SessionEnvelope>, StoreError> {
        if !Self::is_valid_id(id) {
            return Ok(None);
        }
        let path = self.path_for(id);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(StoreError::Io { path, source }),
        };
        let corrupt = |message: String| StoreError::Corrupt { path: path.clone(), message };
        let env: SessionEnvelope = serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
        if env.session_id != id {
            return Err(corrupt(format!("document holds session {:?}", env.session_id)));
        }
        env.session.validate().map_err(|e| corrupt(e.to_string()))?;
        if let Some(p) = &env.pending {
            if p.index != env.session.interaction_count + 1 || p.level_before != env.session.current_level {
                return Err(corrupt("pending question does not match session".into()));
            }
        }
        Ok(Some(env))
    }

    /// Write to a temporary file, fsync, then rename over the old document.
    pub fn save(&self, env: &SessionEnvelope) -> Result<(), StoreError> {
        let path = self.path_for(&env.session_id);
        let tmp = self.dir.join(format!(".{}.json.tmp", env.session_id));
        let io_err = |source| StoreError::Io { path: path.clone(), source };
        let bytes = serde_json::to_vec_pretty(env).expect("session serializes");
        let mut file = File::create(&tmp).map_err(io_err)?;
        file.write_all(&bytes).map_err(io_err)?;
        file.sync_all().map_err(io_err)?;
        fs::rename(&tmp, &path).map_err(io_err)?;
        Ok(())
    }
}
