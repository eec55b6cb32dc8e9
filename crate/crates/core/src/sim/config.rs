use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::qlearn::{LearningParams, ParamsError, TutorParams};
use crate::rng::RngSeed;
use crate::student::{SimulatedStudent, StudentError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub students: Vec<SimulatedStudent>,
    pub interactions: u32,
    pub runs: u32,
    pub base_seed: RngSeed,
    pub level_params: LearningParams,
    pub word_params: LearningParams,
    pub output_dir: PathBuf,
    /// Lexicon JSON; the bundled lexicon when absent.
    pub lexicon: Option<PathBuf>,
    /// word2vec text embeddings used to build synonym sets.
    pub embeddings: Option<PathBuf>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            students: SimulatedStudent::defaults(),
            interactions: 100,
            runs: 20,
            base_seed: RngSeed(2019),
            level_params: LearningParams::LEVEL_DEFAULT,
            word_params: LearningParams::WORD_DEFAULT,
            output_dir: PathBuf::from("sim-out"),
            lexicon: None,
            embeddings: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("interactions and runs must be at least 1")]
    Empty,
    #[error("no students configured")]
    NoStudents,
    #[error("student {0} is listed twice")]
    DuplicateStudent(String),
    #[error(transparent)]
    Student(#[from] StudentError),
    #[error(transparent)]
    Params(#[from] ParamsError),
}

impl SimulationConfig {
    /// Load TOML or JSON, chosen by extension (`.json` is JSON, anything else TOML).
    /// Relative `lexicon` and `embeddings` paths resolve against the file's directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let parse_err = |message: String| ConfigError::Parse { path: path.into(), message };
        let mut config: SimulationConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| parse_err(e.to_string()))?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut config.lexicon, &mut config.embeddings].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn tutor_params(&self) -> TutorParams {
        TutorParams { level: self.level_params, word: self.word_params, ..TutorParams::default() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.interactions == 0 || self.runs == 0 {
            return Err(ConfigError::Empty);
        }
        if self.students.is_empty() {
            return Err(ConfigError::NoStudents);
        }
        for (i, s) in self.students.iter().enumerate() {
            s.validate()?;
            if self.students[..i].iter().any(|o| o.label == s.label) {
                return Err(ConfigError::DuplicateStudent(s.label.to_string()));
            }
        }
        self.tutor_params().validate()?;
        Ok(())
    }
}
