use serde::{Deserialize, Serialize};

/// Learning rate, discount and exploitation probability for one model.
///
/// `epsilon` is the probability of acting *greedily*; with probability
/// `1 - epsilon` a uniformly random valid action is taken instead. This is
/// the reverse of the usual convention: `epsilon = 1.0` never explores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningParams {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamsError {
    #[error("alpha must be in (0, 1], got {0}")]
    Alpha(f64),
    #[error("gamma must be in [0, 1], got {0}")]
    Gamma(f64),
    #[error("epsilon must be in [0, 1], got {0}")]
    Epsilon(f64),
    #[error("word models act greedily; word epsilon must be 1.0, got {0}")]
    WordEpsilon(f64),
}

impl LearningParams {
    pub const LEVEL_DEFAULT: LearningParams = LearningParams { alpha: 0.1, gamma: 0.9, epsilon: 0.95 };
    pub const WORD_DEFAULT: LearningParams = LearningParams { alpha: 0.1, gamma: 0.9, epsilon: 1.0 };

    pub fn validate(&self) -> Result<(), ParamsError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(ParamsError::Alpha(self.alpha));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(ParamsError::Gamma(self.gamma));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(ParamsError::Epsilon(self.epsilon));
        }
        Ok(())
    }
}

/// How a word is picked among the active candidates at the chosen level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WordSelection {
    #[default]
    UniformActive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TutorParams {
    pub level: LearningParams,
    pub word: LearningParams,
    pub word_selection: WordSelection,
}

impl Default for TutorParams {
    fn default() -> Self {
        Self {
            level: LearningParams::LEVEL_DEFAULT,
            word: LearningParams::WORD_DEFAULT,
            word_selection: WordSelection::UniformActive,
        }
    }
}

impl TutorParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        self.level.validate()?;
        self.word.validate()?;
        // word transitions happen only through the greedy toggle rule
        if self.word.epsilon != 1.0 {
            return Err(ParamsError::WordEpsilon(self.word.epsilon));
        }
        Ok(())
    }
}
