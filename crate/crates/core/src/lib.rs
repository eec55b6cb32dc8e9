//! Adaptive vocabulary tutoring with tabular Q-learning.
//!
//! Two models drive the curriculum: a CEFR level model that decides whether a
//! student moves up, stays or moves down a level, and one word model per
//! vocabulary item that decides whether the word keeps being shown. Simulated
//! students answer with a negated Gompertz success curve, and the [`sim`]
//! harness runs the three-student experiment end to end.

pub mod cefr;
pub mod qlearn;
pub mod rng;
pub mod sim;
pub mod student;
pub mod vocab;

pub use cefr::{apply_level_action, valid_level_actions, CefrLevel, LevelAction, Reward, WordAction, WordState};
pub use qlearn::{
    next_item, record_outcome, select_action, InteractionRecord, LearningParams, Presentation, QError, QTable,
    SessionError, SessionState, TutorParams, WordModel, WordSelection,
};
pub use rng::{derive_seed, session_rng, RngSeed, SessionRng};
pub use student::{SimulatedStudent, StudentLabel};
pub use vocab::{validate_answer, EmbeddingIndex, Lexicon, VocabError, WordItem};
