use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::params::{TutorParams, WordSelection};
use super::policy::select_action;
use super::table::{QError, QTable};
use crate::cefr::{apply_level_action, valid_level_actions, CefrLevel, LevelAction, Reward, WordAction, WordState};
use crate::vocab::Lexicon;

/// Per-word model: visibility state plus its own value table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordModel {
    pub state: WordState,
    pub q: QTable<WordState>,
    /// Interaction index at which the word was last shown.
    pub last_shown: Option<u32>,
}

impl WordModel {
    pub fn new(word: &str) -> Self {
        Self { state: WordState::Active, q: QTable::new(format!("word:{word}")), last_shown: None }
    }

    /// Greedy action from Active is Toggle. Ties keep the word (Remain).
    pub fn prefers_toggle(&self) -> bool {
        self.q.get(WordState::Active, WordAction::Toggle) > self.q.get(WordState::Active, WordAction::Remain)
    }

    pub fn is_candidate(&self) -> bool {
        self.state == WordState::Active && !self.prefers_toggle()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub index: u32,
    pub level_before: CefrLevel,
    pub level_action: LevelAction,
    pub level_after: CefrLevel,
    pub word: String,
    pub correct: bool,
    pub reward: Reward,
}

/// A question chosen by [`next_item`], awaiting an answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    /// 1-based index of the interaction this question belongs to.
    pub index: u32,
    pub level_before: CefrLevel,
    pub level_action: LevelAction,
    pub level_after: CefrLevel,
    pub word: String,
    /// The word was reset to Active because no candidate was left at its level.
    #[serde(default)]
    pub reactivated: bool,
}

/// Full tutor state for one student.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub student_id: String,
    pub current_level: CefrLevel,
    pub level_q: QTable<CefrLevel>,
    /// Words never shown have no entry and behave as a fresh [`WordModel`].
    pub word_models: BTreeMap<String, WordModel>,
    pub interaction_count: u32,
    pub cumulative_reward: i64,
    pub history: Vec<InteractionRecord>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("presentation does not match session state: {0}")]
    Mismatch(String),
    #[error("lexicon has no words at level {0}")]
    EmptyLevel(CefrLevel),
    #[error("corrupt session: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Q(#[from] QError),
}

impl SessionState {
    pub fn new(student_id: impl Into<String>) -> Self {
        Self {
            student_id: student_id.into(),
            current_level: CefrLevel::A1,
            level_q: QTable::new("level"),
            word_models: BTreeMap::new(),
            interaction_count: 0,
            cumulative_reward: 0,
            history: Vec::new(),
        }
    }

    pub fn word_model(&self, word: &str) -> Option<&WordModel> {
        self.word_models.get(word)
    }

    pub fn word_state(&self, word: &str) -> WordState {
        self.word_models.get(word).map_or(WordState::Active, |m| m.state)
    }

    /// Check the bookkeeping and table invariants, e.g. after loading from disk.
    pub fn validate(&self) -> Result<(), SessionError> {
        self.level_q.validate()?;
        if self.level_q.model() != "level" {
            return Err(SessionError::Corrupt(format!("level table labelled {:?}", self.level_q.model())));
        }
        for (word, m) in &self.word_models {
            m.q.validate()?;
            if m.q.model() != format!("word:{word}") {
                return Err(SessionError::Corrupt(format!("word table for {word:?} labelled {:?}", m.q.model())));
            }
            if m.q.get(WordState::Inactive, WordAction::Remain) != 0.0
                || m.q.get(WordState::Inactive, WordAction::Toggle) != 0.0
            {
                return Err(SessionError::Corrupt(format!("inactive row of {word:?} was written")));
            }
        }
        if self.interaction_count as usize != self.history.len() {
            return Err(SessionError::Corrupt(format!(
                "interaction_count {} but {} history records",
                self.interaction_count,
                self.history.len()
            )));
        }
        let sum: i64 = self.history.iter().map(|r| r.reward.value()).sum();
        if sum != self.cumulative_reward {
            return Err(SessionError::Corrupt(format!(
                "cumulative_reward {} but history sums to {sum}",
                self.cumulative_reward
            )));
        }
        let mut level = CefrLevel::A1;
        for (i, r) in self.history.iter().enumerate() {
            if r.index as usize != i + 1
                || r.level_before != level
                || r.level_after != apply_level_action(r.level_before, r.level_action)
                || r.reward != Reward::for_answer(r.correct)
            {
                return Err(SessionError::Corrupt(format!("history record {} is inconsistent", i + 1)));
            }
            level = r.level_after;
        }
        if level != self.current_level {
            return Err(SessionError::Corrupt("current level does not follow history".into()));
        }
        Ok(())
    }
}

/// Choose the next question without modifying the session.
///
/// Draw order: level action (one draw plus at most one tie-break or explore
/// draw), then the word among the active candidates. If no candidate remains
/// at the chosen level, the least recently shown word there is reactivated
/// and no word draw is made.
pub fn next_item<R: Rng + ?Sized>(
    session: &SessionState,
    lexicon: &Lexicon,
    params: &TutorParams,
    rng: &mut R,
) -> Result<Presentation, SessionError> {
    let level_before = session.current_level;
    let valid = valid_level_actions(level_before);
    let level_action = select_action(&session.level_q, level_before, &valid, params.level.epsilon, rng)?;
    let level_after = apply_level_action(level_before, level_action);

    let at_level: Vec<&str> = lexicon.words_at(level_after).map(|w| w.word.as_str()).collect();
    if at_level.is_empty() {
        return Err(SessionError::EmptyLevel(level_after));
    }
    let candidates: Vec<&str> = at_level
        .iter()
        .copied()
        .filter(|w| session.word_model(w).is_none_or(WordModel::is_candidate))
        .collect();

    let (word, reactivated) = if candidates.is_empty() {
        let oldest = at_level
            .iter()
            .copied()
            .min_by_key(|w| session.word_model(w).and_then(|m| m.last_shown))
            .expect("non-empty level");
        (oldest, true)
    } else {
        match params.word_selection {
            WordSelection::UniformActive => (candidates[rng.gen_range(0..candidates.len())], false),
        }
    };

    Ok(Presentation {
        index: session.interaction_count + 1,
        level_before,
        level_action,
        level_after,
        word: word.to_string(),
        reactivated,
    })
}

/// Apply the answer to `presentation`: reward both models, advance the level
/// and append to the history. The session is unchanged on error.
pub fn record_outcome<'s>(
    session: &'s mut SessionState,
    presentation: &Presentation,
    correct: bool,
    params: &TutorParams,
) -> Result<&'s InteractionRecord, SessionError> {
    let p = presentation;
    if p.index != session.interaction_count + 1 {
        return Err(SessionError::Mismatch(format!(
            "presentation is for interaction {}, session expects {}",
            p.index,
            session.interaction_count + 1
        )));
    }
    if p.level_before != session.current_level {
        return Err(SessionError::Mismatch(format!(
            "presentation starts at {}, session is at {}",
            p.level_before, session.current_level
        )));
    }
    if !valid_level_actions(p.level_before).contains(&p.level_action)
        || apply_level_action(p.level_before, p.level_action) != p.level_after
    {
        return Err(SessionError::Mismatch(format!(
            "{:?} does not lead from {} to {}",
            p.level_action, p.level_before, p.level_after
        )));
    }

    let reward = Reward::for_answer(correct);
    let level_value = session.level_q.updated_value(
        p.level_before,
        p.level_action,
        reward,
        p.level_after,
        &valid_level_actions(p.level_after),
        &params.level,
    )?;

    let mut model = session.word_models.get(&p.word).cloned().unwrap_or_else(|| WordModel::new(&p.word));
    if p.reactivated {
        model.state = WordState::Active;
        model.q.set(WordState::Active, WordAction::Remain, 0.0)?;
    }
    model
        .q
        .update(WordState::Active, WordAction::Remain, reward, WordState::Active, &WordAction::ALL, &params.word)?;
    if model.prefers_toggle() {
        model.state = model.state.apply(WordAction::Toggle);
    }
    model.last_shown = Some(p.index);

    session.level_q.set(p.level_before, p.level_action, level_value)?;
    session.word_models.insert(p.word.clone(), model);
    session.current_level = p.level_after;
    session.interaction_count += 1;
    session.cumulative_reward += reward.value();
    session.history.push(InteractionRecord {
        index: p.index,
        level_before: p.level_before,
        level_action: p.level_action,
        level_after: p.level_after,
        word: p.word.clone(),
        correct,
        reward,
    });
    Ok(session.history.last().expect("just pushed"))
}
