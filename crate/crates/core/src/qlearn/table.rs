use std::collections::BTreeMap;
use std::fmt::Debug;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use super::params::LearningParams;
use crate::cefr::{valid_level_actions, CefrLevel, LevelAction, Reward, WordAction, WordState};

/// A model's state type together with the actions legal in each state.
pub trait StateSpace: Copy + Ord + Debug + Serialize + DeserializeOwned {
    type Action: Copy + Ord + Debug + Serialize + DeserializeOwned;

    fn actions(self) -> Vec<Self::Action>;
}

impl StateSpace for CefrLevel {
    type Action = LevelAction;

    fn actions(self) -> Vec<LevelAction> {
        valid_level_actions(self)
    }
}

impl StateSpace for WordState {
    type Action = WordAction;

    fn actions(self) -> Vec<WordAction> {
        WordAction::ALL.to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QError {
    #[error("{model}: action {action} is not valid in state {state}")]
    InvalidPair { model: String, state: String, action: String },
    #[error("{model}: no valid actions supplied")]
    NoActions { model: String },
    #[error("{model}: non-finite q-value {value} at ({state}, {action})")]
    NonFinite { model: String, state: String, action: String, value: f64 },
}

/// One Q-learning step on a single value:
/// `q + alpha * (reward + gamma * max_next - q)`.
pub fn td_update(q: f64, reward: f64, max_next: f64, alpha: f64, gamma: f64) -> f64 {
    q + alpha * (reward + gamma * max_next - q)
}

/// State-action values for one model. Entries never written read as 0.0.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable<S: StateSpace> {
    model: String,
    entries: BTreeMap<(S, S::Action), f64>,
}

impl<S: StateSpace> QTable<S> {
    pub fn new(model: impl Into<String>) -> Self {
        Self { model: model.into(), entries: BTreeMap::new() }
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn get(&self, state: S, action: S::Action) -> f64 {
        self.entries.get(&(state, action)).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (S, S::Action, f64)> + '_ {
        self.entries.iter().map(|(&(s, a), &q)| (s, a, q))
    }

    /// Overwrite one entry; the pair must be legal and the value finite.
    pub fn set(&mut self, state: S, action: S::Action, value: f64) -> Result<(), QError> {
        self.check_pair(state, action)?;
        self.check_finite(state, action, value)?;
        self.entries.insert((state, action), value);
        Ok(())
    }

    pub fn max_value(&self, state: S, actions: &[S::Action]) -> Result<f64, QError> {
        let mut best: Option<f64> = None;
        for &a in actions {
            let q = self.get(state, a);
            self.check_finite(state, a, q)?;
            best = Some(best.map_or(q, |b| b.max(q)));
        }
        best.ok_or_else(|| QError::NoActions { model: self.model.clone() })
    }

    /// All actions attaining the maximum value, in `actions` order.
    pub fn greedy_actions(&self, state: S, actions: &[S::Action]) -> Result<Vec<S::Action>, QError> {
        let best = self.max_value(state, actions)?;
        Ok(actions.iter().copied().filter(|&a| self.get(state, a) == best).collect())
    }

    /// The value `update` would write, without writing it.
    pub fn updated_value(
        &self,
        state: S,
        action: S::Action,
        reward: Reward,
        next_state: S,
        next_actions: &[S::Action],
        params: &LearningParams,
    ) -> Result<f64, QError> {
        self.check_pair(state, action)?;
        for &a in next_actions {
            self.check_pair(next_state, a)?;
        }
        let q = self.get(state, action);
        self.check_finite(state, action, q)?;
        let max_next = self.max_value(next_state, next_actions)?;
        let value = td_update(q, reward.as_f64(), max_next, params.alpha, params.gamma);
        self.check_finite(state, action, value)?;
        Ok(value)
    }

    /// Apply one Q-learning update to `(state, action)`; every other entry is untouched.
    pub fn update(
        &mut self,
        state: S,
        action: S::Action,
        reward: Reward,
        next_state: S,
        next_actions: &[S::Action],
        params: &LearningParams,
    ) -> Result<f64, QError> {
        let value = self.updated_value(state, action, reward, next_state, next_actions, params)?;
        self.entries.insert((state, action), value);
        Ok(value)
    }

    /// Check every stored entry is a legal pair with a finite value.
    pub fn validate(&self) -> Result<(), QError> {
        for (&(s, a), &q) in &self.entries {
            self.check_pair(s, a)?;
            self.check_finite(s, a, q)?;
        }
        Ok(())
    }

    fn check_pair(&self, state: S, action: S::Action) -> Result<(), QError> {
        if state.actions().contains(&action) {
            Ok(())
        } else {
            Err(QError::InvalidPair {
                model: self.model.clone(),
                state: format!("{state:?}"),
                action: format!("{action:?}"),
            })
        }
    }

    fn check_finite(&self, state: S, action: S::Action, value: f64) -> Result<(), QError> {
        if value.is_finite() {
            Ok(())
        } else {
            Err(QError::NonFinite {
                model: self.model.clone(),
                state: format!("{state:?}"),
                action: format!("{action:?}"),
                value,
            })
        }
    }
}

/// Render with 17 significant digits so the written value parses back exactly.
pub(crate) fn format_q(value: f64) -> String {
    if value == 0.0 {
        return "0.0".to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    if !(-4..15).contains(&magnitude) {
        return format!("{value:.16e}");
    }
    let decimals = (16 - magnitude).max(1) as usize;
    format!("{value:.decimals$}")
}

#[derive(Serialize)]
struct EntryOut<'a, S: StateSpace> {
    state: S,
    action: S::Action,
    q: &'a RawValue,
}

#[derive(Serialize)]
struct TableOut<'a, S: StateSpace> {
    model: &'a str,
    entries: Vec<EntryOut<'a, S>>,
}

#[derive(Deserialize)]
#[serde(bound = "")]
struct EntryIn<S: StateSpace> {
    state: S,
    action: S::Action,
    q: f64,
}

#[derive(Deserialize)]
#[serde(bound = "")]
struct TableIn<S: StateSpace> {
    model: String,
    entries: Vec<EntryIn<S>>,
}

impl<S: StateSpace> Serialize for QTable<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        let rendered: Vec<Box<RawValue>> = self
            .entries
            .values()
            .map(|&q| RawValue::from_string(format_q(q)).map_err(serde::ser::Error::custom))
            .collect::<Result<_, _>>()?;
        let entries = self
            .entries
            .keys()
            .zip(&rendered)
            .map(|(&(state, action), q)| EntryOut { state, action, q: q.as_ref() })
            .collect();
        TableOut { model: &self.model, entries }.serialize(serializer)
    }
}

impl<'de, S: StateSpace> Deserialize<'de> for QTable<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = TableIn::<S>::deserialize(deserializer)?;
        let mut table = QTable::new(raw.model);
        for e in raw.entries {
            table.set(e.state, e.action, e.q).map_err(serde::de::Error::custom)?;
        }
        Ok(table)
    }
}
