//! The six-point CEFR scale and the action sets of both tutor models.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A CEFR proficiency level, stored as its index on the 0..=5 scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CefrLevel(u8);

const LABELS: [&str; 6] = ["A1", "A2", "B1", "B2", "C1", "C2"];

impl CefrLevel {
    pub const A1: CefrLevel = CefrLevel(0);
    pub const A2: CefrLevel = CefrLevel(1);
    pub const B1: CefrLevel = CefrLevel(2);
    pub const B2: CefrLevel = CefrLevel(3);
    pub const C1: CefrLevel = CefrLevel(4);
    pub const C2: CefrLevel = CefrLevel(5);

    pub const MIN: CefrLevel = CefrLevel::A1;
    pub const MAX: CefrLevel = CefrLevel::C2;

    pub const ALL: [CefrLevel; 6] = [
        CefrLevel::A1,
        CefrLevel::A2,
        CefrLevel::B1,
        CefrLevel::B2,
        CefrLevel::C1,
        CefrLevel::C2,
    ];

    pub fn from_index(index: u8) -> Option<Self> {
        (index <= 5).then_some(CefrLevel(index))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn label(self) -> &'static str {
        LABELS[self.0 as usize]
    }
}

impl fmt::Display for CefrLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown CEFR level {0:?} (expected A1..C2)")]
pub struct ParseLevelError(pub String);

impl FromStr for CefrLevel {
    type Err = ParseLevelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LABELS
            .iter()
            .position(|l| l.eq_ignore_ascii_case(s.trim()))
            .map(|i| CefrLevel(i as u8))
            .ok_or_else(|| ParseLevelError(s.to_string()))
    }
}

impl Serialize for CefrLevel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for CefrLevel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Level-model actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelAction {
    Up,
    Stay,
    Down,
}

impl LevelAction {
    pub const ALL: [LevelAction; 3] = [LevelAction::Up, LevelAction::Stay, LevelAction::Down];
}

/// Word-model states: shown to the student or hidden.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordState {
    Active,
    Inactive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordAction {
    Remain,
    Toggle,
}

impl WordAction {
    pub const ALL: [WordAction; 2] = [WordAction::Remain, WordAction::Toggle];
}

impl WordState {
    pub fn apply(self, action: WordAction) -> WordState {
        match (self, action) {
            (s, WordAction::Remain) => s,
            (WordState::Active, WordAction::Toggle) => WordState::Inactive,
            (WordState::Inactive, WordAction::Toggle) => WordState::Active,
        }
    }
}

/// Tutor reward: -1 for a correct answer, +1 for an incorrect one.
///
/// Correct answers lower the value of repeating the same material, so the
/// greedy policy drifts toward questions the student still gets wrong.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Reward(i8);

impl Reward {
    pub const CORRECT: Reward = Reward(-1);
    pub const INCORRECT: Reward = Reward(1);

    pub fn for_answer(correct: bool) -> Reward {
        if correct {
            Reward::CORRECT
        } else {
            Reward::INCORRECT
        }
    }

    pub fn value(self) -> i64 {
        self.0 as i64
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl Serialize for Reward {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.0)
    }
}

impl<'de> Deserialize<'de> for Reward {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match i8::deserialize(deserializer)? {
            -1 => Ok(Reward::CORRECT),
            1 => Ok(Reward::INCORRECT),
            other => Err(serde::de::Error::custom(format!("reward must be -1 or +1, got {other}"))),
        }
    }
}

/// Move one level up or down, clamped to the scale.
pub fn apply_level_action(level: CefrLevel, action: LevelAction) -> CefrLevel {
    let i = level.index();
    let next = match action {
        LevelAction::Up => i.saturating_add(1).min(CefrLevel::MAX.index()),
        LevelAction::Stay => i,
        LevelAction::Down => i.saturating_sub(1),
    };
    CefrLevel(next)
}

/// Actions that actually change or keep the level; Down is masked at A1 and Up at C2.
pub fn valid_level_actions(level: CefrLevel) -> Vec<LevelAction> {
    LevelAction::ALL
        .into_iter()
        .filter(|a| match a {
            LevelAction::Up => level < CefrLevel::MAX,
            LevelAction::Stay => true,
            LevelAction::Down => level > CefrLevel::MIN,
        })
        .collect()
}
