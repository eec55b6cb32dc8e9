//! Simulated students with a negated Gompertz success curve.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

/// `ln 4`: gives a 75% pass rate when item and student levels match.
pub const DEFAULT_B: f64 = 2.0 * std::f64::consts::LN_2;
pub const DEFAULT_C: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StudentLabel {
    Beginner,
    Intermediate,
    Advanced,
}

impl StudentLabel {
    pub const ALL: [StudentLabel; 3] = [StudentLabel::Beginner, StudentLabel::Intermediate, StudentLabel::Advanced];

    pub fn as_str(self) -> &'static str {
        match self {
            StudentLabel::Beginner => "beginner",
            StudentLabel::Intermediate => "intermediate",
            StudentLabel::Advanced => "advanced",
        }
    }

    pub fn default_proficiency(self) -> f64 {
        match self {
            StudentLabel::Beginner => 0.5,
            StudentLabel::Intermediate => 2.5,
            StudentLabel::Advanced => 4.5,
        }
    }
}

impl fmt::Display for StudentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StudentLabel {
    type Err = StudentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StudentLabel::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| StudentError::UnknownLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StudentError {
    #[error("unknown student label {0:?}")]
    UnknownLabel(String),
    #[error("proficiency must lie in [0, 6], got {0}")]
    Proficiency(f64),
    #[error("Gompertz parameter {name} must be positive and finite, got {value}")]
    Parameter { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulatedStudent {
    pub label: StudentLabel,
    /// Latent level on the continuous 0..=6 CEFR scale.
    pub proficiency: f64,
    #[serde(default = "default_b")]
    pub b: f64,
    #[serde(default = "default_c")]
    pub c: f64,
}

fn default_b() -> f64 {
    DEFAULT_B
}

fn default_c() -> f64 {
    DEFAULT_C
}

impl SimulatedStudent {
    pub fn new(label: StudentLabel, proficiency: f64, b: f64, c: f64) -> Result<Self, StudentError> {
        let s = Self { label, proficiency, b, c };
        s.validate()?;
        Ok(s)
    }

    pub fn preset(label: StudentLabel) -> Self {
        Self { label, proficiency: label.default_proficiency(), b: DEFAULT_B, c: DEFAULT_C }
    }

    pub fn defaults() -> Vec<Self> {
        StudentLabel::ALL.into_iter().map(Self::preset).collect()
    }

    pub fn validate(&self) -> Result<(), StudentError> {
        if !(0.0..=6.0).contains(&self.proficiency) {
            return Err(StudentError::Proficiency(self.proficiency));
        }
        for (name, value) in [("b", self.b), ("c", self.c)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(StudentError::Parameter { name, value });
            }
        }
        Ok(())
    }

    /// `1 - exp(-b * exp(-c * (item_level - proficiency)))`.
    pub fn success_probability(&self, item_level: f64) -> f64 {
        -(-self.hazard(item_level)).exp_m1()
    }

    /// `1 - success_probability`, computed directly so it stays resolvable
    /// where the success probability has rounded to 1.0.
    pub fn failure_probability(&self, item_level: f64) -> f64 {
        (-self.hazard(item_level)).exp()
    }

    fn hazard(&self, item_level: f64) -> f64 {
        self.b * (-self.c * (item_level - self.proficiency)).exp()
    }

    /// One Bernoulli draw with the success probability for `item_level`.
    pub fn simulate_answer<R: Rng + ?Sized>(&self, item_level: f64, rng: &mut R) -> bool {
        rng.gen::<f64>() < self.success_probability(item_level)
    }
}
