use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;
use serde::Serialize;

use super::config::SimulationConfig;
use crate::cefr::{CefrLevel, Reward};
use crate::qlearn::{next_item, record_outcome, SessionError, SessionState, TutorParams};
use crate::rng::{derive_seed, session_rng, RngSeed};
use crate::student::{SimulatedStudent, StudentLabel};
use crate::vocab::{EmbeddingIndex, Lexicon, VocabError, DEFAULT_SYNONYM_COUNT};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub interaction: u32,
    /// Level the question was asked at.
    pub level: CefrLevel,
    pub reward: Reward,
    pub cumulative_reward: i64,
    pub word: String,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub student: StudentLabel,
    pub run: u32,
    pub seed: RngSeed,
    pub points: Vec<TrajectoryPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    /// Students in config order, each with runs in index order.
    pub students: Vec<(StudentLabel, Vec<Trajectory>)>,
}

impl SimulationResult {
    pub fn runs_for(&self, label: StudentLabel) -> Option<&[Trajectory]> {
        self.students.iter().find(|(l, _)| *l == label).map(|(_, t)| t.as_slice())
    }

    pub fn trajectories(&self) -> impl Iterator<Item = &Trajectory> {
        self.students.iter().flat_map(|(_, t)| t)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Content(#[from] VocabError),
    #[error("{student} run {run}: {source}")]
    Session { student: StudentLabel, run: u32, source: SessionError },
    #[error("{student} run {run} panicked: {message}")]
    Panicked { student: StudentLabel, run: u32, message: String },
}

/// The configured lexicon (or the bundled one), with synonyms built when
/// an embedding file is configured.
pub fn prepare_lexicon(config: &SimulationConfig) -> Result<Lexicon, VocabError> {
    let mut lexicon = match &config.lexicon {
        Some(path) => Lexicon::from_path(path)?,
        None => Lexicon::bundled(),
    };
    if let Some(path) = &config.embeddings {
        let index = EmbeddingIndex::from_path(path)?;
        lexicon.build_synonyms(&index, DEFAULT_SYNONYM_COUNT)?;
    }
    lexicon.require_full_coverage()?;
    Ok(lexicon)
}

/// Drive one fresh session for `interactions` steps against `student`.
///
/// Each step draws, in order: the level action, the word, the answer.
pub fn run_single(
    student: &SimulatedStudent,
    lexicon: &Lexicon,
    params: &TutorParams,
    interactions: u32,
    seed: RngSeed,
) -> Result<Vec<TrajectoryPoint>, SessionError> {
    let mut rng = session_rng(seed);
    let mut session = SessionState::new(student.label.as_str());
    let mut points = Vec::with_capacity(interactions as usize);
    for _ in 0..interactions {
        let p = next_item(&session, lexicon, params, &mut rng)?;
        let correct = student.simulate_answer(p.level_after.index() as f64, &mut rng);
        let rec = record_outcome(&mut session, &p, correct, params)?;
        points.push(TrajectoryPoint {
            interaction: rec.index,
            level: rec.level_after,
            reward: rec.reward,
            cumulative_reward: 0,
            word: rec.word.clone(),
            correct,
        });
        points.last_mut().expect("pushed").cumulative_reward = session.cumulative_reward;
    }
    Ok(points)
}

/// Run every (student, run) pair. Runs execute in parallel; results are
/// ordered by config student order then run index.
pub fn run_simulation(config: &SimulationConfig, lexicon: &Lexicon) -> Result<SimulationResult, SimError> {
    let params = config.tutor_params();
    let jobs: Vec<(SimulatedStudent, u32)> =
        config.students.iter().flat_map(|s| (0..config.runs).map(move |r| (*s, r))).collect();

    let results: Vec<Result<Trajectory, SimError>> = jobs
        .par_iter()
        .map(|&(student, run)| {
            let seed = derive_seed(config.base_seed, student.label.as_str(), run);
            let outcome = catch_unwind(AssertUnwindSafe(|| {
                run_single(&student, lexicon, &params, config.interactions, seed)
            }));
            match outcome {
                Ok(Ok(points)) => Ok(Trajectory { student: student.label, run, seed, points }),
                Ok(Err(source)) => Err(SimError::Session { student: student.label, run, source }),
                Err(panic) => Err(SimError::Panicked { student: student.label, run, message: panic_message(&panic) }),
            }
        })
        .collect();

    let mut students: Vec<(StudentLabel, Vec<Trajectory>)> =
        config.students.iter().map(|s| (s.label, Vec::with_capacity(config.runs as usize))).collect();
    for (slot, result) in results.into_iter().enumerate() {
        let idx = slot / config.runs as usize;
        students[idx].1.push(result?);
    }
    Ok(SimulationResult { students })
}

fn panic_message(panic: &Box<dyn std::any::Any + Send>) -> String {
    panic
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| panic.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}
