//! Python bindings: `import qtutor`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use qtutor_core::sim::{run_simulation as run_sim, SimulationConfig};
use qtutor_core::vocab::DEFAULT_SYNONYM_COUNT;
use qtutor_core::{
    derive_seed as derive, next_item, record_outcome, session_rng, CefrLevel, EmbeddingIndex, Lexicon,
    Presentation, RngSeed, SessionRng, SessionState, StudentLabel, TutorParams,
};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn bundled_lexicon() -> PyResult<Lexicon> {
    let mut lexicon = Lexicon::bundled();
    lexicon.build_synonyms(&EmbeddingIndex::bundled(), DEFAULT_SYNONYM_COUNT).map_err(value_err)?;
    Ok(lexicon)
}

fn parse_level(label: &str) -> PyResult<CefrLevel> {
    label.parse().map_err(value_err)
}

#[pyclass(name = "SimulatedStudent", module = "qtutor", frozen)]
struct PyStudent {
    inner: qtutor_core::SimulatedStudent,
}

#[pymethods]
impl PyStudent {
    #[new]
    #[pyo3(signature = (label, proficiency=None, b=None, c=None))]
    fn new(label: &str, proficiency: Option<f64>, b: Option<f64>, c: Option<f64>) -> PyResult<Self> {
        let label: StudentLabel = label.parse().map_err(value_err)?;
        let preset = qtutor_core::SimulatedStudent::preset(label);
        let inner = qtutor_core::SimulatedStudent::new(
            label,
            proficiency.unwrap_or(preset.proficiency),
            b.unwrap_or(preset.b),
            c.unwrap_or(preset.c),
        )
        .map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn label(&self) -> &'static str {
        self.inner.label.as_str()
    }

    #[getter]
    fn proficiency(&self) -> f64 {
        self.inner.proficiency
    }

    /// Probability of a correct answer to an item at `level` (0 = A1 .. 5 = C2).
    fn success_probability(&self, level: f64) -> f64 {
        self.inner.success_probability(level)
    }

    fn __repr__(&self) -> String {
        format!("SimulatedStudent({:?}, proficiency={})", self.inner.label.as_str(), self.inner.proficiency)
    }
}

/// One tutoring session over the bundled vocabulary.
#[pyclass(name = "Tutor", module = "qtutor")]
struct PyTutor {
    lexicon: Lexicon,
    params: TutorParams,
    session: SessionState,
    rng: SessionRng,
    pending: Option<Presentation>,
}

impl PyTutor {
    fn pending(&mut self) -> PyResult<Presentation> {
        if self.pending.is_none() {
            let p = next_item(&self.session, &self.lexicon, &self.params, &mut self.rng).map_err(value_err)?;
            self.pending = Some(p);
        }
        Ok(self.pending.clone().expect("set above"))
    }

    fn commit<'py>(&mut self, py: Python<'py>, correct: bool) -> PyResult<Bound<'py, PyDict>> {
        let p = self.pending.take().ok_or_else(|| PyRuntimeError::new_err("no question pending"))?;
        let rec = record_outcome(&mut self.session, &p, correct, &self.params).map_err(value_err)?;
        let d = PyDict::new(py);
        d.set_item("index", rec.index)?;
        d.set_item("word", &rec.word)?;
        d.set_item("correct", rec.correct)?;
        d.set_item("reward", rec.reward.value())?;
        d.set_item("level_before", rec.level_before.label())?;
        d.set_item("level_after", rec.level_after.label())?;
        d.set_item("cumulative_reward", self.session.cumulative_reward)?;
        Ok(d)
    }
}

#[pymethods]
impl PyTutor {
    #[new]
    #[pyo3(signature = (seed=2019, student_id="student"))]
    fn new(seed: u64, student_id: &str) -> PyResult<Self> {
        Ok(Self {
            lexicon: bundled_lexicon()?,
            params: TutorParams::default(),
            session: SessionState::new(student_id),
            rng: session_rng(RngSeed(seed)),
            pending: None,
        })
    }

    /// The current question. Repeated calls return the same question until it is answered.
    fn next_item<'py>(&mut self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let p = self.pending()?;
        let item = self.lexicon.get(&p.word).ok_or_else(|| PyRuntimeError::new_err("word missing from lexicon"))?;
        let d = PyDict::new(py);
        d.set_item("index", p.index)?;
        d.set_item("word", &p.word)?;
        d.set_item("image_ref", &item.image_ref)?;
        d.set_item("level", p.level_after.label())?;
        d.set_item("level_action", format!("{:?}", p.level_action).to_lowercase())?;
        Ok(d)
    }

    /// Record whether the pending question was answered correctly.
    fn record_outcome<'py>(&mut self, py: Python<'py>, correct: bool) -> PyResult<Bound<'py, PyDict>> {
        self.commit(py, correct)
    }

    /// Grade a typed answer against the pending question and record it.
    fn answer<'py>(&mut self, py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
        let p = self.pending.as_ref().ok_or_else(|| PyRuntimeError::new_err("no question pending"))?;
        let item = self.lexicon.get(&p.word).ok_or_else(|| PyRuntimeError::new_err("word missing from lexicon"))?;
        let correct = qtutor_core::validate_answer(text, item);
        self.commit(py, correct)
    }

    /// Ask a question and let `student` answer it, using this session's RNG.
    fn simulate_step<'py>(&mut self, py: Python<'py>, student: &PyStudent) -> PyResult<Bound<'py, PyDict>> {
        let p = self.pending()?;
        let correct = student.inner.simulate_answer(p.level_after.index() as f64, &mut self.rng);
        self.commit(py, correct)
    }

    #[getter]
    fn level(&self) -> &'static str {
        self.session.current_level.label()
    }

    #[getter]
    fn cumulative_reward(&self) -> i64 {
        self.session.cumulative_reward
    }

    #[getter]
    fn interaction_count(&self) -> u32 {
        self.session.interaction_count
    }

    /// "active" or "inactive".
    fn word_state(&self, word: &str) -> String {
        format!("{:?}", self.session.word_state(word)).to_lowercase()
    }

    fn level_q(&self, level: &str, action: &str) -> PyResult<f64> {
        let level = parse_level(level)?;
        let action = serde_json::from_value(serde_json::Value::String(action.to_string())).map_err(value_err)?;
        Ok(self.session.level_q.get(level, action))
    }

    /// Session state (tables and history) as JSON.
    fn state_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.session).map_err(value_err)
    }
}

/// Whether `response` matches `word` or one of `synonyms` after trimming and lowercasing.
#[pyfunction]
#[pyo3(signature = (response, word, synonyms=Vec::new()))]
fn validate_answer(response: &str, word: &str, synonyms: Vec<String>) -> bool {
    let item = qtutor_core::WordItem {
        word: word.to_string(),
        level: CefrLevel::A1,
        image_ref: String::new(),
        synonyms,
    };
    qtutor_core::validate_answer(response, &item)
}

/// Nearest words by cosine similarity in the bundled embeddings, or in a word2vec text file.
#[pyfunction]
#[pyo3(signature = (word, k=DEFAULT_SYNONYM_COUNT, embeddings=None))]
fn nearest_neighbors(word: &str, k: usize, embeddings: Option<std::path::PathBuf>) -> PyResult<Vec<(String, f64)>> {
    let index = match embeddings {
        Some(path) => EmbeddingIndex::from_path(path).map_err(value_err)?,
        None => EmbeddingIndex::bundled(),
    };
    index.nearest_neighbors(word, k).map_err(value_err)
}

type LexiconRow = (String, &'static str, String, Vec<String>);

/// Bundled lexicon as a list of (word, level, image_ref, synonyms).
#[pyfunction]
fn lexicon() -> PyResult<Vec<LexiconRow>> {
    Ok(bundled_lexicon()?
        .items()
        .iter()
        .map(|w| (w.word.clone(), w.level.label(), w.image_ref.clone(), w.synonyms.clone()))
        .collect())
}

#[pyfunction]
fn derive_seed(base_seed: u64, label: &str, run: u32) -> u64 {
    derive(RngSeed(base_seed), label, run).0
}

/// Run the three default students. Returns {label: [[(level_index, cumulative_reward), ...] per run]}.
#[pyfunction]
#[pyo3(signature = (runs=20, interactions=100, base_seed=2019))]
fn run_simulation<'py>(py: Python<'py>, runs: u32, interactions: u32, base_seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let config = SimulationConfig { runs, interactions, base_seed: RngSeed(base_seed), ..SimulationConfig::default() };
    config.validate().map_err(value_err)?;
    let result = run_sim(&config, &bundled_lexicon()?).map_err(value_err)?;
    let out = PyDict::new(py);
    for (label, trajectories) in &result.students {
        let runs: Vec<Vec<(u8, i64)>> = trajectories
            .iter()
            .map(|t| t.points.iter().map(|p| (p.level.index(), p.cumulative_reward)).collect())
            .collect();
        out.set_item(label.as_str(), runs)?;
    }
    Ok(out)
}

#[pymodule]
fn qtutor(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStudent>()?;
    m.add_class::<PyTutor>()?;
    m.add_function(wrap_pyfunction!(validate_answer, m)?)?;
    m.add_function(wrap_pyfunction!(nearest_neighbors, m)?)?;
    m.add_function(wrap_pyfunction!(lexicon, m)?)?;
    m.add_function(wrap_pyfunction!(derive_seed, m)?)?;
    m.add_function(wrap_pyfunction!(run_simulation, m)?)?;
    Ok(())
}
