use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use qtutor_core::{
    next_item, record_outcome, session_rng, validate_answer, CefrLevel, InteractionRecord, Lexicon, RngSeed,
    SessionError, SessionState, TutorParams,
};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::error::ApiError;
use crate::store::{SessionEnvelope, SessionStore};

pub struct AppState {
    store: SessionStore,
    lexicon: Arc<Lexicon>,
    params: TutorParams,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

impl AppState {
    pub fn new(store: SessionStore, lexicon: Lexicon, params: TutorParams) -> Self {
        Self { store, lexicon: Arc::new(lexicon), params, locks: Mutex::new(HashMap::new()) }
    }

    pub fn store(&self) -> &SessionStore {
        &self.store
    }

    fn lock_for(&self, id: &str) -> Arc<tokio::sync::Mutex<()>> {
        let mut locks = self.locks.lock().expect("lock table poisoned");
        locks.entry(id.to_string()).or_default().clone()
    }

    fn load(&self, id: &str) -> Result<SessionEnvelope, ApiError> {
        self.store.load(id)?.ok_or_else(|| ApiError::unknown_session(id))
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSessionRequest {
    pub student_label: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CreateSessionResponse {
    pub session_id: String,
    pub seed: u64,
    pub level_label: CefrLevel,
    pub created_at: DateTime<Utc>,
}

/// A question as sent to the client. Never includes the target word.
#[derive(Debug, Serialize, Deserialize)]
pub struct QuestionResponse {
    pub question_id: String,
    pub image_ref: String,
    pub level_label: CefrLevel,
    pub interaction_index: u32,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AnswerRequest {
    pub question_id: String,
    pub text: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AnswerResponse {
    pub correct: bool,
    /// Set when the target word and its synonyms are revealed (wrong answers).
    pub accepted_answers_shown: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepted_answers: Option<Vec<String>>,
    pub level_label: CefrLevel,
    pub cumulative_reward: i64,
    pub interaction_index: u32,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HistoryResponse {
    pub session_id: String,
    pub current_level: CefrLevel,
    pub cumulative_reward: i64,
    pub interaction_count: u32,
    pub history: Vec<InteractionRecord>,
}

fn question_id(index: u32) -> String {
    format!("q{index}")
}

/// Routes under `/v1/`, plus static files from `static_dir` when given.
pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/v1/healthz", get(healthz))
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}/next", get(get_next))
        .route("/v1/sessions/{id}/answer", post(submit_answer))
        .route("/v1/sessions/{id}/history", get(get_history))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

async fn healthz() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<(StatusCode, Json<CreateSessionResponse>), ApiError> {
    let req: CreateSessionRequest = if body.iter().all(u8::is_ascii_whitespace) {
        CreateSessionRequest::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(e.to_string()))?
    };
    let seed = req.seed.unwrap_or_else(rand::random);
    let session_id = uuid::Uuid::new_v4().simple().to_string();
    let env = SessionEnvelope {
        session_id: session_id.clone(),
        created_at: Utc::now(),
        seed,
        rng: session_rng(RngSeed(seed)),
        session: SessionState::new(req.student_label.unwrap_or_else(|| session_id.clone())),
        pending: None,
    };
    state.store.save(&env)?;
    log::info!("created session {session_id}");
    Ok((
        StatusCode::CREATED,
        Json(CreateSessionResponse {
            session_id,
            seed,
            level_label: env.session.current_level,
            created_at: env.created_at,
        }),
    ))
}

fn question_for(state: &AppState, env: &SessionEnvelope) -> Result<QuestionResponse, ApiError> {
    let p = env.pending.as_ref().expect("pending question");
    let item = state
        .lexicon
        .get(&p.word)
        .ok_or_else(|| ApiError::internal("content_mismatch", "pending word missing from lexicon"))?;
    Ok(QuestionResponse {
        question_id: question_id(p.index),
        image_ref: item.image_ref.clone(),
        level_label: p.level_after,
        interaction_index: p.index,
    })
}

async fn get_next(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<QuestionResponse>, ApiError> {
    let lock = state.lock_for(&id);
    let _guard = lock.lock().await;
    let mut env = state.load(&id)?;
    if env.pending.is_none() {
        let p = next_item(&env.session, &state.lexicon, &state.params, &mut env.rng)
            .map_err(|e| ApiError::internal("tutor_failure", e.to_string()))?;
        env.pending = Some(p);
        state.store.save(&env)?;
    }
    Ok(Json(question_for(&state, &env)?))
}

async fn submit_answer(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<AnswerResponse>, ApiError> {
    let req: AnswerRequest = serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let lock = state.lock_for(&id);
    let _guard = lock.lock().await;
    let mut env = state.load(&id)?;
    let pending = match &env.pending {
        Some(p) if question_id(p.index) == req.question_id => p.clone(),
        Some(p) => {
            return Err(ApiError::conflict(format!(
                "question {} is not pending (pending: {})",
                req.question_id,
                question_id(p.index)
            )))
        }
        None => return Err(ApiError::conflict(format!("question {} is not pending", req.question_id))),
    };
    let item = state
        .lexicon
        .get(&pending.word)
        .ok_or_else(|| ApiError::internal("content_mismatch", "pending word missing from lexicon"))?
        .clone();
    let correct = validate_answer(&req.text, &item);
    record_outcome(&mut env.session, &pending, correct, &state.params).map_err(|e| match e {
        SessionError::Mismatch(m) => ApiError::conflict(m),
        other => ApiError::internal("tutor_failure", other.to_string()),
    })?;
    env.pending = None;
    state.store.save(&env)?;

    let mut accepted = vec![item.word.clone()];
    accepted.extend(item.synonyms.iter().cloned());
    Ok(Json(AnswerResponse {
        correct,
        accepted_answers_shown: !correct,
        target_word: (!correct).then(|| item.word.clone()),
        accepted_answers: (!correct).then_some(accepted),
        level_label: env.session.current_level,
        cumulative_reward: env.session.cumulative_reward,
        interaction_index: env.session.interaction_count,
    }))
}

async fn get_history(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<HistoryResponse>, ApiError> {
    let lock = state.lock_for(&id);
    let _guard = lock.lock().await;
    let env = state.load(&id)?;
    Ok(Json(HistoryResponse {
        session_id: env.session_id,
        current_level: env.session.current_level,
        cumulative_reward: env.session.cumulative_reward,
        interaction_count: env.session.interaction_count,
        history: env.session.history,
    }))
}
