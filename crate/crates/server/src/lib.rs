//! HTTP/JSON API over the pipeline engine, chart renderer and classroom sessions.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{FromRequest, Path, Request, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use cardpipe_core::activity::{
    AnswerPayload, GradeResult, Hint, ParticipantState, QuestionBank, ScoringPolicy, Session,
    SessionError, SessionEvent, SessionStore,
};
use cardpipe_core::chart::{render_svg, ChartSpec};
use cardpipe_core::error::ErrorCode;
use cardpipe_core::pipeline::{
    Engine, ExecutionTrace, Pipeline, StepValue, ValidationReport, VariableStore,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;
use tower_http::trace::TraceLayer;

/// Rows of each table sent over the wire.
pub const TRANSPORT_ROWS: usize = 100;

pub const DEFAULT_WIDTH: u32 = 800;
pub const DEFAULT_HEIGHT: u32 = 500;

#[derive(Debug, Clone, Default)]
pub struct ServerConfig {
    /// Built web client, served at `/` when present.
    pub ui_dir: Option<PathBuf>,
}

#[derive(Clone)]
pub struct AppState {
    engine: Arc<Engine>,
    sessions: Arc<SessionStore>,
}

impl AppState {
    pub fn new(engine: Arc<Engine>, sessions: Arc<SessionStore>) -> AppState {
        AppState { engine, sessions }
    }

    /// Builtin catalog, bundled datasets and question bank, sessions kept in memory.
    pub fn in_memory(policy: ScoringPolicy) -> AppState {
        let engine = Arc::new(Engine::default());
        let bank = Arc::new(QuestionBank::builtin().clone());
        let sessions = Arc::new(SessionStore::new(engine.clone(), bank, policy));
        AppState { engine, sessions }
    }
}

/// Error body: `{"code", "message", "step_index"?, "report"?}`.
#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ValidationReport>,
}

impl ApiError {
    fn new(status: StatusCode, code: impl Into<String>, message: impl Into<String>) -> ApiError {
        ApiError {
            status,
            code: code.into(),
            message: message.into(),
            step_index: None,
            report: None,
        }
    }

    fn bad_request(message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, "BAD_REQUEST", message)
    }

    fn not_found(message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, "NOT_FOUND", message)
    }

    fn invalid(report: ValidationReport) -> ApiError {
        let first = report.first().expect("invalid report has an error");
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            code: first.code.as_str().to_string(),
            message: first.message.clone(),
            step_index: Some(first.step_index),
            report: Some(report),
        }
    }

    fn runtime(step_index: usize, code: ErrorCode, message: String) -> ApiError {
        let status = match code {
            ErrorCode::FetchFailed | ErrorCode::LoadFailed => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError {
            status,
            code: code.as_str().to_string(),
            message,
            step_index: Some(step_index),
            report: None,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, axum::Json(&self)).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> ApiError {
        let message = e.to_string();
        match e {
            SessionError::UnknownSession(_) => {
                ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_SESSION", message)
            }
            SessionError::UnknownParticipant(_) => {
                ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_PARTICIPANT", message)
            }
            SessionError::UnknownQuestion(_) => {
                ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_QUESTION", message)
            }
            SessionError::EmptyParticipant => {
                ApiError::new(StatusCode::BAD_REQUEST, "EMPTY_PARTICIPANT", message)
            }
            SessionError::AlreadyAnswered { .. } => {
                ApiError::new(StatusCode::CONFLICT, "ALREADY_ANSWERED", message)
            }
            SessionError::NoHint => ApiError::new(StatusCode::NOT_FOUND, "NO_HINT", message),
            SessionError::Grade(_) => ApiError::new(StatusCode::BAD_REQUEST, "BAD_ANSWER", message),
            SessionError::Log(_) => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "SESSION_LOG", message)
            }
        }
    }
}

/// JSON body whose parse failures answer 400 with an `ApiError`.
struct Body<T>(T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for Body<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        match axum::Json::<T>::from_request(req, state).await {
            Ok(axum::Json(v)) => Ok(Body(v)),
            Err(rejection) => Err(ApiError::bad_request(rejection.body_text())),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn json_response(status: StatusCode, value: &impl Serialize) -> Response {
    (status, axum::Json(value)).into_response()
}

pub fn router(state: AppState, config: &ServerConfig) -> Router {
    let api = Router::new()
        .route("/cards", get(cards))
        .route("/datasets", get(datasets))
        .route("/questions", get(questions))
        .route("/questions/{id}", get(question))
        .route("/pipelines/validate", post(validate))
        .route("/pipelines/execute", post(execute))
        .route("/render", post(render))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_state))
        .route("/sessions/{id}/events", get(session_events))
        .route("/sessions/{id}/join", post(join))
        .route("/sessions/{id}/open", post(open_question))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/hint", post(hint))
        .fallback(|| async { ApiError::not_found("no such endpoint") });

    let mut app = Router::new()
        .nest("/api/v1", api)
        .route("/datasets/{file}", get(dataset_csv))
        .with_state(state);
    app = match &config.ui_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.fallback(|| async {
            ApiError::not_found("no web client is installed on this server")
        }),
    };
    app.layer(CorsLayer::permissive())
        .layer(TraceLayer::new_for_http())
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    app: Router,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await
}

/// Binds a random loopback port and serves in the background. Used by tests and tools.
pub async fn spawn_local(state: AppState, config: ServerConfig) -> std::io::Result<SocketAddr> {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    let app = router(state, &config);
    tokio::spawn(async move {
        let _ = axum::serve(listener, app).await;
    });
    Ok(addr)
}

async fn cards(State(s): State<AppState>) -> Response {
    (
        [(header::CONTENT_TYPE, "application/json")],
        s.engine.catalog().to_json(),
    )
        .into_response()
}

#[derive(Serialize)]
struct DatasetEntry<'a> {
    #[serde(flatten)]
    manifest: &'a cardpipe_core::datasets::DatasetManifest,
    url: String,
}

async fn datasets(State(s): State<AppState>) -> Response {
    let reg = s.engine.datasets();
    let list: Vec<DatasetEntry> = reg
        .list()
        .into_iter()
        .map(|m| DatasetEntry {
            manifest: m,
            url: reg.dataset_url(&m.id).unwrap_or_default(),
        })
        .collect();
    json_response(StatusCode::OK, &list)
}

async fn dataset_csv(State(s): State<AppState>, Path(file): Path<String>) -> ApiResult<Response> {
    let id = file
        .strip_suffix(".csv")
        .ok_or_else(|| ApiError::not_found(format!("`{file}` is not a CSV name")))?;
    let reg = s.engine.datasets();
    reg.manifest(id)
        .map_err(|e| ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_DATASET", e.to_string()))?;
    let bytes = reg.raw_bytes(id, s.engine.fetch_limits()).map_err(|e| {
        ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "FETCH_FAILED",
            e.to_string(),
        )
    })?;
    Ok((
        [(header::CONTENT_TYPE, "text/csv; charset=utf-8")],
        bytes.into_owned(),
    )
        .into_response())
}

async fn questions(State(s): State<AppState>) -> Response {
    let list: Vec<_> = s
        .sessions
        .bank()
        .questions
        .iter()
        .map(|q| q.redacted())
        .collect();
    json_response(StatusCode::OK, &list)
}

async fn question(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let q = s
        .sessions
        .bank()
        .get(&id)
        .ok_or(SessionError::UnknownQuestion(id))?;
    Ok(json_response(StatusCode::OK, &q.redacted()))
}

async fn validate(State(s): State<AppState>, Body(p): Body<Pipeline>) -> Response {
    json_response(StatusCode::OK, &s.engine.validate(&p, None))
}

/// Cuts every serialized table to the first rows, keeping `total_rows`.
pub fn truncate_tables(value: &mut Value, limit: usize) {
    match value {
        Value::Object(map) => {
            if map.contains_key("total_rows") && map.contains_key("columns") {
                let total = map["total_rows"].as_u64().unwrap_or(0) as usize;
                if let Some(Value::Array(columns)) = map.get_mut("columns") {
                    for c in columns {
                        if let Some(Value::Array(cells)) = c.get_mut("cells") {
                            cells.truncate(limit);
                        }
                    }
                }
                map.insert("truncated".into(), Value::Bool(total > limit));
                return;
            }
            map.values_mut().for_each(|v| truncate_tables(v, limit));
        }
        Value::Array(items) => items.iter_mut().for_each(|v| truncate_tables(v, limit)),
        _ => {}
    }
}

fn run(engine: &Engine, p: &Pipeline) -> ApiResult<ExecutionTrace> {
    engine
        .execute(p, &mut VariableStore::new())
        .map_err(ApiError::invalid)
}

/// Validation failures answer 422; runtime failures stay inside the trace.
async fn execute(State(s): State<AppState>, Body(p): Body<Pipeline>) -> ApiResult<Response> {
    let engine = s.engine.clone();
    let trace = tokio::task::spawn_blocking(move || run(&engine, &p))
        .await
        .map_err(|e| {
            ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", e.to_string())
        })??;
    let mut value = serde_json::to_value(&trace).expect("traces serialize");
    truncate_tables(&mut value, TRANSPORT_ROWS);
    Ok(json_response(StatusCode::OK, &value))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RenderRequest {
    #[serde(default)]
    pipeline: Option<Pipeline>,
    #[serde(default)]
    chart: Option<ChartSpec>,
    #[serde(default)]
    width: Option<u32>,
    #[serde(default)]
    height: Option<u32>,
}

fn chart_of(engine: &Engine, req: RenderRequest) -> ApiResult<(ChartSpec, u32, u32)> {
    let size = (
        req.width.unwrap_or(DEFAULT_WIDTH),
        req.height.unwrap_or(DEFAULT_HEIGHT),
    );
    let spec = match (req.pipeline, req.chart) {
        (Some(p), None) => {
            let trace = run(engine, &p)?;
            if let Some(e) = trace.error {
                return Err(ApiError::runtime(e.step_index, e.code, e.message));
            }
            match trace.final_output().map(|o| &o.value) {
                Some(StepValue::Chart(c)) => c.clone(),
                _ => {
                    let mut err = ApiError::new(
                        StatusCode::UNPROCESSABLE_ENTITY,
                        "NO_CHART",
                        "the pipeline does not end in a chart",
                    );
                    err.step_index = trace.steps.len().checked_sub(1);
                    return Err(err);
                }
            }
        }
        (None, Some(c)) => c,
        _ => {
            return Err(ApiError::bad_request(
                "send exactly one of `pipeline` or `chart`",
            ))
        }
    };
    Ok((spec, size.0, size.1))
}

async fn render(State(s): State<AppState>, Body(req): Body<RenderRequest>) -> ApiResult<Response> {
    let engine = s.engine.clone();
    let svg = tokio::task::spawn_blocking(move || {
        let (spec, w, h) = chart_of(&engine, req)?;
        render_svg(&spec, w, h).map_err(|e| {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.code.as_str(), e.message)
        })
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", e.to_string()))??;
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response())
}

#[derive(Serialize)]
struct ScoreRow<'a> {
    participant: &'a str,
    score: i64,
}

#[derive(Serialize)]
struct SessionView<'a> {
    id: &'a str,
    /// RFC 3339.
    created_at: String,
    policy: ScoringPolicy,
    roster: &'a [String],
    participants: &'a std::collections::BTreeMap<String, ParticipantState>,
    opened: Vec<&'a str>,
    scoreboard: Vec<ScoreRow<'a>>,
}

fn view(s: &Session) -> Value {
    let mut scoreboard: Vec<ScoreRow> = s
        .participants
        .iter()
        .map(|(p, st)| ScoreRow {
            participant: p,
            score: st.score,
        })
        .collect();
    scoreboard.sort_by(|a, b| b.score.cmp(&a.score).then(a.participant.cmp(b.participant)));
    let v = SessionView {
        id: &s.id,
        created_at: s.created_at.to_rfc3339(),
        policy: s.policy,
        roster: &s.roster,
        participants: &s.participants,
        opened: s.opened.keys().map(String::as_str).collect(),
        scoreboard,
    };
    serde_json::to_value(v).expect("sessions serialize")
}

async fn create_session(State(s): State<AppState>) -> ApiResult<Response> {
    let session = s.sessions.create()?;
    Ok(json_response(StatusCode::CREATED, &view(&session)))
}

async fn session_state(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(json_response(StatusCode::OK, &view(&s.sessions.get(&id)?)))
}

async fn session_events(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let session = s.sessions.get(&id)?;
    let events: &[SessionEvent] = session.events();
    Ok(json_response(StatusCode::OK, &events))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JoinRequest {
    participant: String,
}

async fn join(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Body(req): Body<JoinRequest>,
) -> ApiResult<Response> {
    let session = s.sessions.join(&id, &req.participant)?;
    Ok(json_response(StatusCode::OK, &view(&session)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OpenRequest {
    question: String,
}

async fn open_question(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Body(req): Body<OpenRequest>,
) -> ApiResult<Response> {
    let at = s.sessions.open_question(&id, &req.question)?;
    Ok(json_response(
        StatusCode::OK,
        &serde_json::json!({ "question": req.question, "opened_at": at.to_rfc3339() }),
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerRequest {
    participant: String,
    question: String,
    answer: AnswerPayload,
}

#[derive(Serialize)]
struct AnswerResponse {
    grade: GradeResult,
    score_delta: i64,
    score: i64,
}

async fn answer(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Body(req): Body<AnswerRequest>,
) -> ApiResult<Response> {
    let sessions = s.sessions.clone();
    let (grade, score_delta, score) = tokio::task::spawn_blocking(move || {
        sessions.submit(&id, &req.participant, &req.question, req.answer)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", e.to_string()))??;
    Ok(json_response(
        StatusCode::OK,
        &AnswerResponse {
            grade,
            score_delta,
            score,
        },
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HintRequest {
    participant: String,
    question: String,
}

#[derive(Serialize)]
struct HintResponse {
    hint: Option<Hint>,
    score_delta: i64,
    score: i64,
}

async fn hint(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Body(req): Body<HintRequest>,
) -> ApiResult<Response> {
    let out = match s
        .sessions
        .request_hint(&id, &req.participant, &req.question)?
    {
        Some((hint, score)) => HintResponse {
            hint: Some(hint),
            score_delta: -s.sessions.policy().hint_cost(),
            score,
        },
        None => {
            let score = s.sessions.get(&id)?.score(&req.participant)?;
            HintResponse {
                hint: None,
                score_delta: 0,
                score,
            }
        }
    };
    Ok(json_response(StatusCode::OK, &out))
}
