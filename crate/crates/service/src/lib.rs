//! HTTP/WebSocket sessions around a single graph drawing: load, edit,
//! lay out, refine, undo and export, each answered with a fresh ply report.

use std::collections::{HashMap, VecDeque};
use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex as StdMutex};

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::{broadcast, Mutex};
use tokio::task::JoinHandle;

use plysweep::io::{read_any, write_gml, GraphJson};
use plysweep::layout::{
    circular_fallback, equal_edge_mode, layout, Algorithm, LayoutConfig, MinimizeResult, RefineConfig, Refiner,
    TrajectoryPoint,
};
use plysweep::sweep::compute_ply;
use plysweep::verify::empty_ply;
use plysweep::{derive_disks, Drawing, Graph, PlyDisk, PlyReport, Point};

pub const UNDO_DEPTH: usize = 64;
pub const DEFAULT_ADDR: &str = "127.0.0.1:7878";

#[derive(Debug)]
pub struct ApiError(StatusCode, String);

impl ApiError {
    fn new(code: StatusCode, msg: impl Into<String>) -> Self {
        Self(code, msg.into())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

struct RefineRun {
    cancel: Arc<AtomicBool>,
    handle: JoinHandle<()>,
}

struct Session {
    graph: Arc<Graph>,
    drawing: Drawing,
    report: PlyReport,
    undo: VecDeque<(Drawing, PlyReport)>,
    refine: Option<RefineRun>,
    events: broadcast::Sender<String>,
}

impl Session {
    fn new(graph: Graph, drawing: Drawing) -> Self {
        let report = compute_ply(&graph, &drawing).expect("drawing validated on load");
        Self {
            graph: Arc::new(graph),
            drawing,
            report,
            undo: VecDeque::new(),
            refine: None,
            events: broadcast::channel(256).0,
        }
    }

    fn disks(&self) -> Vec<PlyDisk> {
        derive_disks(&self.graph, &self.drawing).expect("session drawing matches graph")
    }

    fn push_undo(&mut self) {
        if self.undo.len() == UNDO_DEPTH {
            self.undo.pop_front();
        }
        self.undo.push_back((self.drawing.clone(), self.report.clone()));
    }

    /// Replaces the drawing (undoably) and recomputes the report.
    fn replace(&mut self, drawing: Drawing) {
        self.push_undo();
        self.report = compute_ply(&self.graph, &drawing).expect("drawing matches graph");
        self.drawing = drawing;
    }

    fn state(&self) -> Value {
        json!({
            "report": self.report,
            "disks": self.disks(),
            "undo_depth": self.undo.len(),
            "refining": self.refine.is_some(),
        })
    }

    fn busy(&self) -> ApiResult<()> {
        if self.refine.is_some() {
            Err(ApiError::new(StatusCode::CONFLICT, "refinement running"))
        } else {
            Ok(())
        }
    }

    fn broadcast(&self, msg: &StreamMessage) {
        let _ = self.events.send(serde_json::to_string(msg).expect("serializable"));
    }
}

/// One WebSocket frame: `{"iteration":k,"ply":p,"moved":[[vid,x,y],..]}`
/// plus what kind of change produced it.
#[derive(Debug, Serialize, Deserialize)]
pub struct StreamMessage {
    pub kind: String,
    pub iteration: u64,
    pub ply: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_ply: Option<usize>,
    pub moved: Vec<(usize, f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<RefineSummary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefineSummary {
    pub ply: usize,
    pub fallback: bool,
    pub cancelled: bool,
    pub iterations: u64,
    pub trajectory: Vec<TrajectoryPoint>,
}

fn moved(from: &Drawing, to: &Drawing) -> Vec<(usize, f64, f64)> {
    to.positions()
        .iter()
        .enumerate()
        .filter(|&(v, p)| from.positions().get(v) != Some(p))
        .map(|(v, p)| (v, p.x, p.y))
        .collect()
}

#[derive(Default)]
pub struct AppState {
    sessions: StdMutex<HashMap<String, Arc<Mutex<Session>>>>,
    next: AtomicU64,
}

type Shared = Arc<AppState>;

impl AppState {
    fn get(&self, id: &str) -> ApiResult<Arc<Mutex<Session>>> {
        self.sessions
            .lock()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session {id}")))
    }
}

pub fn router() -> Router {
    Router::new()
        .route("/session", post(load))
        .route("/session/{id}", get(show))
        .route("/session/{id}/vertex/{vid}", post(move_vertex))
        .route("/session/{id}/layout", post(relayout))
        .route("/session/{id}/refine", post(refine).delete(cancel))
        .route("/session/{id}/undo", post(undo))
        .route("/session/{id}/export", get(export))
        .route("/session/{id}/emptyply", get(emptyply))
        .route("/session/{id}/ws", get(ws))
        .with_state(Arc::new(AppState::default()))
}

pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router()).await
}

async fn load(State(app): State<Shared>, body: Bytes) -> ApiResult<Json<Value>> {
    let loaded = read_any(&body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let auto_layout = loaded.drawing.is_none();
    let drawing = match loaded.drawing {
        Some(d) => d,
        None => layout(&loaded.graph, &LayoutConfig::default()),
    };
    let session = Session::new(loaded.graph, drawing);
    let id = format!("{:x}", app.next.fetch_add(1, Ordering::Relaxed) + 1);
    let mut body = session.state();
    body["id"] = json!(id);
    body["graph"] = json!(GraphJson::new(&session.graph, &session.drawing));
    body["original_ids"] = json!(loaded.original_ids);
    body["warnings"] = json!(loaded.warnings);
    body["auto_layout"] = json!(auto_layout);
    app.sessions.lock().expect("session map poisoned").insert(id, Arc::new(Mutex::new(session)));
    Ok(Json(body))
}

async fn show(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = app.get(&id)?;
    let s = s.lock().await;
    let mut body = s.state();
    body["id"] = json!(id);
    body["graph"] = json!(GraphJson::new(&s.graph, &s.drawing));
    Ok(Json(body))
}

/// Accepts numbers or numeric strings so that NaN and infinities can be
/// named and rejected explicitly.
fn coordinate(v: &Value, name: &str) -> ApiResult<f64> {
    let x = match v.get(name) {
        Some(Value::Number(n)) => n.as_f64(),
        Some(Value::String(s)) => s.trim().parse::<f64>().ok(),
        _ => None,
    };
    match x {
        Some(x) if x.is_finite() => Ok(x),
        Some(_) => Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, format!("{name} is not finite"))),
        None => Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, format!("{name} missing or not a number"))),
    }
}

fn json_body(body: &Bytes) -> ApiResult<Value> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(json!({}));
    }
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("bad JSON: {e}")))
}

async fn move_vertex(
    State(app): State<Shared>,
    Path((id, vid)): Path<(String, usize)>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let s = app.get(&id)?;
    let mut s = s.lock().await;
    if vid >= s.graph.vertex_count() {
        return Err(ApiError::new(StatusCode::NOT_FOUND, format!("no vertex {vid}")));
    }
    let body = json_body(&body)?;
    let p = Point::new(coordinate(&body, "x")?, coordinate(&body, "y")?);
    s.busy()?;
    let mut d = s.drawing.clone();
    d.set_position(vid, p);
    s.replace(d);
    s.broadcast(&StreamMessage {
        kind: "edit".into(),
        iteration: 0,
        ply: s.report.ply,
        best_ply: None,
        moved: vec![(vid, p.x, p.y)],
        result: None,
    });
    Ok(Json(s.state()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutRequest {
    #[serde(default)]
    algorithm: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    config: Option<Value>,
}

async fn relayout(State(app): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<Value>> {
    let s = app.get(&id)?;
    let req: LayoutRequest = serde_json::from_value(json_body(&body)?)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    let mut cfg: LayoutConfig = match req.config {
        Some(c) => {
            serde_json::from_value(c).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?
        }
        None => LayoutConfig::default(),
    };
    if let Some(a) = req.algorithm {
        cfg.algorithm = a.parse::<Algorithm>().map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e))?;
    }
    if let Some(seed) = req.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e))?;
    let mut s = s.lock().await;
    s.busy()?;
    let d = layout(&s.graph, &cfg);
    let delta = moved(&s.drawing, &d);
    s.replace(d);
    s.broadcast(&StreamMessage {
        kind: "layout".into(),
        iteration: 0,
        ply: s.report.ply,
        best_ply: None,
        moved: delta,
        result: None,
    });
    Ok(Json(s.state()))
}

async fn undo(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = app.get(&id)?;
    let mut s = s.lock().await;
    s.busy()?;
    let Some((d, r)) = s.undo.pop_back() else {
        return Err(ApiError::new(StatusCode::CONFLICT, "nothing to undo"));
    };
    let delta = moved(&s.drawing, &d);
    s.drawing = d;
    s.report = r;
    s.broadcast(&StreamMessage {
        kind: "undo".into(),
        iteration: 0,
        ply: s.report.ply,
        best_ply: None,
        moved: delta,
        result: None,
    });
    Ok(Json(s.state()))
}

async fn export(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let s = app.get(&id)?;
    let s = s.lock().await;
    let text = write_gml(&s.graph, &s.drawing).expect("drawing matches graph");
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

async fn emptyply(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = app.get(&id)?;
    let s = s.lock().await;
    let verdict = empty_ply(&s.graph, &s.drawing).expect("drawing matches graph");
    Ok(Json(json!(verdict)))
}

async fn refine(
    State(app): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let session = app.get(&id)?;
    let cfg: RefineConfig = serde_json::from_value(json_body(&body)?)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    cfg.validate().map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e))?;
    let mut s = session.lock().await;
    s.busy()?;
    let cancel = Arc::new(AtomicBool::new(false));
    let graph = s.graph.clone();
    let start = s.drawing.clone();
    let events = s.events.clone();
    let flag = cancel.clone();
    let target = session.clone();
    let handle = tokio::task::spawn_blocking(move || {
        run_refinement(&graph, start, cfg, &flag, &events, &target);
    });
    s.refine = Some(RefineRun { cancel, handle });
    Ok((StatusCode::ACCEPTED, Json(json!({ "started": true }))))
}

/// Steps the refiner one evaluation period at a time, streaming each
/// evaluation, then installs the best drawing in the session.
fn run_refinement(
    graph: &Graph,
    start: Drawing,
    cfg: RefineConfig,
    cancel: &AtomicBool,
    events: &broadcast::Sender<String>,
    session: &Arc<Mutex<Session>>,
) {
    let begin = std::time::Instant::now();
    let budget_done = |it: u64| match cfg.iterations {
        Some(max) => it >= max,
        None => begin.elapsed().as_millis() as u64 >= cfg.budget_ms,
    };
    if cfg.equal_edge {
        let result = equal_edge_mode(graph, &start, &cfg);
        return install(result, false, session);
    }
    let mut last = start.clone();
    let mut refiner = Refiner::new(graph, start.clone(), cfg.clone());
    let mut cancelled = false;
    while graph.vertex_count() > 1 && !budget_done(refiner.iteration()) {
        if cancel.load(Ordering::Relaxed) {
            cancelled = true;
            break;
        }
        if let Some(ev) = refiner.step() {
            let cur = refiner.current().clone();
            let msg = StreamMessage {
                kind: "refine".into(),
                iteration: ev.iteration,
                ply: ev.ply,
                best_ply: Some(refiner.best().1.ply),
                moved: moved(&last, &cur),
                result: None,
            };
            last = cur;
            let _ = events.send(serde_json::to_string(&msg).expect("serializable"));
        }
    }
    let mut result = refiner.finish();
    if !cancelled {
        circular_fallback(graph, &LayoutConfig::default(), &mut result);
    }
    install(result, cancelled, session);
}

fn install(result: MinimizeResult, cancelled: bool, session: &Arc<Mutex<Session>>) {
    let mut s = session.blocking_lock();
    let summary = RefineSummary {
        ply: result.ply,
        fallback: result.fallback,
        cancelled,
        iterations: result.iterations,
        trajectory: result.trajectory.clone(),
    };
    let delta = moved(&s.drawing, &result.drawing);
    if result.drawing != s.drawing {
        s.push_undo();
        s.drawing = result.drawing;
        s.report = result.report;
    }
    s.refine = None;
    s.broadcast(&StreamMessage {
        kind: "done".into(),
        iteration: result.iterations,
        ply: s.report.ply,
        best_ply: Some(s.report.ply),
        moved: delta,
        result: Some(summary),
    });
}

/// Stops a running refinement and waits until its best drawing is in
/// place.
async fn cancel(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let session = app.get(&id)?;
    let run = session.lock().await.refine.take();
    let was_running = run.is_some();
    if let Some(run) = run {
        run.cancel.store(true, Ordering::Relaxed);
        let _ = run.handle.await;
    }
    let s = session.lock().await;
    let mut body = s.state();
    body["cancelled"] = json!(was_running);
    Ok(Json(body))
}

async fn ws(State(app): State<Shared>, Path(id): Path<String>, upgrade: WebSocketUpgrade) -> ApiResult<Response> {
    let session = app.get(&id)?;
    Ok(upgrade.on_upgrade(move |socket| stream(socket, session)))
}

/// Sends a snapshot of the whole drawing, then every session event.
async fn stream(mut socket: WebSocket, session: Arc<Mutex<Session>>) {
    let (snapshot, mut rx) = {
        let s = session.lock().await;
        let msg = StreamMessage {
            kind: "snapshot".into(),
            iteration: 0,
            ply: s.report.ply,
            best_ply: None,
            moved: moved(&Drawing::default(), &s.drawing),
            result: None,
        };
        (serde_json::to_string(&msg).expect("serializable"), s.events.subscribe())
    };
    if socket.send(Message::Text(snapshot.into())).await.is_err() {
        return;
    }
    loop {
        tokio::select! {
            ev = rx.recv() => match ev {
                Ok(text) => {
                    if socket.send(Message::Text(text.into())).await.is_err() {
                        return;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => return,
            },
            incoming = socket.recv() => match incoming {
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                _ => {}
            },
        }
    }
}
