use std::path::Path;
use std::sync::Arc;

use axum::extract::{DefaultBodyLimit, FromRequest, FromRequestParts, Multipart, Request, State};
use axum::http::{header, HeaderMap, HeaderValue};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::services::ServeDir;
use tower_http::trace::TraceLayer;

use crate::chart::{chart, ChartQuery};
use crate::error::ServiceError;
use crate::workbench::{ApplyRequest, ExportFormat, Project, SelectionRequest, TrainRequest, Workbench, ALL_WELLS};

#[derive(Clone)]
pub struct AppState {
    pub bench: Arc<Workbench>,
    pub upload_cap: usize,
}

#[derive(FromRequest)]
#[from_request(via(axum::Json), rejection(ServiceError))]
struct Body<T>(T);

#[derive(FromRequestParts)]
#[from_request(via(axum::extract::Query), rejection(ServiceError))]
struct Params<T>(T);

#[derive(FromRequestParts)]
#[from_request(via(axum::extract::Path), rejection(ServiceError))]
struct Segments<T>(T);

type ApiResult = Result<Json<Value>, ServiceError>;

/// Runs workbench calls off the async executor; they touch the disk.
async fn blocking<T, F>(f: F) -> Result<T, ServiceError>
where
    T: Send + 'static,
    F: FnOnce() -> Result<T, ServiceError> + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ServiceError::Internal(e.to_string()))?
}

pub fn router(bench: Arc<Workbench>, upload_cap: usize, static_dir: Option<&Path>) -> Router {
    let state = AppState { bench, upload_cap };
    let api = Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/projects", post(create_project).get(list_projects))
        .route("/projects/{id}", get(get_project))
        .route("/projects/{id}/wells", post(upload).get(list_wells))
        .route("/projects/{id}/wells/{w}", get(get_well))
        .route("/projects/{id}/wells/{w}/data", get(well_data))
        .route("/projects/{id}/wells/{w}/rename", post(rename))
        .route("/projects/{id}/wells/{w}/limits", post(limits))
        .route("/projects/{id}/wells/{w}/select-curves", post(select_curves))
        .route("/projects/{id}/chart", get(get_chart))
        .route("/projects/{id}/selections", post(save_selection).get(list_selections))
        .route("/projects/{id}/selections/{s}", get(get_selection))
        .route("/projects/{id}/selections/{s}/apply", post(apply_selection))
        .route("/projects/{id}/undo/{w}", post(undo))
        .route("/projects/{id}/models", post(train).get(list_models))
        .route("/projects/{id}/models/{m}", get(get_model))
        .route("/projects/{id}/models/{m}/predict", post(run_predict))
        .route("/projects/{id}/export", get(export))
        .layer(DefaultBodyLimit::max(upload_cap))
        .layer(TraceLayer::new_for_http())
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir).append_index_html_on_directories(true)),
        None => api,
    }
}

fn well_response(p: &Project, id: &str) -> ApiResult {
    Ok(Json(json!({ "revision": p.revision, "well": p.well_info(id)? })))
}

#[derive(Deserialize)]
struct NewProject {
    name: String,
}

async fn create_project(State(app): State<AppState>, Body(req): Body<NewProject>) -> ApiResult {
    let p = blocking(move || app.bench.create_project(&req.name)).await?;
    Ok(Json(json!(p.summary())))
}

async fn list_projects(State(app): State<AppState>) -> ApiResult {
    Ok(Json(json!({ "projects": app.bench.list() })))
}

async fn get_project(State(app): State<AppState>, Segments(id): Segments<String>) -> ApiResult {
    Ok(Json(json!(app.bench.snapshot(&id)?.summary())))
}

async fn list_wells(State(app): State<AppState>, Segments(id): Segments<String>) -> ApiResult {
    let p = app.bench.snapshot(&id)?;
    Ok(Json(json!({ "revision": p.revision, "wells": p.well_infos() })))
}

async fn get_well(State(app): State<AppState>, Segments((id, w)): Segments<(String, String)>) -> ApiResult {
    let p = app.bench.snapshot(&id)?;
    let wid = p.well_id(&w)?;
    well_response(&p, &wid)
}

#[derive(Deserialize)]
struct DataQuery {
    curves: Option<String>,
}

async fn well_data(
    State(app): State<AppState>,
    Segments((id, w)): Segments<(String, String)>,
    Params(q): Params<DataQuery>,
) -> ApiResult {
    let p = app.bench.snapshot(&id)?;
    let (wid, ds) = p.well(&w)?;
    let wanted: Vec<String> = match q.curves.as_deref() {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => ds.curve_names().map(str::to_string).collect(),
    };
    let mut curves = Vec::with_capacity(wanted.len());
    for name in &wanted {
        let c = ds.curve(name)?;
        curves.push(json!({ "name": name, "unit": c.unit, "values": c.values() }));
    }
    Ok(Json(json!({
        "revision": p.revision,
        "well": wid,
        "name": ds.well(),
        "depth_name": ds.depth_name(),
        "depth_unit": ds.depth_unit(),
        "depth": ds.depth(),
        "curves": curves,
    })))
}

#[derive(Deserialize)]
struct UploadQuery {
    filename: Option<String>,
}

fn multipart_error(cap: usize) -> impl Fn(axum::extract::multipart::MultipartError) -> ServiceError {
    move |e| {
        if e.status() == axum::http::StatusCode::PAYLOAD_TOO_LARGE {
            ServiceError::PayloadTooLarge { cap }
        } else {
            ServiceError::BadRequest(e.body_text())
        }
    }
}

/// Accepts `multipart/form-data` (every part with a file name, or named
/// `file`) or a raw LAS body with an optional `?filename=`.
async fn upload(
    State(app): State<AppState>,
    Segments(id): Segments<String>,
    Params(q): Params<UploadQuery>,
    headers: HeaderMap,
    req: Request,
) -> ApiResult {
    let cap = app.upload_cap;
    let declared = headers
        .get(header::CONTENT_LENGTH)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.parse::<usize>().ok());
    if declared.is_some_and(|n| n > cap) {
        return Err(ServiceError::PayloadTooLarge { cap });
    }
    app.bench.snapshot(&id)?;
    let is_multipart = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("multipart/form-data"));
    let mut files = Vec::new();
    if is_multipart {
        let mut form = Multipart::from_request(req, &()).await?;
        while let Some(field) = form.next_field().await.map_err(multipart_error(cap))? {
            let file_name = field.file_name().map(str::to_string);
            if file_name.is_none() && field.name() != Some("file") {
                continue;
            }
            let bytes = field.bytes().await.map_err(multipart_error(cap))?;
            files.push((file_name, bytes.to_vec()));
        }
    } else {
        let bytes = axum::body::to_bytes(req.into_body(), cap)
            .await
            .map_err(|_| ServiceError::PayloadTooLarge { cap })?;
        files.push((q.filename, bytes.to_vec()));
    }
    let bench = app.bench.clone();
    let (p, ids) = blocking(move || bench.upload(&id, files)).await?;
    let wells = ids.iter().map(|w| p.well_info(w)).collect::<Result<Vec<_>, _>>()?;
    Ok(Json(json!({ "revision": p.revision, "wells": wells })))
}

impl From<axum::extract::multipart::MultipartRejection> for ServiceError {
    fn from(r: axum::extract::multipart::MultipartRejection) -> Self {
        ServiceError::BadRequest(r.body_text())
    }
}

#[derive(Deserialize)]
struct RenameRequest {
    old: String,
    new: String,
}

async fn rename(
    State(app): State<AppState>,
    Segments((id, w)): Segments<(String, String)>,
    Body(req): Body<RenameRequest>,
) -> ApiResult {
    let (p, wid) = blocking(move || app.bench.rename(&id, &w, &req.old, &req.new)).await?;
    well_response(&p, &wid)
}

#[derive(Deserialize)]
struct LimitsRequest {
    curve: String,
    lo: f64,
    hi: f64,
}

async fn limits(
    State(app): State<AppState>,
    Segments((id, w)): Segments<(String, String)>,
    Body(req): Body<LimitsRequest>,
) -> ApiResult {
    let (p, wid, clipped) = blocking(move || app.bench.limits(&id, &w, &req.curve, req.lo, req.hi)).await?;
    Ok(Json(json!({ "revision": p.revision, "masked": clipped, "well": p.well_info(&wid)? })))
}

#[derive(Deserialize)]
struct SelectCurvesRequest {
    curves: Vec<String>,
}

async fn select_curves(
    State(app): State<AppState>,
    Segments((id, w)): Segments<(String, String)>,
    Body(req): Body<SelectCurvesRequest>,
) -> ApiResult {
    let (p, wid) = blocking(move || app.bench.select_curves(&id, &w, &req.curves)).await?;
    well_response(&p, &wid)
}

async fn get_chart(
    State(app): State<AppState>,
    Segments(id): Segments<String>,
    Params(q): Params<ChartQuery>,
) -> ApiResult {
    let p = app.bench.snapshot(&id)?;
    Ok(Json(blocking(move || chart(&p, &q)).await?))
}

async fn save_selection(
    State(app): State<AppState>,
    Segments(id): Segments<String>,
    Body(req): Body<SelectionRequest>,
) -> ApiResult {
    let (p, stored) = blocking(move || app.bench.save_selection(&id, req)).await?;
    Ok(Json(json!({ "revision": p.revision, "well": stored.well_id, "selection": stored.selection })))
}

async fn list_selections(State(app): State<AppState>, Segments(id): Segments<String>) -> ApiResult {
    let p = app.bench.snapshot(&id)?;
    let list: Vec<Value> = p
        .selections
        .values()
        .map(|s| json!({ "well": s.well_id, "selection": s.selection }))
        .collect();
    Ok(Json(json!({ "revision": p.revision, "selections": list })))
}

async fn get_selection(State(app): State<AppState>, Segments((id, s)): Segments<(String, String)>) -> ApiResult {
    let p = app.bench.snapshot(&id)?;
    let stored = p.selection(&s)?;
    Ok(Json(json!({ "revision": p.revision, "well": stored.well_id, "selection": stored.selection })))
}

async fn apply_selection(
    State(app): State<AppState>,
    Segments((id, s)): Segments<(String, String)>,
    body: axum::body::Bytes,
) -> ApiResult {
    let req: ApplyRequest = if body.iter().all(u8::is_ascii_whitespace) {
        ApplyRequest::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ServiceError::BadRequest(e.to_string()))?
    };
    let (p, wid, report) = blocking(move || app.bench.apply_selection(&id, &s, req)).await?;
    Ok(Json(json!({ "revision": p.revision, "report": report, "well": p.well_info(&wid)? })))
}

async fn undo(State(app): State<AppState>, Segments((id, w)): Segments<(String, String)>) -> ApiResult {
    let (p, wid) = blocking(move || app.bench.undo(&id, &w)).await?;
    well_response(&p, &wid)
}

async fn train(
    State(app): State<AppState>,
    Segments(id): Segments<String>,
    Body(req): Body<TrainRequest>,
) -> ApiResult {
    let (p, stored) = blocking(move || app.bench.train(&id, req)).await?;
    Ok(Json(json!({
        "revision": p.revision,
        "model_id": stored.id,
        "kind": stored.model.kind,
        "features": stored.model.feature_names,
        "target": stored.model.target_name,
        "k": stored.model.hyperparams.k,
        "wells": stored.wells,
        "train_metrics": stored.train_metrics,
        "test_metrics": stored.test_metrics,
    })))
}

async fn list_models(State(app): State<AppState>, Segments(id): Segments<String>) -> ApiResult {
    let p = app.bench.snapshot(&id)?;
    let list: Vec<Value> = p
        .models
        .values()
        .map(|m| {
            json!({
                "model_id": m.id,
                "kind": m.model.kind,
                "features": m.model.feature_names,
                "target": m.model.target_name,
                "test_metrics": m.test_metrics,
            })
        })
        .collect();
    Ok(Json(json!({ "revision": p.revision, "models": list })))
}

async fn get_model(State(app): State<AppState>, Segments((id, m)): Segments<(String, String)>) -> ApiResult {
    let p = app.bench.snapshot(&id)?;
    Ok(Json(json!({ "revision": p.revision, "model": p.model(&m)? })))
}

#[derive(Deserialize)]
struct PredictRequest {
    well: String,
}

async fn run_predict(
    State(app): State<AppState>,
    Segments((id, m)): Segments<(String, String)>,
    Body(req): Body<PredictRequest>,
) -> ApiResult {
    let (p, wid) = blocking(move || app.bench.predict(&id, &m, &req.well)).await?;
    well_response(&p, &wid)
}

#[derive(Deserialize)]
struct ExportQuery {
    format: ExportFormat,
    well: Option<String>,
    curves: Option<String>,
}

async fn export(
    State(app): State<AppState>,
    Segments(id): Segments<String>,
    Params(q): Params<ExportQuery>,
) -> Result<Response, ServiceError> {
    let curves: Vec<String> = q
        .curves
        .as_deref()
        .unwrap_or("")
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    let well = q.well.unwrap_or_else(|| ALL_WELLS.to_string());
    let (p, file) = blocking(move || app.bench.export(&id, &well, q.format, &curves)).await?;
    let disposition = format!("attachment; filename=\"{}\"", file.file_name);
    let mut response = file.body.into_response();
    let h = response.headers_mut();
    h.insert(header::CONTENT_TYPE, HeaderValue::from_static(file.content_type));
    if let Ok(v) = HeaderValue::from_str(&disposition) {
        h.insert(header::CONTENT_DISPOSITION, v);
    }
    h.insert("x-mlogs-revision", HeaderValue::from(p.revision));
    Ok(response)
}
