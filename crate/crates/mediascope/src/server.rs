//! Read-only HTTP API over a document store.
//!
//! Every endpoint accepts the document filter parameters and computes its
//! body from the matching documents:
//!
//! | parameter     | meaning                                                  |
//! |---------------|----------------------------------------------------------|
//! | `medium`      | handle; comma-separated or repeated, any matches         |
//! | `topic`       | topic label; comma-separated or repeated, any matches    |
//! | `start`       | inclusive; `YYYY-MM-DD` (local midnight) or RFC 3339     |
//! | `end`         | a date includes that whole local day; RFC 3339 exclusive |
//! | `q`           | free text, analyzed into lemmas that must all occur      |
//! | `lemma`       | lemmas used as-is, comma-separated or repeated           |
//! | `geoname_id`  | documents mentioning that place                          |
//!
//! List bodies are paged with `offset` and `limit` (default 50, at most
//! 1000) inside a `{total, offset, limit, items}` envelope; `/news` uses
//! `docs` for the items. Errors are `{"error": {"code", "message"}}`.

use std::future::Future;
use std::sync::{Arc, Mutex};

use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use chrono::{DateTime, Days, NaiveDate, Utc};
use chrono_tz::Tz;
use mediascope_core::analytics::{Granularity, GroupBy, MediumProfile, TendencyThresholds};
use mediascope_core::nlp::{tokenize, TokenKind};
use mediascope_core::text::case_fold;
use mediascope_core::{NewsDoc, TopicLabel};
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::analyzer::Analyzer;
use crate::report;
use crate::store::{DocFilter, FacetField, Page, Store, StoreStats};

pub const MAX_LIMIT: usize = 1000;

pub struct AppState {
    pub store: Mutex<Store>,
    pub roster: Vec<MediumProfile>,
    /// Turns `q` into lemmas; without it `q` is only tokenized and folded.
    pub analyzer: Option<Analyzer>,
    pub tz: Tz,
    pub top_k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn bad_request(code: &str, message: impl Into<String>) -> Self {
        ApiError { status: 400, code: code.to_string(), message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        ApiError { status: 500, code: "internal".to_string(), message: message.into() }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a ApiError,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let body = serde_json::to_vec(&ErrorBody { error: &self }).unwrap_or_default();
        (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
    }
}

/// A page of a list result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Paged<T> {
    pub total: usize,
    pub offset: usize,
    pub limit: usize,
    pub items: Vec<T>,
}

impl<T> Paged<T> {
    pub fn of(items: Vec<T>, page: Page) -> Self {
        let total = items.len();
        let items = items.into_iter().skip(page.offset).take(page.limit).collect();
        Paged { total, offset: page.offset, limit: page.limit, items }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub version: String,
    pub store: StoreStats,
}

/// Parsed query string: the filter, the page and endpoint-specific extras.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ApiQuery {
    pub filter: DocFilter,
    pub page: Page,
    /// `q` before analysis.
    pub text: Option<String>,
    pub extras: Vec<(String, String)>,
}

const FILTER_KEYS: [&str; 9] = ["medium", "topic", "start", "end", "q", "lemma", "geoname_id", "offset", "limit"];

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_bound(key: &str, value: &str, tz: Tz, end: bool) -> Result<DateTime<Utc>, ApiError> {
    if let Ok(ts) = DateTime::parse_from_rfc3339(value) {
        return Ok(ts.with_timezone(&Utc));
    }
    let date = NaiveDate::parse_from_str(value, "%Y-%m-%d")
        .map_err(|_| ApiError::bad_request("bad_date", format!("{key}={value:?} is neither YYYY-MM-DD nor RFC 3339")))?;
    let date = if end { date.checked_add_days(Days::new(1)).unwrap_or(date) } else { date };
    date.and_hms_opt(0, 0, 0)
        .and_then(|t| t.and_local_timezone(tz).earliest())
        .map(|t| t.with_timezone(&Utc))
        .ok_or_else(|| ApiError::bad_request("bad_date", format!("{key}={value:?} has no local midnight")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ApiError> {
    value.parse().map_err(|_| ApiError::bad_request("bad_parameter", format!("{key}={value:?} is not a non-negative integer")))
}

impl ApiQuery {
    /// `allowed` lists the extra keys the endpoint understands.
    pub fn parse(pairs: &[(String, String)], allowed: &[&str], tz: Tz) -> Result<ApiQuery, ApiError> {
        let mut q = ApiQuery::default();
        for (key, value) in pairs {
            match key.as_str() {
                "medium" => q.filter.media.extend(list(value).map(str::to_string)),
                "topic" => {
                    for t in list(value) {
                        let label = t
                            .parse::<TopicLabel>()
                            .map_err(|_| ApiError::bad_request("bad_parameter", format!("unknown topic {t:?}")))?;
                        q.filter.topics.push(label);
                    }
                }
                "start" => q.filter.start = Some(parse_bound(key, value, tz, false)?),
                "end" => q.filter.end = Some(parse_bound(key, value, tz, true)?),
                "q" => q.text = Some(value.clone()),
                "lemma" => q.filter.terms.extend(list(value).map(case_fold)),
                "geoname_id" => {
                    let id = value
                        .parse()
                        .map_err(|_| ApiError::bad_request("bad_parameter", format!("geoname_id={value:?} is not an id")))?;
                    q.filter.geoname_id = Some(id);
                }
                "offset" => q.page.offset = parse_usize(key, value)?,
                "limit" => {
                    let limit = parse_usize(key, value)?;
                    if limit == 0 || limit > MAX_LIMIT {
                        return Err(ApiError::bad_request("bad_limit", format!("limit must be between 1 and {MAX_LIMIT}")));
                    }
                    q.page.limit = limit;
                }
                k if allowed.contains(&k) => q.extras.push((key.clone(), value.clone())),
                _ => return Err(ApiError::bad_request("unknown_parameter", format!("unknown parameter {key:?}"))),
            }
        }
        debug_assert!(FILTER_KEYS.iter().all(|k| !allowed.contains(k)));
        q.filter.validate().map_err(|e| ApiError::bad_request("date_range", e.to_string()))?;
        Ok(q)
    }

    pub fn extra(&self, key: &str) -> Option<&str> {
        self.extras.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Adds the lemmas of `q` to the filter terms.
    pub fn resolve_text(&mut self, analyzer: Option<&Analyzer>) {
        let Some(text) = self.text.take() else { return };
        let terms = match analyzer {
            Some(a) => a.lemmas(&text).into_iter().map(|l| case_fold(&l)).collect::<Vec<_>>(),
            None => tokenize(&text).into_iter().filter(|t| t.kind == TokenKind::Word).map(|t| case_fold(&t.surface)).collect(),
        };
        self.filter.terms.extend(terms);
    }
}

type Pairs = Query<Vec<(String, String)>>;

fn json<T: Serialize>(value: &T) -> Result<Response, ApiError> {
    let body = serde_json::to_vec(value).map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(([(header::CONTENT_TYPE, "application/json")], body).into_response())
}

/// Refreshes the store, parses the query and runs `f` on the matching
/// documents.
fn with_docs<T: Serialize>(
    state: &AppState,
    pairs: &[(String, String)],
    allowed: &[&str],
    f: impl FnOnce(&ApiQuery, &[&NewsDoc]) -> Result<T, ApiError>,
) -> Result<Response, ApiError> {
    let mut query = ApiQuery::parse(pairs, allowed, state.tz)?;
    query.resolve_text(state.analyzer.as_ref());
    let mut store = state.store.lock().map_err(|_| ApiError::internal("store lock poisoned"))?;
    store.refresh().map_err(|e| ApiError::internal(e.to_string()))?;
    let docs = store.select(&query.filter).map_err(|e| ApiError::bad_request("bad_parameter", e.to_string()))?;
    json(&f(&query, &docs)?)
}

async fn health(State(state): State<Arc<AppState>>) -> Result<Response, ApiError> {
    let mut store = state.store.lock().map_err(|_| ApiError::internal("store lock poisoned"))?;
    store.refresh().map_err(|e| ApiError::internal(e.to_string()))?;
    json(&Health { status: "ok".into(), version: env!("CARGO_PKG_VERSION").into(), store: store.stats() })
}

async fn news(State(state): State<Arc<AppState>>, Query(pairs): Pairs) -> Result<Response, ApiError> {
    let mut query = ApiQuery::parse(&pairs, &[], state.tz)?;
    query.resolve_text(state.analyzer.as_ref());
    let mut store = state.store.lock().map_err(|_| ApiError::internal("store lock poisoned"))?;
    store.refresh().map_err(|e| ApiError::internal(e.to_string()))?;
    let result = store.query(&query.filter, query.page).map_err(|e| ApiError::bad_request("bad_parameter", e.to_string()))?;
    json(&result)
}

async fn facets(State(state): State<Arc<AppState>>, Query(pairs): Pairs) -> Result<Response, ApiError> {
    let mut query = ApiQuery::parse(&pairs, &["field"], state.tz)?;
    query.resolve_text(state.analyzer.as_ref());
    let field: FacetField = query
        .extra("field")
        .ok_or_else(|| ApiError::bad_request("bad_parameter", "field is required"))?
        .parse()
        .map_err(|e: crate::store::QueryError| ApiError::bad_request("bad_parameter", e.to_string()))?;
    let mut store = state.store.lock().map_err(|_| ApiError::internal("store lock poisoned"))?;
    store.refresh().map_err(|e| ApiError::internal(e.to_string()))?;
    let counts = store.facet_counts(&query.filter, field).map_err(|e| ApiError::bad_request("bad_parameter", e.to_string()))?;
    json(&counts)
}

async fn media(State(state): State<Arc<AppState>>, Query(pairs): Pairs) -> Result<Response, ApiError> {
    with_docs(&state, &pairs, &[], |q, docs| Ok(Paged::of(report::media_table(&state.roster, docs), q.page)))
}

async fn volume(State(state): State<Arc<AppState>>, Query(pairs): Pairs) -> Result<Response, ApiError> {
    with_docs(&state, &pairs, &["granularity"], |q, docs| {
        let granularity = match q.extra("granularity").unwrap_or("day") {
            "day" => Granularity::Day,
            "month" => Granularity::Month,
            other => return Err(ApiError::bad_request("bad_parameter", format!("granularity {other:?} (expected day or month)"))),
        };
        Ok(report::volume(docs, granularity, state.tz))
    })
}

async fn topics(State(state): State<Arc<AppState>>, Query(pairs): Pairs) -> Result<Response, ApiError> {
    with_docs(&state, &pairs, &["group"], |q, docs| {
        let group = match q.extra("group").unwrap_or("medium") {
            "medium" => GroupBy::Medium,
            "all" => GroupBy::All,
            other => return Err(ApiError::bad_request("bad_parameter", format!("group {other:?} (expected medium or all)"))),
        };
        Ok(Paged::of(report::topics(docs, group), q.page))
    })
}

async fn tendencies(State(state): State<Arc<AppState>>, Query(pairs): Pairs) -> Result<Response, ApiError> {
    with_docs(&state, &pairs, &[], |q, docs| Ok(Paged::of(report::tendencies(docs, &TendencyThresholds::default()), q.page)))
}

async fn concentration(State(state): State<Arc<AppState>>, Query(pairs): Pairs) -> Result<Response, ApiError> {
    with_docs(&state, &pairs, &["k"], |q, docs| {
        let k = match q.extra("k") {
            Some(v) => parse_usize("k", v)?,
            None => state.top_k,
        };
        Ok(report::concentration(docs, k))
    })
}

async fn geo(State(state): State<Arc<AppState>>, Query(pairs): Pairs) -> Result<Response, ApiError> {
    with_docs(&state, &pairs, &[], |q, docs| Ok(Paged::of(report::geo(docs), q.page)))
}

async fn not_found() -> ApiError {
    ApiError { status: 404, code: "not_found".into(), message: "no such endpoint".into() }
}

fn cors(origins: &[String]) -> CorsLayer {
    let layer = CorsLayer::new().allow_methods([Method::GET]);
    if origins.iter().any(|o| o == "*") {
        return layer.allow_origin(AllowOrigin::any());
    }
    let list: Vec<HeaderValue> = origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()).collect();
    layer.allow_origin(AllowOrigin::list(list))
}

pub fn router(state: Arc<AppState>, cors_origins: &[String]) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/media", get(media))
        .route("/news", get(news))
        .route("/facets", get(facets))
        .route("/metrics/volume", get(volume))
        .route("/metrics/topics", get(topics))
        .route("/metrics/tendencies", get(tendencies))
        .route("/metrics/concentration", get(concentration))
        .route("/metrics/geo", get(geo))
        .fallback(not_found)
        .layer(cors(cors_origins))
        .with_state(state)
}

/// Serves until `shutdown` resolves, then drains in-flight requests.
pub async fn serve(
    listener: tokio::net::TcpListener,
    app: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}

/// Resolves on Ctrl-C or SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
    log::info!("shutting down");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(q: &[(&str, &str)]) -> Vec<(String, String)> {
        q.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn parses_filter() {
        let tz = chrono_tz::America::Santiago;
        let q = ApiQuery::parse(
            &pairs(&[("medium", "emol,latercera"), ("medium", "biobio"), ("topic", "Política"), ("start", "2015-10-01"), ("end", "2015-10-31")]),
            &[],
            tz,
        )
        .unwrap();
        assert_eq!(q.filter.media, ["emol", "latercera", "biobio"]);
        assert_eq!(q.filter.topics, [TopicLabel::Politica]);
        assert_eq!(q.filter.start.unwrap().to_rfc3339(), "2015-10-01T03:00:00+00:00");
        assert_eq!(q.filter.end.unwrap().to_rfc3339(), "2015-11-01T03:00:00+00:00");
    }

    #[test]
    fn rejects_bad_input() {
        let tz = chrono_tz::America::Santiago;
        let code = |q: &[(&str, &str)]| ApiQuery::parse(&pairs(q), &[], tz).unwrap_err().code;
        assert_eq!(code(&[("start", "2015-13-01")]), "bad_date");
        assert_eq!(code(&[("start", "2015-10-05"), ("end", "2015-10-01")]), "date_range");
        assert_eq!(code(&[("limit", "0")]), "bad_limit");
        assert_eq!(code(&[("topic", "farándula")]), "bad_parameter");
        assert_eq!(code(&[("k", "3")]), "unknown_parameter");
    }

    #[test]
    fn paging() {
        let p = Paged::of((0..10).collect(), Page { offset: 8, limit: 5 });
        assert_eq!(p.total, 10);
        assert_eq!(p.items, [8, 9]);
    }
}
