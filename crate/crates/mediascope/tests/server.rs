mod common;

use std::sync::{Arc, Mutex};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use chrono::{TimeZone, Utc};
use common::TZ;
use http_body_util::BodyExt;
use mediascope::report;
use mediascope::server::{router, AppState, Paged};
use mediascope::store::{DocFilter, FacetField, Page, Store};
use mediascope::synth;
use mediascope_core::analytics::{Granularity, GroupBy, MediumProfile, TendencyThresholds};
use mediascope_core::TopicLabel;
use serde_json::Value;
use tower::ServiceExt;

fn roster() -> Vec<MediumProfile> {
    mediascope::formats::read_roster(synth::ROSTER.as_bytes(), &Default::default()).unwrap()
}

struct Api {
    app: Router,
    _dir: tempfile::TempDir,
    store: Store,
}

fn api(origins: &[&str]) -> Api {
    let dir = tempfile::tempdir().unwrap();
    let mut writer = Store::open_writer(dir.path(), TZ).unwrap();
    for d in synth::store_docs(400, TZ, 21) {
        writer.index_doc(d).unwrap();
    }
    drop(writer);
    let state = AppState { store: Mutex::new(Store::open_reader(dir.path(), TZ).unwrap()), roster: roster(), analyzer: None, tz: TZ, top_k: 10 };
    let origins: Vec<String> = origins.iter().map(|s| s.to_string()).collect();
    Api { app: router(Arc::new(state), &origins), store: Store::open_reader(dir.path(), TZ).unwrap(), _dir: dir }
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Vec<u8>) {
    let resp = app.clone().oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn ok(app: &Router, uri: &str) -> Vec<u8> {
    let (status, body) = get(app, uri).await;
    assert_eq!(status, StatusCode::OK, "{uri}: {}", String::from_utf8_lossy(&body));
    body
}

#[tokio::test]
async fn bodies_equal_module_output() {
    let api = api(&[]);
    let all = api.store.select(&DocFilter::default()).unwrap();
    let october = DocFilter {
        start: Some(Utc.with_ymd_and_hms(2015, 10, 1, 3, 0, 0).unwrap()),
        end: Some(Utc.with_ymd_and_hms(2015, 11, 1, 3, 0, 0).unwrap()),
        ..Default::default()
    };
    let oct = api.store.select(&october).unwrap();
    let page = Page::default();

    let news_filter = DocFilter { media: vec!["emol".into(), "t13".into()], topics: vec![TopicLabel::Deportes], ..Default::default() };
    let expected = api.store.query(&news_filter, Page { offset: 0, limit: 5 }).unwrap();
    assert_eq!(ok(&api.app, "/news?medium=emol,t13&topic=deportes&limit=5").await, serde_json::to_vec(&expected).unwrap());
    assert_eq!(ok(&api.app, "/news?medium=emol&medium=t13&topic=deportes&limit=5").await, serde_json::to_vec(&expected).unwrap());

    let facets = api.store.facet_counts(&october, FacetField::Topic).unwrap();
    assert_eq!(ok(&api.app, "/facets?field=topic&start=2015-10-01&end=2015-10-31").await, serde_json::to_vec(&facets).unwrap());

    let lemma = DocFilter { terms: vec!["lema3".into()], ..Default::default() };
    let lemma_docs = api.store.select(&lemma).unwrap();
    assert_eq!(
        ok(&api.app, "/metrics/volume?granularity=month&lemma=LEMA3").await,
        serde_json::to_vec(&report::volume(&lemma_docs, Granularity::Month, TZ)).unwrap()
    );
    assert_eq!(ok(&api.app, "/metrics/volume").await, serde_json::to_vec(&report::volume(&all, Granularity::Day, TZ)).unwrap());
    assert_eq!(
        ok(&api.app, "/metrics/topics?group=all").await,
        serde_json::to_vec(&Paged::of(report::topics(&all, GroupBy::All), page)).unwrap()
    );
    assert_eq!(
        ok(&api.app, "/metrics/topics?offset=3&limit=4").await,
        serde_json::to_vec(&Paged::of(report::topics(&all, GroupBy::Medium), Page { offset: 3, limit: 4 })).unwrap()
    );
    assert_eq!(
        ok(&api.app, "/metrics/tendencies").await,
        serde_json::to_vec(&Paged::of(report::tendencies(&all, &TendencyThresholds::default()), page)).unwrap()
    );
    assert_eq!(ok(&api.app, "/metrics/concentration?k=5").await, serde_json::to_vec(&report::concentration(&all, 5)).unwrap());
    assert_eq!(ok(&api.app, "/metrics/concentration").await, serde_json::to_vec(&report::concentration(&all, 10)).unwrap());
    assert_eq!(
        ok(&api.app, "/metrics/geo?start=2015-10-01&end=2015-10-31").await,
        serde_json::to_vec(&Paged::of(report::geo(&oct), page)).unwrap()
    );
    assert_eq!(ok(&api.app, "/media").await, serde_json::to_vec(&Paged::of(report::media_table(&roster(), &all), page)).unwrap());
}

#[tokio::test]
async fn q_without_analyzer_folds_words() {
    let api = api(&[]);
    let filter = DocFilter { terms: vec!["lema1".into(), "lema2".into()], ..Default::default() };
    let expected = api.store.query(&filter, Page::default()).unwrap();
    assert_eq!(ok(&api.app, "/news?q=Lema1%20LEMA2").await, serde_json::to_vec(&expected).unwrap());
}

#[tokio::test]
async fn errors_are_machine_readable() {
    let api = api(&[]);
    for (uri, status, code) in [
        ("/news?start=2015-02-30", 400, "bad_date"),
        ("/metrics/volume?end=ayer", 400, "bad_date"),
        ("/news?start=2015-10-05&end=2015-10-01", 400, "date_range"),
        ("/news?limit=0", 400, "bad_limit"),
        ("/news?limit=5000", 400, "bad_limit"),
        ("/facets", 400, "bad_parameter"),
        ("/facets?field=color", 400, "bad_parameter"),
        ("/metrics/volume?granularity=week", 400, "bad_parameter"),
        ("/news?colour=red", 400, "unknown_parameter"),
        ("/nowhere", 404, "not_found"),
    ] {
        let (s, body) = get(&api.app, uri).await;
        assert_eq!(s.as_u16(), status, "{uri}");
        let v: Value = serde_json::from_slice(&body).unwrap();
        assert_eq!(v["error"]["code"], code, "{uri}");
        assert!(v["error"]["message"].as_str().is_some_and(|m| !m.is_empty()));
    }
}

#[tokio::test]
async fn health_reports_store() {
    let api = api(&[]);
    let v: Value = serde_json::from_slice(&ok(&api.app, "/health").await).unwrap();
    assert_eq!(v["status"], "ok");
    assert_eq!(v["store"]["docs"], api.store.len());
}

#[tokio::test]
async fn cors_allows_configured_origin() {
    let api = api(&["http://localhost:5173"]);
    let req = |origin: &str| Request::get("/health").header("origin", origin).body(Body::empty()).unwrap();
    let resp = api.app.clone().oneshot(req("http://localhost:5173")).await.unwrap();
    assert_eq!(resp.headers()["access-control-allow-origin"], "http://localhost:5173");
    let resp = api.app.clone().oneshot(req("http://evil.example")).await.unwrap();
    assert!(resp.headers().get("access-control-allow-origin").is_none());
    let any = api_any().await;
    let resp = any.clone().oneshot(req("http://whatever.example")).await.unwrap();
    assert_eq!(resp.headers()["access-control-allow-origin"], "*");
}

async fn api_any() -> Router {
    api(&["*"]).app
}

#[tokio::test]
async fn serves_new_records_after_refresh() {
    let dir = tempfile::tempdir().unwrap();
    let mut writer = Store::open_writer(dir.path(), TZ).unwrap();
    let state = AppState { store: Mutex::new(Store::open_reader(dir.path(), TZ).unwrap()), roster: vec![], analyzer: None, tz: TZ, top_k: 10 };
    let app = router(Arc::new(state), &[]);
    let v: Value = serde_json::from_slice(&ok(&app, "/news").await).unwrap();
    assert_eq!(v["total"], 0);
    for d in synth::store_docs(12, TZ, 5) {
        writer.index_doc(d).unwrap();
    }
    writer.commit().unwrap();
    let v: Value = serde_json::from_slice(&ok(&app, "/news").await).unwrap();
    assert_eq!(v["total"], 12);
}

#[tokio::test]
async fn graceful_shutdown_over_tcp() {
    let api = api(&[]);
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let (tx, rx) = tokio::sync::oneshot::channel::<()>();
    let server = tokio::spawn(mediascope::server::serve(listener, api.app.clone(), async {
        let _ = rx.await;
    }));
    let body = tokio::task::spawn_blocking(move || {
        let mut resp = ureq::get(&format!("http://{addr}/health")).call().unwrap();
        resp.body_mut().read_to_string().unwrap()
    })
    .await
    .unwrap();
    assert!(body.contains("\"status\":\"ok\""));
    tx.send(()).unwrap();
    server.await.unwrap().unwrap();
}
