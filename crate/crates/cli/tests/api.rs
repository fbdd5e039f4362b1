use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use surething::session::{Session, SessionSnapshot, SessionStore};
use surething_cli::api::router;
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, v)
}

fn app() -> Router {
    router(Arc::new(SessionStore::new()))
}

async fn create(app: &Router, config: Value) -> String {
    let (status, v) = call(app, "POST", "/sessions", Some(config)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn full_session_converges() {
    let app = app();
    let id = create(&app, json!({"event": "rain tomorrow", "width": "1/16"})).await;
    let p = surething::rational::ratio(3, 10);
    let mut last = Value::Null;
    for _ in 0..8 {
        let (status, q) = call(&app, "GET", &format!("/sessions/{id}/query"), None).await;
        if status == StatusCode::CONFLICT {
            break;
        }
        assert_eq!(status, StatusCode::OK, "{q}");
        let price = surething::rational::parse(q["price"].as_str().unwrap()).unwrap();
        assert!(q["framing"].as_str().unwrap().contains("rain tomorrow"));
        let response = if p > price { "player" } else { "bookie" };
        let (status, r) = call(&app, "POST", &format!("/sessions/{id}/answer"), Some(json!({"response": response}))).await;
        assert_eq!(status, StatusCode::OK, "{r}");
        last = r;
    }
    assert_eq!(last["status"], "converged");
    assert_eq!(last["lo"], "1/4");
    assert_eq!(last["hi"], "5/16");
    assert_eq!(last["transcript"].as_array().unwrap().len(), 4);

    let (_, report) = call(&app, "GET", &format!("/sessions/{id}/report"), None).await;
    assert_eq!(report, last);
}

#[tokio::test]
async fn snapshot_restores_the_same_report() {
    let app = app();
    let id = create(&app, json!({"event": "E"})).await;
    call(&app, "GET", &format!("/sessions/{id}/query"), None).await;
    call(&app, "POST", &format!("/sessions/{id}/answer"), Some(json!({"response": "b"}))).await;
    let (status, snap) = call(&app, "GET", &format!("/sessions/{id}/snapshot"), None).await;
    assert_eq!(status, StatusCode::OK);
    let snap: SessionSnapshot = serde_json::from_value(snap).unwrap();
    let restored = Session::restore(&snap).unwrap();
    assert_eq!(restored.report(), snap.report);
    assert_eq!(snap.report.hi, surething::rational::ratio(1, 2));
}

#[tokio::test]
async fn preferences_surface_violations_once() {
    let app = app();
    let problem: Value = serde_json::from_str(surething_cli::corpus::ALLAIS).unwrap();
    let mut problem = problem;
    problem["preferences"] = json!([]);
    let id = create(&app, json!({"event": "ticket 1", "problem": problem})).await;
    let pref = |l: &str, r: &str, rel: &str| json!({"left": l, "right": r, "rel": rel});
    let path = format!("/sessions/{id}/preference");

    let (status, v) = call(&app, "POST", &path, Some(pref("I", "II", ">"))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert!(v["new_violations"].as_array().unwrap().is_empty());

    let (_, v) = call(&app, "POST", &path, Some(pref("III", "IV", "<"))).await;
    let fresh = v["new_violations"].as_array().unwrap();
    assert!(fresh.iter().any(|r| r["axiom"] == "P2"), "{v}");
    assert!(!v["report"]["violations"].as_array().unwrap().is_empty());

    let (_, v) = call(&app, "POST", &path, Some(pref("III", "IV", "<"))).await;
    assert!(v["new_violations"].as_array().unwrap().is_empty());

    let (status, v) = call(&app, "POST", &path, Some(pref("I", "nope", "<"))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
}

#[tokio::test]
async fn error_statuses() {
    let app = app();
    let (status, v) = call(&app, "GET", "/sessions/missing/report", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(v["error"].is_string());

    let (status, _) = call(&app, "POST", "/sessions", Some(json!({"event": "E", "width": "2"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let id = create(&app, json!({"event": "E"})).await;
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/answer"), Some(json!({"response": "player"}))).await;
    assert_eq!(status, StatusCode::CONFLICT);

    call(&app, "GET", &format!("/sessions/{id}/query"), None).await;
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/answer"), Some(json!({"response": "maybe"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let (status, v) = call(&app, "POST", &format!("/sessions/{id}/abandon"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["status"], "abandoned");
    let (status, _) = call(&app, "GET", &format!("/sessions/{id}/query"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
}
