use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use infcom_core::fixtures::{bowtie_dataset, seven_authors_dataset};
use infcom_service::{router, router_with_state, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    let (s, b) = call(app, Request::get(uri).body(Body::empty()).unwrap()).await;
    (s, serde_json::from_slice(&b).unwrap())
}

async fn post_raw(app: &Router, body: &str) -> (StatusCode, Vec<u8>) {
    let req = Request::post("/query").header("content-type", "application/json").body(Body::from(body.to_string()));
    call(app, req.unwrap()).await
}

async fn post(app: &Router, body: Value) -> (StatusCode, Value) {
    let (s, b) = post_raw(app, &body.to_string()).await;
    (s, serde_json::from_slice(&b).unwrap())
}

fn seven_authors() -> Router {
    router(Arc::new(seven_authors_dataset()))
}

#[tokio::test]
async fn health_and_topics() {
    let app = seven_authors();
    let (s, v) = get(&app, "/health").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["paper_count"], 8);
    let (s, v) = get(&app, "/topics").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["paper_count"], 8);
    assert_eq!(v["top_topics_by_papers"][0]["topic"], "databases");
}

#[tokio::test]
async fn query_returns_normalized_scores() {
    let app = seven_authors();
    let (s, v) = post(&app, json!({"topics": ["databases"], "year_from": 2010, "year_to": 2015, "k": 2})).await;
    assert_eq!(s, StatusCode::OK);
    let communities = v["communities"].as_array().unwrap();
    assert_eq!(communities.len(), 2);
    assert_eq!(communities[0]["normalized"].as_f64().unwrap(), 10.0);
    assert!((communities[1]["normalized"].as_f64().unwrap() - 4.22).abs() < 0.01);
    assert_eq!(v["multi_community_authors"][0]["author_id"], "u4");
}

#[tokio::test]
async fn every_returned_id_resolves() {
    let app = seven_authors();
    let (_, v) = post(&app, json!({"topics": [], "year_from": 2000, "year_to": 2020})).await;
    for c in v["communities"].as_array().unwrap() {
        let id = c["community_id"].as_u64().unwrap();
        let (s, detail) = get(&app, &format!("/communities/{id}")).await;
        assert_eq!(s, StatusCode::OK);
        for m in c["member_ids"].as_array().unwrap() {
            let (s, a) = get(&app, &format!("/authors/{}", m.as_str().unwrap())).await;
            assert_eq!(s, StatusCode::OK, "author {m}");
            assert!(a["community_ids"].as_array().unwrap().iter().any(|x| x.as_u64() == Some(id)));
        }
        assert_eq!(detail["author_count"], c["member_ids"].as_array().unwrap().len());
    }
}

#[tokio::test]
async fn identical_requests_are_byte_identical_and_cached() {
    let state = Arc::new(AppState::new(Arc::new(seven_authors_dataset())));
    let app = router_with_state(Arc::clone(&state));
    let body = r#"{"topics": [" Databases ", "databases"], "year_from": 2010, "year_to": 2015}"#;
    let (_, a) = post_raw(&app, body).await;
    let (_, b) = post_raw(&app, r#"{"topics": ["databases"], "year_from": 2010, "year_to": 2015}"#).await;
    assert_eq!(a, b);
    assert_eq!(state.cached_len(), 1);
}

#[tokio::test]
async fn k_one_keeps_the_stronger_community() {
    let app = seven_authors();
    let (_, v) = post(&app, json!({"topics": [], "year_from": 2010, "year_to": 2015, "k": 1})).await;
    let c = &v["communities"].as_array().unwrap()[..];
    assert_eq!(c.len(), 1);
    assert_eq!(c[0]["member_ids"], json!(["u4", "u5", "u6", "u7"]));
}

#[tokio::test]
async fn empty_window_gives_empty_result() {
    let app = seven_authors();
    let (s, v) = post(&app, json!({"topics": [], "year_from": 1990, "year_to": 1995})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["communities"], json!([]));
    assert_eq!(v["graph"]["authors"], json!([]));
}

#[tokio::test]
async fn errors_carry_code_and_message() {
    let app = seven_authors();
    let (s, v) = get(&app, "/communities/0").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["code"], "no_snapshot");

    let (s, v) = post(&app, json!({"topics": [], "year_from": 2015, "year_to": 2010})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "invalid_range");
    assert!(v["message"].as_str().unwrap().contains("2015"));

    let (s, v) = post(&app, json!({"topics": [], "year_from": 2010, "year_to": 2015, "k": 0})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "invalid_k");

    let (s, b) = post_raw(&app, "{not json").await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(serde_json::from_slice::<Value>(&b).unwrap()["code"], "invalid_request");

    post(&app, json!({"topics": [], "year_from": 2010, "year_to": 2015})).await;
    let (s, v) = get(&app, "/communities/99").await;
    assert_eq!((s, v["code"].as_str().unwrap()), (StatusCode::NOT_FOUND, "unknown_community"));
    let (s, v) = get(&app, "/communities/abc").await;
    assert_eq!((s, v["code"].as_str().unwrap()), (StatusCode::BAD_REQUEST, "invalid_id"));
    let (s, v) = get(&app, "/authors/nobody").await;
    assert_eq!((s, v["code"].as_str().unwrap()), (StatusCode::NOT_FOUND, "unknown_author"));
}

#[tokio::test]
async fn bowtie_communities_overlap() {
    let app = router(Arc::new(bowtie_dataset()));
    let (_, v) = post(&app, json!({"topics": [], "year_from": 2000, "year_to": 2020})).await;
    let ids: Vec<u64> =
        v["communities"].as_array().unwrap().iter().map(|c| c["community_id"].as_u64().unwrap()).collect();
    assert_eq!(ids.len(), 2);
    let (_, d) = get(&app, &format!("/communities/{}", ids[0])).await;
    assert_eq!(d["overlapping_community_ids"], json!([ids[1]]));
}

#[tokio::test]
async fn concurrent_queries_agree() {
    let state = Arc::new(AppState::new(Arc::new(seven_authors_dataset())));
    let app = router_with_state(Arc::clone(&state));
    let body = r#"{"topics": [], "year_from": 2010, "year_to": 2015, "k": 2}"#;
    let tasks: Vec<_> = (0..8)
        .map(|_| {
            let app = app.clone();
            tokio::spawn(async move { post_raw(&app, body).await })
        })
        .collect();
    let mut outputs = Vec::new();
    for t in tasks {
        outputs.push(t.await.unwrap().1);
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(state.cached_len(), 1);
}
