//! Read-only HTTP server for the explorer: the records document plus an
//! optional directory of static files.

use std::net::SocketAddr;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use axum::extract::State;
use axum::http::{header, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;

struct Served {
    records: String,
    static_dir: Option<PathBuf>,
}

pub fn router(records_json: String, static_dir: Option<PathBuf>) -> Router {
    let state = Arc::new(Served {
        records: records_json,
        static_dir,
    });
    Router::new()
        .route("/records.json", get(records))
        .route("/api/records", get(records))
        .fallback(get(static_file))
        .with_state(state)
}

async fn records(State(s): State<Arc<Served>>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], s.records.clone()).into_response()
}

fn content_type(p: &Path) -> &'static str {
    match p.extension().and_then(|e| e.to_str()).unwrap_or("") {
        "html" => "text/html; charset=utf-8",
        "js" | "mjs" => "text/javascript",
        "css" => "text/css",
        "json" => "application/json",
        "svg" => "image/svg+xml",
        "png" => "image/png",
        _ => "application/octet-stream",
    }
}

// Joins a request path below `root`, refusing anything that climbs out.
fn resolve(root: &Path, uri_path: &str) -> Option<PathBuf> {
    let rel = uri_path.trim_start_matches('/');
    let rel = if rel.is_empty() { "index.html" } else { rel };
    let mut out = root.to_path_buf();
    for c in Path::new(rel).components() {
        match c {
            Component::Normal(x) => out.push(x),
            _ => return None,
        }
    }
    Some(out)
}

async fn static_file(State(s): State<Arc<Served>>, uri: Uri) -> Response {
    let Some(root) = &s.static_dir else {
        return (StatusCode::NOT_FOUND, "not found").into_response();
    };
    let Some(path) = resolve(root, uri.path()) else {
        return (StatusCode::BAD_REQUEST, "bad path").into_response();
    };
    match tokio::fs::read(&path).await {
        Ok(bytes) => ([(header::CONTENT_TYPE, content_type(&path))], bytes).into_response(),
        Err(_) => (StatusCode::NOT_FOUND, "not found").into_response(),
    }
}

pub async fn serve(records_json: String, static_dir: Option<PathBuf>, port: u16) -> Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    let local = listener.local_addr()?;
    // tests and scripts read the bound port from this line
    println!("listening on http://{local}");
    log::info!("serving records on {local}");
    axum::serve(listener, router(records_json, static_dir)).await?;
    Ok(())
}
