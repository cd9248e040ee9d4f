//! A loopback stand-in for the media repository's search and rendition
//! API, shaped like the MediaWiki `action=query` endpoints the harness
//! speaks: `list=search` for term search (with `sroffset` continuation)
//! and `prop=imageinfo` with `iiurlwidth` for scaled-rendition URLs.

use crate::synth::{png_bytes, synth_rgb};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::get;
use axum::Router;
use serde_json::{json, Value};
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

/// One hosted file: `title` must be URL-safe (use underscores, as wiki
/// titles do). Files sharing a `seed` and dimensions render byte-identical
/// pictures, which is how byte-duplicate corpus entries are staged.
#[derive(Debug, Clone)]
pub struct FixtureFile {
    pub title: String,
    pub seed: u64,
    pub width: u32,
    pub height: u32,
}

/// The hosted catalog: an ordered file list per search term, plus a set of
/// titles whose renditions fail with 404 (download-failure injection).
#[derive(Debug, Clone, Default)]
pub struct MediaFixture {
    pub terms: Vec<(String, Vec<FixtureFile>)>,
    pub broken: BTreeSet<String>,
}

impl MediaFixture {
    fn files_for(&self, term: &str) -> &[FixtureFile] {
        self.terms
            .iter()
            .find(|(t, _)| t == term)
            .map(|(_, files)| files.as_slice())
            .unwrap_or(&[])
    }

    fn find(&self, title: &str) -> Option<&FixtureFile> {
        self.terms
            .iter()
            .flat_map(|(_, files)| files)
            .find(|f| f.title == title)
    }

    /// Stable page id: position of the first file with this title.
    fn page_id(&self, title: &str) -> u64 {
        let mut id = 1;
        for (_, files) in &self.terms {
            for file in files {
                if file.title == title {
                    return id;
                }
                id += 1;
            }
        }
        0
    }
}

struct ServerState {
    fixture: MediaFixture,
    base_url: String,
}

/// A running media fixture server on an ephemeral loopback port.
pub struct MediaServer {
    pub base_url: String,
    handle: tokio::task::JoinHandle<()>,
}

impl MediaServer {
    /// The `action=query` endpoint, for the harness config's API base.
    pub fn api_url(&self) -> String {
        format!("{}/w/api.php", self.base_url)
    }
}

impl Drop for MediaServer {
    fn drop(&mut self) {
        self.handle.abort();
    }
}

pub async fn serve_media(fixture: MediaFixture) -> MediaServer {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0")
        .await
        .expect("bind loopback");
    let base_url = format!("http://{}", listener.local_addr().expect("local addr"));
    let state = Arc::new(ServerState {
        fixture,
        base_url: base_url.clone(),
    });
    let app = Router::new()
        .route("/w/api.php", get(api))
        .route("/thumb/{title}", get(thumb))
        .with_state(state);
    let handle = tokio::spawn(async move {
        axum::serve(listener, app).await.expect("serve media fixture");
    });
    MediaServer { base_url, handle }
}

async fn api(
    State(state): State<Arc<ServerState>>,
    Query(params): Query<HashMap<String, String>>,
) -> impl IntoResponse {
    let body = if params.get("list").map(String::as_str) == Some("search") {
        search_response(&state, &params)
    } else if params.get("prop").map(String::as_str) == Some("imageinfo") {
        imageinfo_response(&state, &params)
    } else {
        json!({"error": {"code": "unknown_action"}})
    };
    axum::Json(body)
}

fn search_response(state: &ServerState, params: &HashMap<String, String>) -> Value {
    let term = params.get("srsearch").cloned().unwrap_or_default();
    let limit: usize = params
        .get("srlimit")
        .and_then(|v| v.parse().ok())
        .unwrap_or(10);
    let offset: usize = params
        .get("sroffset")
        .and_then(|v| v.parse().ok())
        .unwrap_or(0);
    let files = state.fixture.files_for(&term);
    let page: Vec<Value> = files
        .iter()
        .skip(offset)
        .take(limit)
        .map(|f| {
            json!({
                "ns": 6,
                "title": format!("File:{}", f.title),
                "pageid": state.fixture.page_id(&f.title),
            })
        })
        .collect();
    let mut body = json!({"query": {"search": page}});
    if offset + limit < files.len() {
        body["continue"] = json!({"sroffset": offset + limit, "continue": "-||"});
    }
    body
}

fn imageinfo_response(state: &ServerState, params: &HashMap<String, String>) -> Value {
    let width: u32 = params
        .get("iiurlwidth")
        .and_then(|v| v.parse().ok())
        .unwrap_or(640);
    let titles = params.get("titles").cloned().unwrap_or_default();
    let mut pages = serde_json::Map::new();
    for full_title in titles.split('|').filter(|t| !t.is_empty()) {
        let title = full_title.strip_prefix("File:").unwrap_or(full_title);
        let Some(file) = state.fixture.find(title) else {
            continue;
        };
        let thumb_width = width.min(file.width);
        let thumb_height =
            ((file.height as f64 * thumb_width as f64 / file.width as f64).round() as u32).max(1);
        let page_id = state.fixture.page_id(title);
        pages.insert(
            page_id.to_string(),
            json!({
                "pageid": page_id,
                "title": full_title,
                "imageinfo": [{
                    "url": format!("{}/thumb/{}?w={}", state.base_url, title, file.width),
                    "descriptionurl": format!("{}/wiki/File:{}", state.base_url, title),
                    "thumburl": format!("{}/thumb/{}?w={}", state.base_url, title, thumb_width),
                    "thumbwidth": thumb_width,
                    "thumbheight": thumb_height,
                    "width": file.width,
                    "height": file.height,
                }],
            }),
        );
    }
    json!({"query": {"pages": Value::Object(pages)}})
}

async fn thumb(
    State(state): State<Arc<ServerState>>,
    Path(title): Path<String>,
    Query(params): Query<HashMap<String, String>>,
) -> impl IntoResponse {
    if state.fixture.broken.contains(&title) {
        return (StatusCode::NOT_FOUND, Vec::new()).into_response();
    }
    let Some(file) = state.fixture.find(&title) else {
        return (StatusCode::NOT_FOUND, Vec::new()).into_response();
    };
    let width: u32 = params
        .get("w")
        .and_then(|v| v.parse().ok())
        .unwrap_or(file.width)
        .min(file.width)
        .max(1);
    let height =
        ((file.height as f64 * width as f64 / file.width as f64).round() as u32).max(1);
    let bytes = png_bytes(&synth_rgb(file.seed, width, height));
    ([("content-type", "image/png")], bytes).into_response()
}
