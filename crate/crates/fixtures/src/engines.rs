//! Loopback servers that accept reverse-image-search uploads and answer
//! with engine-shaped result pages for whatever digest was uploaded.
//!
//! Each engine flavor renders the same planted results in its own wire
//! format (the formats the live adapters' parsers target), so adapter
//! conformance tests can run the full upload → archive → parse path
//! offline.

use axum::extract::{Multipart, Path, State};
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::post;
use axum::Router;
use serde_json::json;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bundles::PlantedSer;

/// Planted results for one query image, keyed by upload digest.
#[derive(Debug, Clone, Default)]
pub struct PlantedResults {
    pub similar_to: Vec<PlantedSer>,
    pub pages_with: Vec<PlantedSer>,
}

/// digest(upload bytes) → results to serve, shared by all engine flavors.
#[derive(Debug, Clone, Default)]
pub struct EnginePlan {
    pub by_digest: BTreeMap<String, PlantedResults>,
}

pub struct EngineServer {
    pub base_url: String,
    handle: tokio::task::JoinHandle<()>,
}

impl EngineServer {
    /// Upload endpoint for one engine flavor (`baidu`, `bing`, `google`,
    /// `yandex`).
    pub fn endpoint(&self, flavor: &str) -> String {
        format!("{}/{}/upload", self.base_url, flavor)
    }
}

impl Drop for EngineServer {
    fn drop(&mut self) {
        self.handle.abort();
    }
}

pub async fn serve_engines(plan: EnginePlan) -> EngineServer {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0")
        .await
        .expect("bind loopback");
    let base_url = format!("http://{}", listener.local_addr().expect("local addr"));
    let app = Router::new()
        .route("/{flavor}/upload", post(upload))
        .with_state(Arc::new(plan));
    let handle = tokio::spawn(async move {
        axum::serve(listener, app).await.expect("serve engine fixture");
    });
    EngineServer { base_url, handle }
}

async fn upload(
    State(plan): State<Arc<EnginePlan>>,
    Path(flavor): Path<String>,
    mut multipart: Multipart,
) -> impl IntoResponse {
    let mut digest = None;
    while let Ok(Some(field)) = multipart.next_field().await {
        if let Ok(bytes) = field.bytes().await {
            digest = Some(hex::encode(Sha256::digest(&bytes)));
        }
    }
    let Some(digest) = digest else {
        return (StatusCode::BAD_REQUEST, "no file field".to_string()).into_response();
    };
    let empty = PlantedResults::default();
    let results = plan.by_digest.get(&digest).unwrap_or(&empty);
    match flavor.as_str() {
        "baidu" => axum::Json(baidu_body(results)).into_response(),
        "bing" => ([("content-type", "text/html")], bing_body(results)).into_response(),
        "google" => ([("content-type", "text/html")], google_body(results)).into_response(),
        "yandex" => ([("content-type", "text/html")], yandex_body(results)).into_response(),
        _ => (StatusCode::NOT_FOUND, "unknown engine".to_string()).into_response(),
    }
}

pub fn baidu_body(results: &PlantedResults) -> serde_json::Value {
    let list = |sers: &[PlantedSer]| {
        sers.iter()
            .map(|s| {
                json!({
                    "fromUrl": s.ser_url,
                    "url": s.page_url,
                    "objUrl": s.image_url,
                    "thumbUrl": s.thumbnail_url,
                })
            })
            .collect::<Vec<_>>()
    };
    json!({
        "status": 0,
        "data": {
            "simipics": {"list": list(&results.similar_to)},
            "samepics": {"list": list(&results.pages_with)},
        }
    })
}

pub fn bing_body(results: &PlantedResults) -> String {
    let items = |sers: &[PlantedSer]| {
        sers.iter()
            .map(|s| {
                let m = json!({
                    "purl": s.page_url,
                    "murl": s.image_url,
                    "turl": s.thumbnail_url,
                });
                format!(
                    "<li class=\"imgpt\"><a class=\"iusc\" href=\"{}\" m='{}'></a></li>",
                    s.ser_url, m
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    format!(
        "<html><body><div id=\"i_results\">\n\
         <div class=\"similar-images\"><ul>\n{}\n</ul></div>\n\
         <div class=\"pages-including\"><ul>\n{}\n</ul></div>\n\
         </div></body></html>",
        items(&results.similar_to),
        items(&results.pages_with)
    )
}

pub fn google_body(results: &PlantedResults) -> String {
    let anchors = |sers: &[PlantedSer]| {
        sers.iter()
            .map(|s| {
                format!(
                    "<a class=\"rg_l\" href=\"{}\" data-ref=\"{}\"><img src=\"{}\" data-iurl=\"{}\"></a>",
                    s.ser_url, s.page_url, s.thumbnail_url, s.image_url
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    format!(
        "<html><body><div id=\"isr_mc\">\n\
         <div class=\"img-brk\">\n{}\n</div>\n\
         <div class=\"srg\">\n{}\n</div>\n\
         </div></body></html>",
        anchors(&results.similar_to),
        anchors(&results.pages_with)
    )
}

pub fn yandex_body(results: &PlantedResults) -> String {
    let items = |sers: &[PlantedSer], class: &str| {
        sers.iter()
            .map(|s| {
                format!(
                    "<a class=\"{}\" href=\"{}\" data-url=\"{}\"><img src=\"{}\" data-src=\"{}\"></a>",
                    class, s.ser_url, s.page_url, s.thumbnail_url, s.image_url
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    format!(
        "<html><body>\n\
         <div class=\"CbirSimilar-Thumbs\">\n{}\n</div>\n\
         <div class=\"CbirSites\">\n{}\n</div>\n\
         </body></html>",
        items(&results.similar_to, "CbirSimilar-Item"),
        items(&results.pages_with, "CbirSites-Item")
    )
}
