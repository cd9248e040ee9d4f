//! Engine adapters: upload each query image, archive the raw response
//! bodies under the run, and parse both SER kinds into normalized
//! records.
//!
//! Archive layout per query: `raw/<engine>/<query-id>/<kind>/page-<n>`,
//! plus a `meta.json` written last as the completion marker. Resuming a
//! run skips queries whose bundle is already complete. `sers.log` is
//! derived from the archive in one atomic write, sorted by
//! (engine, query_id, kind, position), so re-parsing archived bundles
//! reproduces it byte for byte.

pub mod parsers;

use chrono::{DateTime, Utc};
use futures::future;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Duration;
use thiserror::Error;

use crate::config::HarnessConfig;
use crate::corpus::{self, CorpusImage, UploadArtifact};
use crate::store::{self, Run, StoreError};
use crate::time;
use parsers::RawSer;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum EngineId {
    Baidu,
    Bing,
    Fixture,
    Google,
    Yandex,
}

impl EngineId {
    pub const ALL: [EngineId; 5] = [
        EngineId::Baidu,
        EngineId::Bing,
        EngineId::Fixture,
        EngineId::Google,
        EngineId::Yandex,
    ];

    /// The engines that talk to the network; `Fixture` is test-only.
    pub const LIVE: [EngineId; 4] = [
        EngineId::Baidu,
        EngineId::Bing,
        EngineId::Google,
        EngineId::Yandex,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EngineId::Baidu => "baidu",
            EngineId::Bing => "bing",
            EngineId::Fixture => "fixture",
            EngineId::Google => "google",
            EngineId::Yandex => "yandex",
        }
    }

    pub fn parse(s: &str) -> Option<EngineId> {
        match s {
            "baidu" => Some(EngineId::Baidu),
            "bing" => Some(EngineId::Bing),
            "fixture" => Some(EngineId::Fixture),
            "google" => Some(EngineId::Google),
            "yandex" => Some(EngineId::Yandex),
            _ => None,
        }
    }

    /// Multipart field name the engine expects the file under.
    pub fn upload_field(&self) -> &'static str {
        match self {
            EngineId::Baidu => "image",
            EngineId::Bing => "imageBin",
            EngineId::Fixture => "image",
            EngineId::Google => "encoded_image",
            EngineId::Yandex => "upfile",
        }
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum ResultKind {
    SimilarTo,
    PagesWith,
}

impl ResultKind {
    pub const ALL: [ResultKind; 2] = [ResultKind::SimilarTo, ResultKind::PagesWith];

    pub fn as_str(&self) -> &'static str {
        match self {
            ResultKind::SimilarTo => "similar_to",
            ResultKind::PagesWith => "pages_with",
        }
    }

    pub fn parse(s: &str) -> Option<ResultKind> {
        match s {
            "similar_to" => Some(ResultKind::SimilarTo),
            "pages_with" => Some(ResultKind::PagesWith),
            _ => None,
        }
    }
}

/// Maximum results recorded per (query, engine, kind).
pub const MAX_RESULTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResultRecord {
    pub query_id: String,
    pub engine: EngineId,
    pub kind: ResultKind,
    pub position: u32,
    pub ser_url: String,
    pub page_url: String,
    pub image_url: String,
    pub thumbnail_url: String,
    /// Names of URL fields the page did not carry (stored empty above).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub missing_fields: Vec<String>,
    #[serde(with = "time::ts")]
    pub captured_at: DateTime<Utc>,
}

impl SearchResultRecord {
    /// The canonical log order: engine, query, kind, position.
    pub fn sort_key(&self) -> (&'static str, &str, &'static str, u32) {
        (
            self.engine.as_str(),
            &self.query_id,
            self.kind.as_str(),
            self.position,
        )
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("{engine:?} rejected the upload: {reason}")]
    UploadRejected { engine: EngineId, reason: String },
    #[error("rate limited by {0:?}")]
    RateLimited(EngineId),
    #[error("network error talking to {engine:?}: {reason}")]
    Network { engine: EngineId, reason: String },
    #[error("cannot parse {engine:?} {kind:?} response: {reason}")]
    ParseFailure {
        engine: EngineId,
        kind: ResultKind,
        reason: String,
    },
    #[error("fixture error: {0}")]
    Fixture(String),
    #[error("bundle written by adapter {found}, parser is {expected}")]
    AdapterVersion { found: String, expected: String },
    #[error("upload preparation failed for {query_id}: {reason}")]
    Prepare { query_id: String, reason: String },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Completion marker for one archived bundle, written after all pages.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleMeta {
    pub engine: EngineId,
    pub query_id: String,
    pub content_digest: String,
    pub adapter_version: String,
    #[serde(with = "time::ts")]
    pub captured_at: DateTime<Utc>,
    pub kinds: Vec<ResultKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailStage {
    Upload,
    Parse,
}

/// A query that failed for one engine after retries; distinguishes
/// "harness failed" from "engine gave no results" in reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailedQuery {
    pub query_id: String,
    pub engine: EngineId,
    pub stage: FailStage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ResultKind>,
    pub error: String,
    #[serde(with = "time::ts")]
    pub at: DateTime<Utc>,
}

enum Flavor {
    Live {
        endpoint: String,
        client: reqwest::Client,
    },
    Fixture {
        bundle_dir: PathBuf,
    },
}

/// One engine's submission backend. Live adapters post multipart
/// uploads; the fixture adapter reads planted bundles from disk. Both
/// satisfy the same contract: an upload yields raw bodies per kind.
pub struct Adapter {
    pub engine: EngineId,
    pub upload_limit: u64,
    flavor: Flavor,
}

impl Adapter {
    pub fn from_config(config: &HarnessConfig, engine: EngineId) -> Result<Self, EngineError> {
        let flavor = match engine {
            EngineId::Fixture => {
                let bundle_dir = config
                    .engines
                    .fixture
                    .bundle_dir
                    .clone()
                    .ok_or_else(|| EngineError::Fixture("no bundle_dir configured".into()))?;
                if !bundle_dir.is_dir() {
                    return Err(EngineError::Fixture(format!(
                        "bundle_dir {} is not a directory",
                        bundle_dir.display()
                    )));
                }
                Flavor::Fixture { bundle_dir }
            }
            live => {
                let entry = config.engine(live);
                let client = reqwest::Client::builder()
                    .timeout(Duration::from_secs(config.engines.timeout_secs))
                    .build()
                    .map_err(|e| EngineError::Network {
                        engine: live,
                        reason: e.to_string(),
                    })?;
                Flavor::Live {
                    endpoint: entry.endpoint.clone(),
                    client,
                }
            }
        };
        Ok(Self {
            engine,
            upload_limit: config.upload_limit(engine),
            flavor,
        })
    }

    pub fn version(&self) -> &'static str {
        parsers::adapter_version(self.engine)
    }

    fn is_live(&self) -> bool {
        matches!(self.flavor, Flavor::Live { .. })
    }

    /// Uploads one anonymized image and returns the raw body pages per
    /// kind, in [`ResultKind::ALL`] order.
    pub async fn submit(
        &self,
        artifact: &UploadArtifact,
    ) -> Result<Vec<(ResultKind, Vec<Vec<u8>>)>, EngineError> {
        if artifact.size_bytes > self.upload_limit {
            return Err(EngineError::UploadRejected {
                engine: self.engine,
                reason: format!(
                    "{} bytes exceeds the {}-byte limit",
                    artifact.size_bytes, self.upload_limit
                ),
            });
        }
        match &self.flavor {
            Flavor::Live { endpoint, client } => {
                let bytes = artifact.bytes().map_err(|e| EngineError::Prepare {
                    query_id: artifact.content_digest.clone(),
                    reason: e.to_string(),
                })?;
                let part = reqwest::multipart::Part::bytes(bytes)
                    .file_name(artifact.file_name.clone());
                let form =
                    reqwest::multipart::Form::new().part(self.engine.upload_field(), part);
                let response = client
                    .post(endpoint)
                    .multipart(form)
                    .send()
                    .await
                    .map_err(|e| EngineError::Network {
                        engine: self.engine,
                        reason: e.to_string(),
                    })?;
                let status = response.status();
                if status.as_u16() == 429 {
                    return Err(EngineError::RateLimited(self.engine));
                }
                if status.is_client_error() {
                    return Err(EngineError::UploadRejected {
                        engine: self.engine,
                        reason: format!("HTTP {status}"),
                    });
                }
                if !status.is_success() {
                    return Err(EngineError::Network {
                        engine: self.engine,
                        reason: format!("HTTP {status}"),
                    });
                }
                let body = response.bytes().await.map_err(|e| EngineError::Network {
                    engine: self.engine,
                    reason: e.to_string(),
                })?;
                // The landing page carries both kinds; archive it under
                // each so every kind's bundle is self-contained.
                Ok(ResultKind::ALL
                    .iter()
                    .map(|kind| (*kind, vec![body.to_vec()]))
                    .collect())
            }
            Flavor::Fixture { bundle_dir } => {
                let dir = bundle_dir.join(&artifact.content_digest);
                let mut pages = Vec::new();
                for kind in ResultKind::ALL {
                    let path = dir.join(format!("{}.json", kind.as_str()));
                    let body = match std::fs::read(&path) {
                        Ok(bytes) => bytes,
                        // Unknown digest or kind: an empty result page.
                        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                            parsers::fixture_body(&[])
                        }
                        Err(e) => {
                            return Err(EngineError::Fixture(format!(
                                "cannot read {}: {e}",
                                path.display()
                            )));
                        }
                    };
                    pages.push((kind, vec![body]));
                }
                Ok(pages)
            }
        }
    }
}

/// Positions, caps, and flags raw results into final records.
pub fn to_records(
    query_id: &str,
    engine: EngineId,
    kind: ResultKind,
    captured_at: DateTime<Utc>,
    raws: Vec<RawSer>,
) -> Vec<SearchResultRecord> {
    raws.into_iter()
        .take(MAX_RESULTS)
        .enumerate()
        .map(|(i, raw)| {
            let mut missing = Vec::new();
            for (name, value) in [
                ("ser_url", &raw.ser_url),
                ("page_url", &raw.page_url),
                ("image_url", &raw.image_url),
                ("thumbnail_url", &raw.thumbnail_url),
            ] {
                if value.is_empty() {
                    missing.push(name.to_string());
                }
            }
            SearchResultRecord {
                query_id: query_id.to_string(),
                engine,
                kind,
                position: (i + 1) as u32,
                ser_url: raw.ser_url,
                page_url: raw.page_url,
                image_url: raw.image_url,
                thumbnail_url: raw.thumbnail_url,
                missing_fields: missing,
                captured_at,
            }
        })
        .collect()
}

fn bundle_dir(run: &Run, engine: EngineId, query_id: &str) -> PathBuf {
    run.raw_dir().join(engine.as_str()).join(query_id)
}

fn meta_path(dir: &Path) -> PathBuf {
    dir.join("meta.json")
}

fn read_meta(dir: &Path) -> Option<BundleMeta> {
    let bytes = std::fs::read(meta_path(dir)).ok()?;
    serde_json::from_slice(&bytes).ok()
}

fn write_bundle(
    dir: &Path,
    meta: &BundleMeta,
    pages: &[(ResultKind, Vec<Vec<u8>>)],
) -> Result<(), EngineError> {
    for (kind, bodies) in pages {
        let kind_dir = dir.join(kind.as_str());
        std::fs::create_dir_all(&kind_dir)?;
        for (i, body) in bodies.iter().enumerate() {
            store::write_atomic(&kind_dir.join(format!("page-{}", i + 1)), body)?;
        }
    }
    store::write_atomic(&meta_path(dir), &serde_json::to_vec_pretty(meta)?)?;
    Ok(())
}

fn read_pages(dir: &Path, kind: ResultKind) -> Result<Vec<Vec<u8>>, EngineError> {
    let kind_dir = dir.join(kind.as_str());
    let mut numbered = Vec::new();
    let entries = match std::fs::read_dir(&kind_dir) {
        Ok(entries) => entries,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    for entry in entries {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(n) = name.strip_prefix("page-").and_then(|s| s.parse::<u32>().ok()) {
            numbered.push((n, entry.path()));
        }
    }
    numbered.sort_by_key(|(n, _)| *n);
    numbered
        .into_iter()
        .map(|(_, path)| std::fs::read(&path).map_err(EngineError::from))
        .collect()
}

pub struct SubmitOutcome {
    pub submitted: usize,
    pub resumed: usize,
    pub records: usize,
    pub failures: Vec<FailedQuery>,
}

/// Runs the submission stage: every enabled engine receives every corpus
/// image (engines in parallel, queries per engine strictly in sequence
/// with the politeness delay), bundles are archived, and `sers.log` is
/// derived from the archive.
pub async fn submit_run(
    config: &HarnessConfig,
    run: &Run,
    images: &[CorpusImage],
) -> Result<SubmitOutcome, EngineError> {
    let engines = config.enabled_engines();
    let mut tasks = Vec::new();
    for engine in &engines {
        let adapter = Adapter::from_config(config, *engine)?;
        tasks.push(engine_task(config, run, adapter, images));
    }
    let results = future::join_all(tasks).await;

    let mut submitted = 0;
    let mut resumed = 0;
    let mut failures = Vec::new();
    for result in results {
        let (engine_submitted, engine_resumed, engine_failures) = result?;
        submitted += engine_submitted;
        resumed += engine_resumed;
        failures.extend(engine_failures);
    }

    let mut upload_failures = store::LogWriter::open(&run.failures_log())?;
    failures.sort_by(|a, b| {
        (a.engine.as_str(), &a.query_id).cmp(&(b.engine.as_str(), &b.query_id))
    });
    for failure in &failures {
        upload_failures.append(failure)?;
    }

    let (records, parse_failures) = parse_archive(run)?;
    write_sers_log(run, &records)?;
    write_parse_failures(run, &parse_failures)?;
    failures.extend(parse_failures);

    Ok(SubmitOutcome {
        submitted,
        resumed,
        records: records.len(),
        failures,
    })
}

async fn engine_task(
    config: &HarnessConfig,
    run: &Run,
    adapter: Adapter,
    images: &[CorpusImage],
) -> Result<(usize, usize, Vec<FailedQuery>), EngineError> {
    let mut submitted = 0;
    let mut resumed = 0;
    let mut failures = Vec::new();
    let mut first = true;
    for image in images {
        let dir = bundle_dir(run, adapter.engine, &image.id);
        if let Some(meta) = read_meta(&dir) {
            if meta.content_digest == image.content_digest
                && meta.adapter_version == adapter.version()
            {
                resumed += 1;
                continue;
            }
        }
        let artifact = match corpus::anonymize_for_upload(&config.paths.corpus_dir, image) {
            Ok(artifact) => artifact,
            Err(e) => {
                failures.push(FailedQuery {
                    query_id: image.id.clone(),
                    engine: adapter.engine,
                    stage: FailStage::Upload,
                    kind: None,
                    error: e.to_string(),
                    at: time::now(),
                });
                continue;
            }
        };
        if adapter.is_live() && !first {
            politeness_pause(config).await;
        }
        first = false;
        match submit_with_retries(config, &adapter, &artifact).await {
            Ok(pages) => {
                let meta = BundleMeta {
                    engine: adapter.engine,
                    query_id: image.id.clone(),
                    content_digest: image.content_digest.clone(),
                    adapter_version: adapter.version().to_string(),
                    captured_at: time::now(),
                    kinds: pages.iter().map(|(k, _)| *k).collect(),
                };
                write_bundle(&dir, &meta, &pages)?;
                submitted += 1;
            }
            Err(e) => {
                failures.push(FailedQuery {
                    query_id: image.id.clone(),
                    engine: adapter.engine,
                    stage: FailStage::Upload,
                    kind: None,
                    error: e.to_string(),
                    at: time::now(),
                });
            }
        }
    }
    Ok((submitted, resumed, failures))
}

async fn politeness_pause(config: &HarnessConfig) {
    let jitter = if config.engines.jitter_ms > 0 {
        rand::rng().random_range(0..=config.engines.jitter_ms)
    } else {
        0
    };
    let total = config.engines.politeness_delay_ms + jitter;
    if total > 0 {
        tokio::time::sleep(Duration::from_millis(total)).await;
    }
}

async fn submit_with_retries(
    config: &HarnessConfig,
    adapter: &Adapter,
    artifact: &UploadArtifact,
) -> Result<Vec<(ResultKind, Vec<Vec<u8>>)>, EngineError> {
    let mut attempt = 0;
    loop {
        match adapter.submit(artifact).await {
            Ok(pages) => return Ok(pages),
            Err(e @ (EngineError::RateLimited(_) | EngineError::Network { .. }))
                if attempt < config.engines.max_retries =>
            {
                let backoff = Duration::from_millis(
                    config.engines.politeness_delay_ms.max(250) << attempt.min(6),
                );
                tracing::warn!(engine = %adapter.engine.as_str(), attempt, error = %e, "retrying upload");
                tokio::time::sleep(backoff).await;
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Parses every complete bundle in the archive into records, in
/// canonical order. Parse failures become [`FailedQuery`] entries with
/// the bundle's own timestamp, so re-parsing is deterministic.
pub fn parse_archive(
    run: &Run,
) -> Result<(Vec<SearchResultRecord>, Vec<FailedQuery>), EngineError> {
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let raw = run.raw_dir();
    let engine_dirs = sorted_dirs(&raw)?;
    for (engine_name, engine_dir) in engine_dirs {
        let Some(engine) = EngineId::parse(&engine_name) else {
            continue;
        };
        for (_, query_dir) in sorted_dirs(&engine_dir)? {
            let Some(meta) = read_meta(&query_dir) else {
                // No completion marker: a half-written bundle, refetched
                // on the next submit.
                continue;
            };
            let expected = parsers::adapter_version(engine);
            if meta.adapter_version != expected {
                return Err(EngineError::AdapterVersion {
                    found: meta.adapter_version,
                    expected: expected.to_string(),
                });
            }
            for kind in &meta.kinds {
                let pages = read_pages(&query_dir, *kind)?;
                let mut raws = Vec::new();
                let mut failed = None;
                for body in &pages {
                    match parsers::parse_body(engine, *kind, body) {
                        Ok(mut page_raws) => raws.append(&mut page_raws),
                        Err(reason) => {
                            failed = Some(reason);
                            break;
                        }
                    }
                }
                match failed {
                    Some(reason) => failures.push(FailedQuery {
                        query_id: meta.query_id.clone(),
                        engine,
                        stage: FailStage::Parse,
                        kind: Some(*kind),
                        error: reason,
                        at: meta.captured_at,
                    }),
                    None => records.extend(to_records(
                        &meta.query_id,
                        engine,
                        *kind,
                        meta.captured_at,
                        raws,
                    )),
                }
            }
        }
    }
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    failures.sort_by(|a, b| {
        (a.engine.as_str(), &a.query_id, a.kind.map(|k| k.as_str()))
            .cmp(&(b.engine.as_str(), &b.query_id, b.kind.map(|k| k.as_str())))
    });
    Ok((records, failures))
}

fn sorted_dirs(path: &Path) -> Result<Vec<(String, PathBuf)>, EngineError> {
    let mut dirs = Vec::new();
    let entries = match std::fs::read_dir(path) {
        Ok(entries) => entries,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(dirs),
        Err(e) => return Err(e.into()),
    };
    for entry in entries {
        let entry = entry?;
        if entry.file_type()?.is_dir() {
            dirs.push((entry.file_name().to_string_lossy().into_owned(), entry.path()));
        }
    }
    dirs.sort();
    Ok(dirs)
}

fn write_sers_log(run: &Run, records: &[SearchResultRecord]) -> Result<(), EngineError> {
    let mut out = Vec::new();
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.push(b'\n');
    }
    store::write_atomic(&run.sers_log(), &out)?;
    Ok(())
}

fn write_parse_failures(run: &Run, failures: &[FailedQuery]) -> Result<(), EngineError> {
    store::write_atomic(
        &run.root().join("parse_failures.json"),
        &serde_json::to_vec_pretty(failures)?,
    )?;
    Ok(())
}

/// Re-derives `sers.log` (and the parse-failure sidecar) from the
/// archived bundles without touching the network. Byte-identical output
/// for an unchanged archive.
pub fn reparse_run(run: &Run) -> Result<usize, EngineError> {
    let (records, parse_failures) = parse_archive(run)?;
    write_sers_log(run, &records)?;
    write_parse_failures(run, &parse_failures)?;
    Ok(records.len())
}

/// Reads the derived SER log back.
pub fn read_sers(run: &Run) -> Result<Vec<SearchResultRecord>, EngineError> {
    Ok(store::read_log(&run.sers_log())?)
}
