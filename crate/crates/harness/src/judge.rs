//! Judging: download result thumbnails, hash them, and classify each SER
//! as the same image as its query or not.
//!
//! Thumbnails are cached content-addressed under `thumbs/` with a fetch
//! journal, so re-judging (new thresholds, extra methods) touches the
//! network only for URLs never seen before. Query and thumbnail hashes
//! are memoized in JSON caches. The judgment log is written in one
//! atomic pass, sorted by (query_id, engine, kind, position, method).

use futures::stream::{self, StreamExt};
use riseval_hash::{
    hamming, normalized_l2, phash, vishash, DistanceThreshold, GrayImage, HashValue,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::time::Duration;
use thiserror::Error;

use crate::config::HarnessConfig;
use crate::corpus::CorpusImage;
use crate::engines::SearchResultRecord;
use crate::store::{self, LogWriter, Run, StoreError};
use crate::time;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Method {
    #[serde(rename = "phash")]
    PHash,
    #[serde(rename = "vishash")]
    VisHash,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::PHash, Method::VisHash];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::PHash => "phash",
            Method::VisHash => "vishash",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "phash" => Some(Method::PHash),
            "vishash" => Some(Method::VisHash),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgeFailure {
    None,
    DownloadFailed,
    DecodeFailed,
    HashFailed,
}

impl JudgeFailure {
    pub fn as_str(&self) -> &'static str {
        match self {
            JudgeFailure::None => "none",
            JudgeFailure::DownloadFailed => "download_failed",
            JudgeFailure::DecodeFailed => "decode_failed",
            JudgeFailure::HashFailed => "hash_failed",
        }
    }
}

/// Hash distance in the method's own unit: Hamming bits for pHash,
/// normalized L2 for VisHash.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Distance {
    Bits(u32),
    Norm(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Judgment {
    pub query_id: String,
    pub engine: crate::engines::EngineId,
    pub kind: crate::engines::ResultKind,
    pub position: u32,
    pub method: Method,
    /// Absent whenever `failure != None`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<Distance>,
    pub relevant: bool,
    pub failure: JudgeFailure,
}

impl Judgment {
    /// Canonical log order: record reference, then method.
    pub fn sort_key(&self) -> (&str, &'static str, &'static str, u32, &'static str) {
        (
            &self.query_id,
            self.engine.as_str(),
            self.kind.as_str(),
            self.position,
            self.method.as_str(),
        )
    }
}

#[derive(Debug, Error)]
pub enum JudgeError {
    #[error("invalid judge settings: {0}")]
    Config(String),
    #[error("cannot build HTTP client: {0}")]
    Client(String),
    #[error("SER record references unknown query {0}")]
    MissingQuery(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Failure statistics for one judging pass, persisted as
/// `judge_summary.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JudgeSummary {
    pub records: usize,
    pub judgments: usize,
    pub methods: Vec<Method>,
    pub failure_counts: BTreeMap<String, usize>,
    pub failure_percent: BTreeMap<String, f64>,
}

/// Persistent hash memo: content digest → stored hash per method. Only
/// successful hashes are stored; failures are recomputed.
#[derive(Debug, Default, Serialize, Deserialize)]
struct StoredHashes {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phash: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vishash: Option<Vec<f64>>,
}

pub struct HashCache {
    path: PathBuf,
    entries: BTreeMap<String, StoredHashes>,
    dirty: bool,
}

impl HashCache {
    pub fn open(path: PathBuf) -> Result<Self, JudgeError> {
        let entries = match std::fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(Self {
            path,
            entries,
            dirty: false,
        })
    }

    pub fn get(&self, digest: &str, method: Method) -> Option<HashValue> {
        let stored = self.entries.get(digest)?;
        match method {
            Method::PHash => stored.phash.map(|bits| {
                HashValue::Bits(riseval_hash::BitHash64::from_u64(
                    riseval_hash::BitAlgorithm::PHash,
                    bits,
                ))
            }),
            Method::VisHash => stored.vishash.clone().and_then(|values| {
                riseval_hash::FeatureVector::new(values)
                    .ok()
                    .map(HashValue::Features)
            }),
        }
    }

    pub fn put(&mut self, digest: &str, method: Method, value: &HashValue) {
        let entry = self.entries.entry(digest.to_string()).or_default();
        match (method, value) {
            (Method::PHash, HashValue::Bits(h)) => entry.phash = Some(h.as_u64()),
            (Method::VisHash, HashValue::Features(f)) => {
                entry.vishash = Some(f.values().to_vec())
            }
            _ => return,
        }
        self.dirty = true;
    }

    pub fn save(&mut self) -> Result<(), JudgeError> {
        if !self.dirty {
            return Ok(());
        }
        store::write_atomic(&self.path, &serde_json::to_vec(&self.entries)?)?;
        self.dirty = false;
        Ok(())
    }
}

pub fn query_hash_cache_path(corpus_dir: &Path) -> PathBuf {
    corpus_dir.join("hash_cache.json")
}

/// One fetch journal line.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct FetchRecord {
    url: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    digest: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(with = "time::ts")]
    at: chrono::DateTime<chrono::Utc>,
}

/// Content-addressed thumbnail store under `thumbs/` with a journal
/// (`thumbs/fetch.log`) making fetches idempotent across runs.
pub struct ThumbStore {
    dir: PathBuf,
    outcomes: HashMap<String, Result<String, String>>,
}

impl ThumbStore {
    pub fn open(run: &Run) -> Result<Self, JudgeError> {
        let dir = run.thumbs_dir();
        std::fs::create_dir_all(&dir)?;
        let mut outcomes = HashMap::new();
        let journal: Vec<FetchRecord> = store::read_log(&dir.join("fetch.log"))?;
        for record in journal {
            let outcome = match (record.digest, record.error) {
                (Some(digest), _) => Ok(digest),
                (None, Some(error)) => Err(error),
                (None, None) => continue,
            };
            outcomes.insert(record.url, outcome);
        }
        Ok(Self { dir, outcomes })
    }

    pub fn outcome(&self, url: &str) -> Option<&Result<String, String>> {
        self.outcomes.get(url)
    }

    pub fn bytes(&self, digest: &str) -> std::io::Result<Vec<u8>> {
        std::fs::read(self.dir.join(digest))
    }

    /// Fetches every URL not already journaled, with bounded parallelism,
    /// and appends the outcomes in input order.
    pub async fn fetch_missing(
        &mut self,
        config: &HarnessConfig,
        urls: &[String],
    ) -> Result<(), JudgeError> {
        let pending: Vec<String> = urls
            .iter()
            .filter(|u| !u.is_empty() && !self.outcomes.contains_key(*u))
            .cloned()
            .collect();
        if pending.is_empty() {
            return Ok(());
        }
        let client = reqwest::Client::builder()
            .timeout(Duration::from_secs(config.judge.timeout_secs))
            .build()
            .map_err(|e| JudgeError::Client(e.to_string()))?;
        let retries = config.judge.retries;
        let client_ref = &client;
        let fetched: Vec<(String, Result<Vec<u8>, String>)> =
            stream::iter(pending.into_iter().map(|url| async move {
                let body = fetch_url(client_ref, &url, retries).await;
                (url, body)
            }))
            .buffered(config.judge.parallelism.max(1))
            .collect()
            .await;

        let mut journal = LogWriter::open(&self.dir.join("fetch.log"))?;
        for (url, body) in fetched {
            let outcome = match body {
                Ok(bytes) => {
                    let digest = store::sha256_bytes(&bytes);
                    let path = self.dir.join(&digest);
                    if !path.exists() {
                        store::write_atomic(&path, &bytes)?;
                    }
                    Ok(digest)
                }
                Err(reason) => Err(reason),
            };
            journal.append(&FetchRecord {
                url: url.clone(),
                digest: outcome.as_ref().ok().cloned(),
                error: outcome.as_ref().err().cloned(),
                at: time::now(),
            })?;
            self.outcomes.insert(url, outcome);
        }
        Ok(())
    }
}

async fn fetch_url(
    client: &reqwest::Client,
    url: &str,
    retries: u32,
) -> Result<Vec<u8>, String> {
    if let Some(path) = url.strip_prefix("file://") {
        return std::fs::read(path).map_err(|e| e.to_string());
    }
    let mut attempt = 0;
    loop {
        let reason = match client.get(url).send().await {
            Ok(resp) if resp.status().is_success() => {
                return resp
                    .bytes()
                    .await
                    .map(|b| b.to_vec())
                    .map_err(|e| e.to_string());
            }
            Ok(resp) if resp.status().is_client_error() => {
                return Err(format!("HTTP {}", resp.status()));
            }
            Ok(resp) => format!("HTTP {}", resp.status()),
            Err(e) => e.to_string(),
        };
        if attempt >= retries {
            return Err(reason);
        }
        tokio::time::sleep(Duration::from_millis(200 << attempt.min(6))).await;
        attempt += 1;
    }
}

/// Decodes arbitrary image bytes to the grayscale raster the hash
/// algorithms take, compositing any alpha over white.
pub fn decode_gray(bytes: &[u8]) -> Result<GrayImage, String> {
    let decoded = image::load_from_memory(bytes).map_err(|e| e.to_string())?;
    let rgba = decoded.to_rgba8();
    GrayImage::from_rgba8(rgba.width(), rgba.height(), rgba.as_raw())
        .map_err(|e| e.to_string())
}

fn compute_hash(method: Method, img: &GrayImage) -> Result<HashValue, String> {
    match method {
        Method::PHash => phash(img).map(HashValue::Bits).map_err(|e| e.to_string()),
        Method::VisHash => vishash(img)
            .map(HashValue::Features)
            .map_err(|e| e.to_string()),
    }
}

/// Distance and the relevance verdict under the configured thresholds
/// (inclusive on both).
fn measure(
    query: &HashValue,
    thumb: &HashValue,
    thresholds: &DistanceThreshold,
) -> Result<(Distance, bool), String> {
    match (query, thumb) {
        (HashValue::Bits(a), HashValue::Bits(b)) => {
            let d = hamming(a, b).map_err(|e| e.to_string())?;
            Ok((Distance::Bits(d), d <= thresholds.phash_bits))
        }
        (HashValue::Features(a), HashValue::Features(b)) => {
            let d = normalized_l2(a, b).map_err(|e| e.to_string())?;
            Ok((Distance::Norm(d), d <= thresholds.vishash_distance))
        }
        _ => Err("hash family mismatch".to_string()),
    }
}

fn failed(record: &SearchResultRecord, method: Method, failure: JudgeFailure) -> Judgment {
    Judgment {
        query_id: record.query_id.clone(),
        engine: record.engine,
        kind: record.kind,
        position: record.position,
        method,
        distance: None,
        relevant: false,
        failure,
    }
}

/// Judges every SER record in the run under every configured method.
/// Produces exactly records × methods judgments: failures become
/// non-relevant judgments, never omissions.
pub async fn judge_run(
    config: &HarnessConfig,
    run: &Run,
    images: &[CorpusImage],
) -> Result<JudgeSummary, JudgeError> {
    let thresholds = config
        .thresholds()
        .map_err(|e| JudgeError::Config(e.to_string()))?;
    let methods = config.methods();
    let records: Vec<SearchResultRecord> = store::read_log(&run.sers_log())?;

    let by_id: HashMap<&str, &CorpusImage> =
        images.iter().map(|img| (img.id.as_str(), img)).collect();
    for record in &records {
        if !by_id.contains_key(record.query_id.as_str()) {
            return Err(JudgeError::MissingQuery(record.query_id.clone()));
        }
    }

    let mut thumbs = ThumbStore::open(run)?;
    let urls: Vec<String> = records
        .iter()
        .map(|r| r.thumbnail_url.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    thumbs.fetch_missing(config, &urls).await?;

    let mut query_cache = HashCache::open(query_hash_cache_path(&config.paths.corpus_dir))?;
    let mut thumb_cache = HashCache::open(run.thumbs_dir().join("hash_cache.json"))?;

    // Runtime memos; keyed by content digest so byte-identical images
    // are decoded and hashed once.
    let mut query_gray: HashMap<String, Result<GrayImage, String>> = HashMap::new();
    let mut query_hashes: HashMap<(String, Method), Result<HashValue, String>> = HashMap::new();
    let mut thumb_gray: HashMap<String, Result<GrayImage, String>> = HashMap::new();
    let mut thumb_hashes: HashMap<(String, Method), Result<HashValue, JudgeFailure>> =
        HashMap::new();

    let mut judgments = Vec::with_capacity(records.len() * methods.len());
    for record in &records {
        let image = by_id[record.query_id.as_str()];
        for method in &methods {
            let method = *method;
            let thumb_digest = match thumbs.outcome(&record.thumbnail_url) {
                Some(Ok(digest)) => digest.clone(),
                _ => {
                    judgments.push(failed(record, method, JudgeFailure::DownloadFailed));
                    continue;
                }
            };

            let query_key = (image.content_digest.clone(), method);
            if !query_hashes.contains_key(&query_key) {
                let value = match query_cache.get(&image.content_digest, method) {
                    Some(hash) => Ok(hash),
                    None => {
                        let gray = query_gray
                            .entry(image.content_digest.clone())
                            .or_insert_with(|| {
                                std::fs::read(config.paths.corpus_dir.join(&image.local_path))
                                    .map_err(|e| e.to_string())
                                    .and_then(|bytes| decode_gray(&bytes))
                            });
                        match gray {
                            Ok(img) => match compute_hash(method, img) {
                                Ok(hash) => {
                                    query_cache.put(&image.content_digest, method, &hash);
                                    Ok(hash)
                                }
                                Err(e) => Err(e),
                            },
                            Err(e) => Err(e.clone()),
                        }
                    }
                };
                query_hashes.insert(query_key.clone(), value);
            }
            let query_hash = match &query_hashes[&query_key] {
                Ok(hash) => hash.clone(),
                Err(_) => {
                    judgments.push(failed(record, method, JudgeFailure::HashFailed));
                    continue;
                }
            };

            let thumb_key = (thumb_digest.clone(), method);
            if !thumb_hashes.contains_key(&thumb_key) {
                let value = match thumb_cache.get(&thumb_digest, method) {
                    Some(hash) => Ok(hash),
                    None => {
                        let gray = thumb_gray.entry(thumb_digest.clone()).or_insert_with(|| {
                            thumbs
                                .bytes(&thumb_digest)
                                .map_err(|e| e.to_string())
                                .and_then(|bytes| decode_gray(&bytes))
                        });
                        match gray {
                            Ok(img) => match compute_hash(method, img) {
                                Ok(hash) => {
                                    thumb_cache.put(&thumb_digest, method, &hash);
                                    Ok(hash)
                                }
                                Err(_) => Err(JudgeFailure::HashFailed),
                            },
                            Err(_) => Err(JudgeFailure::DecodeFailed),
                        }
                    }
                };
                thumb_hashes.insert(thumb_key.clone(), value);
            }
            let thumb_hash = match &thumb_hashes[&thumb_key] {
                Ok(hash) => hash.clone(),
                Err(failure) => {
                    judgments.push(failed(record, method, *failure));
                    continue;
                }
            };

            match measure(&query_hash, &thumb_hash, &thresholds) {
                Ok((distance, relevant)) => judgments.push(Judgment {
                    query_id: record.query_id.clone(),
                    engine: record.engine,
                    kind: record.kind,
                    position: record.position,
                    method,
                    distance: Some(distance),
                    relevant,
                    failure: JudgeFailure::None,
                }),
                Err(_) => judgments.push(failed(record, method, JudgeFailure::HashFailed)),
            }
        }
    }

    query_cache.save()?;
    thumb_cache.save()?;

    judgments.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let mut out = Vec::new();
    for judgment in &judgments {
        serde_json::to_writer(&mut out, judgment)?;
        out.push(b'\n');
    }
    store::write_atomic(&run.judgments_log(), &out)?;

    let summary = summarize(records.len(), &methods, &judgments);
    store::write_atomic(
        &run.root().join("judge_summary.json"),
        &serde_json::to_vec_pretty(&summary)?,
    )?;
    Ok(summary)
}

fn summarize(records: usize, methods: &[Method], judgments: &[Judgment]) -> JudgeSummary {
    let mut failure_counts = BTreeMap::new();
    for judgment in judgments {
        if judgment.failure != JudgeFailure::None {
            *failure_counts
                .entry(judgment.failure.as_str().to_string())
                .or_insert(0) += 1;
        }
    }
    let total = judgments.len();
    let failure_percent = failure_counts
        .iter()
        .map(|(k, v)| {
            let pct = if total == 0 {
                0.0
            } else {
                *v as f64 * 100.0 / total as f64
            };
            (k.clone(), pct)
        })
        .collect();
    JudgeSummary {
        records,
        judgments: total,
        methods: methods.to_vec(),
        failure_counts,
        failure_percent,
    }
}

pub fn read_judgments(run: &Run) -> Result<Vec<Judgment>, JudgeError> {
    Ok(store::read_log(&run.judgments_log())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::{EngineId, ResultKind};

    #[test]
    fn method_names_round_trip() {
        for method in Method::ALL {
            assert_eq!(Method::parse(method.as_str()), Some(method));
        }
        assert_eq!(Method::parse("md5"), None);
        assert_eq!(serde_json::to_string(&Method::PHash).unwrap(), "\"phash\"");
        assert_eq!(
            serde_json::to_string(&Method::VisHash).unwrap(),
            "\"vishash\""
        );
    }

    #[test]
    fn distance_serialization_distinguishes_units() {
        let bits = serde_json::to_string(&Distance::Bits(5)).unwrap();
        assert_eq!(bits, "5");
        assert_eq!(
            serde_json::from_str::<Distance>(&bits).unwrap(),
            Distance::Bits(5)
        );
        let norm = serde_json::to_string(&Distance::Norm(0.3)).unwrap();
        assert_eq!(norm, "0.3");
        assert_eq!(
            serde_json::from_str::<Distance>(&norm).unwrap(),
            Distance::Norm(0.3)
        );
        // A whole-valued norm keeps its decimal point and round-trips as
        // a norm, not as bits.
        let zero = serde_json::to_string(&Distance::Norm(0.0)).unwrap();
        assert_eq!(zero, "0.0");
        assert_eq!(
            serde_json::from_str::<Distance>(&zero).unwrap(),
            Distance::Norm(0.0)
        );
    }

    #[test]
    fn failed_judgment_shape() {
        let record = SearchResultRecord {
            query_id: "img-1".into(),
            engine: EngineId::Bing,
            kind: ResultKind::SimilarTo,
            position: 3,
            ser_url: "s".into(),
            page_url: "p".into(),
            image_url: "i".into(),
            thumbnail_url: String::new(),
            missing_fields: vec!["thumbnail_url".into()],
            captured_at: time::now(),
        };
        let judgment = failed(&record, Method::PHash, JudgeFailure::DownloadFailed);
        assert!(!judgment.relevant);
        assert!(judgment.distance.is_none());
        assert_eq!(judgment.failure, JudgeFailure::DownloadFailed);
        let line = serde_json::to_string(&judgment).unwrap();
        assert!(!line.contains("distance"));
        assert!(line.contains("\"failure\":\"download_failed\""));
    }

    #[test]
    fn summary_reports_counts_and_percentages() {
        let record = |failure| Judgment {
            query_id: "q".into(),
            engine: EngineId::Baidu,
            kind: ResultKind::PagesWith,
            position: 1,
            method: Method::PHash,
            distance: None,
            relevant: false,
            failure,
        };
        let judgments = vec![
            record(JudgeFailure::None),
            record(JudgeFailure::None),
            record(JudgeFailure::None),
            record(JudgeFailure::DownloadFailed),
        ];
        let summary = summarize(4, &[Method::PHash], &judgments);
        assert_eq!(summary.judgments, 4);
        assert_eq!(summary.failure_counts["download_failed"], 1);
        assert_eq!(summary.failure_percent["download_failed"], 25.0);
    }

    #[test]
    fn hash_cache_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hash_cache.json");
        let mut cache = HashCache::open(path.clone()).unwrap();
        assert!(cache.get("d1", Method::PHash).is_none());
        let value = HashValue::Bits(riseval_hash::BitHash64::from_u64(
            riseval_hash::BitAlgorithm::PHash,
            0xDEAD_BEEF_u64,
        ));
        cache.put("d1", Method::PHash, &value);
        let features =
            HashValue::Features(riseval_hash::FeatureVector::new(vec![0.25, -0.5, 0.1]).unwrap());
        cache.put("d1", Method::VisHash, &features);
        cache.save().unwrap();

        let reopened = HashCache::open(path).unwrap();
        assert_eq!(reopened.get("d1", Method::PHash), Some(value));
        assert_eq!(reopened.get("d1", Method::VisHash), Some(features));
        assert!(reopened.get("d2", Method::PHash).is_none());
    }

    #[test]
    fn decode_gray_handles_failures_and_alpha() {
        assert!(decode_gray(b"definitely not an image").is_err());
        // A 1x1 transparent PNG should composite to white.
        let mut png = Vec::new();
        let img = image::RgbaImage::from_pixel(1, 1, image::Rgba([0, 0, 0, 0]));
        image::DynamicImage::ImageRgba8(img)
            .write_to(&mut std::io::Cursor::new(&mut png), image::ImageFormat::Png)
            .unwrap();
        let gray = decode_gray(&png).unwrap();
        assert_eq!(gray.pixels(), &[255.0]);
    }
}
