//! Corpus acquisition: search the media repository per category term,
//! download 640px renditions, and compact the append-only manifest into
//! a deduplicated snapshot.
//!
//! Layout under the corpus directory:
//!
//! ```text
//! corpus/
//!   manifest.log    one record per downloaded rendition (append-only)
//!   failures.log    downloads that failed, with reasons
//!   corpus.json     deduplicated snapshot (written atomically)
//!   files/          content-addressed renditions, <digest>.<ext>
//! ```

use chrono::{DateTime, Utc};
use futures::stream::{self, StreamExt};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};
use std::time::Duration;
use tempfile::TempDir;
use thiserror::Error;

use crate::config::HarnessConfig;
use crate::store::{self, LogWriter, StoreError};
use crate::time;

/// Search category; the category name doubles as the search term.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Diagram,
    Schematic,
    Photo,
    Photograph,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Diagram,
        Category::Schematic,
        Category::Photo,
        Category::Photograph,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Diagram => "diagram",
            Category::Schematic => "schematic",
            Category::Photo => "photo",
            Category::Photograph => "photograph",
        }
    }

    pub fn parse(s: &str) -> Option<Category> {
        match s {
            "diagram" => Some(Category::Diagram),
            "schematic" => Some(Category::Schematic),
            "photo" => Some(Category::Photo),
            "photograph" => Some(Category::Photograph),
            _ => None,
        }
    }

    pub fn image_class(&self) -> ImageClass {
        match self {
            Category::Diagram | Category::Schematic => ImageClass::Abstract,
            Category::Photo | Category::Photograph => ImageClass::Natural,
        }
    }
}

/// Rollup of categories: diagrams and schematics are abstract imagery,
/// photos and photographs are natural imagery.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum ImageClass {
    Abstract,
    Natural,
}

impl ImageClass {
    pub const ALL: [ImageClass; 2] = [ImageClass::Abstract, ImageClass::Natural];

    pub fn as_str(&self) -> &'static str {
        match self {
            ImageClass::Abstract => "abstract",
            ImageClass::Natural => "natural",
        }
    }

    pub fn members(&self) -> &'static [Category] {
        match self {
            ImageClass::Abstract => &[Category::Diagram, Category::Schematic],
            ImageClass::Natural => &[Category::Photo, Category::Photograph],
        }
    }
}

/// One corpus entry. In `manifest.log` each line carries the single
/// category it was fetched under; after [`dedupe`] the categories of
/// byte-identical files are merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusImage {
    pub id: String,
    pub categories: Vec<Category>,
    pub source_page_url: String,
    pub file_url: String,
    /// Path relative to the corpus directory.
    pub local_path: String,
    pub width: u32,
    pub height: u32,
    pub content_digest: String,
    #[serde(with = "time::ts")]
    pub fetched_at: DateTime<Utc>,
}

pub fn image_id(content_digest: &str) -> String {
    format!("img-{}", &content_digest[..16.min(content_digest.len())])
}

#[derive(Debug, Error)]
pub enum AcquireError {
    #[error("media API unavailable: {0}")]
    ApiUnavailable(String),
    #[error("unexpected API response: {0}")]
    BadResponse(String),
    #[error("cannot build HTTP client: {0}")]
    Client(reqwest::Error),
    #[error("no corpus snapshot at {0}; run acquire first")]
    MissingSnapshot(PathBuf),
    #[error("unrecognized image content for {0}")]
    UnknownContentType(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A download that failed; the run continues without the image.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AcquireFailure {
    pub category: Category,
    pub title: String,
    pub file_url: String,
    pub reason: String,
    #[serde(with = "time::ts")]
    pub at: DateTime<Utc>,
}

/// A search that returned fewer references than requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shortfall {
    pub category: Category,
    pub requested: usize,
    pub found: usize,
}

/// The deduplicated corpus, written to `corpus.json`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CorpusSnapshot {
    pub images: Vec<CorpusImage>,
    #[serde(default)]
    pub shortfalls: Vec<Shortfall>,
}

impl CorpusSnapshot {
    pub fn category_counts(&self) -> BTreeMap<Category, usize> {
        let mut counts = BTreeMap::new();
        for image in &self.images {
            for category in &image.categories {
                *counts.entry(*category).or_insert(0) += 1;
            }
        }
        counts
    }
}

pub struct AcquireOutcome {
    pub snapshot: CorpusSnapshot,
    pub failures: Vec<AcquireFailure>,
    /// Newly downloaded this invocation (0 on a fully resumed run).
    pub downloaded: usize,
}

/// Client for the MediaWiki-style `action=query` API.
pub struct MediaClient {
    http: reqwest::Client,
    api_url: String,
    retries: u32,
}

/// A scaled-rendition reference resolved through `prop=imageinfo`.
#[derive(Debug, Clone)]
pub struct ImageRef {
    pub title: String,
    pub source_page_url: String,
    pub file_url: String,
    pub width: u32,
    pub height: u32,
}

#[derive(Deserialize)]
struct SearchResponse {
    #[serde(default)]
    query: Option<SearchQuery>,
    #[serde(default, rename = "continue")]
    cont: Option<SearchContinue>,
}

#[derive(Deserialize)]
struct SearchQuery {
    #[serde(default)]
    search: Vec<SearchHit>,
}

#[derive(Deserialize)]
struct SearchHit {
    title: String,
}

#[derive(Deserialize)]
struct SearchContinue {
    sroffset: usize,
}

#[derive(Deserialize)]
struct InfoResponse {
    #[serde(default)]
    query: Option<InfoQuery>,
}

#[derive(Deserialize)]
struct InfoQuery {
    #[serde(default)]
    pages: BTreeMap<String, InfoPage>,
}

#[derive(Deserialize)]
struct InfoPage {
    title: String,
    #[serde(default)]
    imageinfo: Vec<InfoEntry>,
}

#[derive(Deserialize)]
struct InfoEntry {
    descriptionurl: String,
    thumburl: String,
    thumbwidth: u32,
    thumbheight: u32,
}

const API_PAGE: usize = 50;

impl MediaClient {
    pub fn new(api_base: &str, timeout: Duration, retries: u32) -> Result<Self, AcquireError> {
        let http = reqwest::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(AcquireError::Client)?;
        Ok(Self {
            http,
            api_url: format!("{}/w/api.php", api_base.trim_end_matches('/')),
            retries,
        })
    }

    async fn get_json<T: serde::de::DeserializeOwned>(
        &self,
        params: &[(&str, String)],
    ) -> Result<T, AcquireError> {
        let mut attempt = 0;
        loop {
            let reason = match self.http.get(&self.api_url).query(params).send().await {
                Ok(resp) if resp.status().is_success() => {
                    return resp
                        .json::<T>()
                        .await
                        .map_err(|e| AcquireError::BadResponse(e.to_string()));
                }
                Ok(resp) => format!("HTTP {}", resp.status()),
                Err(e) => e.to_string(),
            };
            if attempt >= self.retries {
                return Err(AcquireError::ApiUnavailable(format!(
                    "{reason} after {} attempts",
                    attempt + 1
                )));
            }
            tokio::time::sleep(Duration::from_millis(250 << attempt.min(6))).await;
            attempt += 1;
        }
    }

    /// The first `count` file titles for a term, in API order. Returns
    /// fewer when the term has fewer results.
    pub async fn search(&self, term: &str, count: usize) -> Result<Vec<String>, AcquireError> {
        let mut titles = Vec::new();
        let mut offset = 0usize;
        while titles.len() < count {
            let limit = API_PAGE.min(count - titles.len());
            let params = [
                ("action", "query".to_string()),
                ("format", "json".to_string()),
                ("list", "search".to_string()),
                ("srsearch", term.to_string()),
                ("srnamespace", "6".to_string()),
                ("srlimit", limit.to_string()),
                ("sroffset", offset.to_string()),
            ];
            let resp: SearchResponse = self.get_json(&params).await?;
            let hits = resp.query.map(|q| q.search).unwrap_or_default();
            if hits.is_empty() {
                break;
            }
            titles.extend(hits.into_iter().map(|h| h.title));
            match resp.cont {
                Some(c) => offset = c.sroffset,
                None => break,
            }
        }
        titles.truncate(count);
        Ok(titles)
    }

    /// Scaled-rendition URLs for a set of titles, keyed by full title.
    /// Titles without image info (deleted pages) are simply absent.
    pub async fn image_info(
        &self,
        titles: &[String],
        width: u32,
    ) -> Result<BTreeMap<String, ImageRef>, AcquireError> {
        let mut refs = BTreeMap::new();
        for chunk in titles.chunks(API_PAGE) {
            let params = [
                ("action", "query".to_string()),
                ("format", "json".to_string()),
                ("prop", "imageinfo".to_string()),
                ("iiprop", "url|size".to_string()),
                ("iiurlwidth", width.to_string()),
                ("titles", chunk.join("|")),
            ];
            let resp: InfoResponse = self.get_json(&params).await?;
            let pages = resp.query.map(|q| q.pages).unwrap_or_default();
            for page in pages.into_values() {
                let Some(info) = page.imageinfo.into_iter().next() else {
                    continue;
                };
                refs.insert(
                    page.title.clone(),
                    ImageRef {
                        title: page.title,
                        source_page_url: info.descriptionurl,
                        file_url: info.thumburl,
                        width: info.thumbwidth,
                        height: info.thumbheight,
                    },
                );
            }
        }
        Ok(refs)
    }

    async fn download(&self, url: &str) -> Result<Vec<u8>, String> {
        let mut attempt = 0;
        loop {
            let reason = match self.http.get(url).send().await {
                Ok(resp) if resp.status().is_success() => {
                    return resp
                        .bytes()
                        .await
                        .map(|b| b.to_vec())
                        .map_err(|e| e.to_string());
                }
                // Client errors are permanent; do not hammer the server.
                Ok(resp) if resp.status().is_client_error() => {
                    return Err(format!("HTTP {}", resp.status()));
                }
                Ok(resp) => format!("HTTP {}", resp.status()),
                Err(e) => e.to_string(),
            };
            if attempt >= self.retries {
                return Err(reason);
            }
            tokio::time::sleep(Duration::from_millis(250 << attempt.min(6))).await;
            attempt += 1;
        }
    }
}

/// Maps magic bytes to the canonical upload extension. The original file
/// name plays no part.
pub fn sniff_extension(bytes: &[u8]) -> Option<&'static str> {
    if bytes.starts_with(&[0xFF, 0xD8, 0xFF]) {
        Some("jpg")
    } else if bytes.starts_with(&[0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A]) {
        Some("png")
    } else if bytes.starts_with(b"GIF87a") || bytes.starts_with(b"GIF89a") {
        Some("gif")
    } else if bytes.len() >= 12 && bytes.starts_with(b"RIFF") && &bytes[8..12] == b"WEBP" {
        Some("webp")
    } else if bytes.starts_with(b"BM") {
        Some("bmp")
    } else if bytes.starts_with(b"II*\0") || bytes.starts_with(b"MM\0*") {
        Some("tif")
    } else {
        None
    }
}

/// Merges records with equal content digests: categories become the
/// sorted union, everything else comes from the first occurrence, and
/// output order is first-occurrence order.
pub fn dedupe(records: Vec<CorpusImage>) -> Vec<CorpusImage> {
    let mut order: Vec<String> = Vec::new();
    let mut merged: BTreeMap<String, CorpusImage> = BTreeMap::new();
    for record in records {
        match merged.get_mut(&record.content_digest) {
            Some(existing) => {
                let mut cats: BTreeSet<Category> =
                    existing.categories.iter().copied().collect();
                cats.extend(record.categories.iter().copied());
                existing.categories = cats.into_iter().collect();
            }
            None => {
                order.push(record.content_digest.clone());
                let mut first = record;
                first.categories.sort();
                first.categories.dedup();
                merged.insert(first.content_digest.clone(), first);
            }
        }
    }
    order
        .into_iter()
        .map(|digest| merged.remove(&digest).expect("digest recorded on insert"))
        .collect()
}

pub fn manifest_log_path(corpus_dir: &Path) -> PathBuf {
    corpus_dir.join("manifest.log")
}

pub fn failures_log_path(corpus_dir: &Path) -> PathBuf {
    corpus_dir.join("failures.log")
}

pub fn snapshot_path(corpus_dir: &Path) -> PathBuf {
    corpus_dir.join("corpus.json")
}

/// Loads `corpus.json` along with its byte digest (the corpus identity
/// recorded in run manifests).
pub fn load_snapshot(corpus_dir: &Path) -> Result<(CorpusSnapshot, String), AcquireError> {
    let path = snapshot_path(corpus_dir);
    let bytes = std::fs::read(&path)
        .map_err(|_| AcquireError::MissingSnapshot(path.clone()))?;
    let snapshot = serde_json::from_slice(&bytes)?;
    Ok((snapshot, store::sha256_bytes(&bytes)))
}

/// Runs the full acquisition: search each configured category, resolve
/// rendition URLs, download with bounded parallelism, and compact the
/// manifest into `corpus.json`. Re-running against an unchanged source
/// is idempotent: already-manifested (category, file_url) pairs are
/// skipped and the snapshot comes out identical.
pub async fn acquire_corpus(config: &HarnessConfig) -> Result<AcquireOutcome, AcquireError> {
    let corpus_dir = &config.paths.corpus_dir;
    let files_dir = corpus_dir.join("files");
    std::fs::create_dir_all(&files_dir)?;

    let client = MediaClient::new(
        &config.acquire.api_base,
        Duration::from_secs(config.acquire.timeout_secs),
        config.acquire.retries,
    )?;

    let existing: Vec<CorpusImage> = store::read_log(&manifest_log_path(corpus_dir))?;
    let mut done: HashSet<(Category, String)> = HashSet::new();
    for record in &existing {
        for category in &record.categories {
            done.insert((*category, record.file_url.clone()));
        }
    }

    let mut manifest = LogWriter::open(&manifest_log_path(corpus_dir))?;
    let mut failure_log = LogWriter::open(&failures_log_path(corpus_dir))?;
    let mut records = existing;
    let mut failures = Vec::new();
    let mut shortfalls = Vec::new();
    let mut downloaded = 0usize;

    for category in config.categories() {
        let term = category.as_str();
        let titles = client.search(term, config.acquire.per_term).await?;
        if titles.len() < config.acquire.per_term {
            shortfalls.push(Shortfall {
                category,
                requested: config.acquire.per_term,
                found: titles.len(),
            });
        }
        let refs = client.image_info(&titles, config.acquire.width).await?;

        let mut jobs = Vec::new();
        let mut seen_urls = HashSet::new();
        for title in &titles {
            let Some(image_ref) = refs.get(title) else {
                // No rendition info for the title; record and move on.
                let failure = AcquireFailure {
                    category,
                    title: title.clone(),
                    file_url: String::new(),
                    reason: "no image info for title".to_string(),
                    at: time::now(),
                };
                failure_log.append(&failure)?;
                failures.push(failure);
                continue;
            };
            if done.contains(&(category, image_ref.file_url.clone()))
                || !seen_urls.insert(image_ref.file_url.clone())
            {
                continue;
            }
            jobs.push(image_ref.clone());
        }

        let client_ref = &client;
        let mut results = stream::iter(jobs.into_iter().map(|image_ref| async move {
            let body = client_ref.download(&image_ref.file_url).await;
            (image_ref, body)
        }))
        .buffered(config.acquire.parallelism.max(1));

        while let Some((image_ref, body)) = results.next().await {
            let bytes = match body {
                Ok(bytes) => bytes,
                Err(reason) => {
                    let failure = AcquireFailure {
                        category,
                        title: image_ref.title.clone(),
                        file_url: image_ref.file_url.clone(),
                        reason,
                        at: time::now(),
                    };
                    failure_log.append(&failure)?;
                    failures.push(failure);
                    continue;
                }
            };
            let Some(ext) = sniff_extension(&bytes) else {
                let failure = AcquireFailure {
                    category,
                    title: image_ref.title.clone(),
                    file_url: image_ref.file_url.clone(),
                    reason: "unrecognized image content".to_string(),
                    at: time::now(),
                };
                failure_log.append(&failure)?;
                failures.push(failure);
                continue;
            };
            let digest = store::sha256_bytes(&bytes);
            let local_path = format!("files/{digest}.{ext}");
            let target = corpus_dir.join(&local_path);
            if !target.exists() {
                store::write_atomic(&target, &bytes)?;
            }
            let record = CorpusImage {
                id: image_id(&digest),
                categories: vec![category],
                source_page_url: image_ref.source_page_url.clone(),
                file_url: image_ref.file_url.clone(),
                local_path,
                width: image_ref.width,
                height: image_ref.height,
                content_digest: digest,
                fetched_at: time::now(),
            };
            manifest.append(&record)?;
            done.insert((category, record.file_url.clone()));
            records.push(record);
            downloaded += 1;
        }
    }

    let snapshot = CorpusSnapshot {
        images: dedupe(records),
        shortfalls,
    };
    store::write_atomic(
        &snapshot_path(corpus_dir),
        &serde_json::to_vec_pretty(&snapshot)?,
    )?;
    Ok(AcquireOutcome {
        snapshot,
        failures,
        downloaded,
    })
}

/// A byte-identical copy of a corpus file under the neutral name
/// `upload_file.<ext>`, in its own temporary directory. The original
/// file name never reaches an engine.
pub struct UploadArtifact {
    _dir: TempDir,
    path: PathBuf,
    pub file_name: String,
    pub content_digest: String,
    pub size_bytes: u64,
}

impl UploadArtifact {
    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn bytes(&self) -> std::io::Result<Vec<u8>> {
        std::fs::read(&self.path)
    }
}

pub fn anonymize_for_upload(
    corpus_dir: &Path,
    image: &CorpusImage,
) -> Result<UploadArtifact, AcquireError> {
    let source = corpus_dir.join(&image.local_path);
    let bytes = std::fs::read(&source)?;
    let ext = sniff_extension(&bytes)
        .ok_or_else(|| AcquireError::UnknownContentType(image.id.clone()))?;
    let file_name = format!("upload_file.{ext}");
    let dir = TempDir::new()?;
    let path = dir.path().join(&file_name);
    std::fs::write(&path, &bytes)?;
    Ok(UploadArtifact {
        _dir: dir,
        path,
        file_name,
        content_digest: store::sha256_bytes(&bytes),
        size_bytes: bytes.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(digest: &str, category: Category) -> CorpusImage {
        CorpusImage {
            id: image_id(digest),
            categories: vec![category],
            source_page_url: format!("http://m/wiki/File:{digest}"),
            file_url: format!("http://m/thumb/{digest}?w=640"),
            local_path: format!("files/{digest}.png"),
            width: 640,
            height: 480,
            content_digest: digest.to_string(),
            fetched_at: time::now(),
        }
    }

    #[test]
    fn category_class_mapping_is_total() {
        assert_eq!(Category::Diagram.image_class(), ImageClass::Abstract);
        assert_eq!(Category::Schematic.image_class(), ImageClass::Abstract);
        assert_eq!(Category::Photo.image_class(), ImageClass::Natural);
        assert_eq!(Category::Photograph.image_class(), ImageClass::Natural);
        for class in ImageClass::ALL {
            for member in class.members() {
                assert_eq!(member.image_class(), class);
            }
        }
    }

    #[test]
    fn category_parse_round_trips() {
        for category in Category::ALL {
            assert_eq!(Category::parse(category.as_str()), Some(category));
        }
        assert_eq!(Category::parse("painting"), None);
    }

    #[test]
    fn dedupe_merges_digests_and_unions_categories() {
        let records = vec![
            record("aaaa000000000000aa", Category::Diagram),
            record("bbbb000000000000bb", Category::Diagram),
            record("aaaa000000000000aa", Category::Schematic),
            record("cccc000000000000cc", Category::Photo),
            record("cccc000000000000cc", Category::Photograph),
        ];
        let unique = dedupe(records);
        assert_eq!(unique.len(), 3);
        assert_eq!(
            unique[0].categories,
            vec![Category::Diagram, Category::Schematic]
        );
        assert_eq!(unique[1].categories, vec![Category::Diagram]);
        assert_eq!(
            unique[2].categories,
            vec![Category::Photo, Category::Photograph]
        );
        // First-occurrence order, ids derived from digests.
        assert_eq!(unique[0].content_digest, "aaaa000000000000aa");
        assert_eq!(unique[0].id, "img-aaaa000000000000");
    }

    #[test]
    fn dedupe_without_duplicates_is_identity() {
        let records = vec![
            record("1111111111111111", Category::Photo),
            record("2222222222222222", Category::Diagram),
        ];
        let unique = dedupe(records.clone());
        assert_eq!(unique, records);
    }

    #[test]
    fn per_category_counts_can_exceed_unique_count() {
        let snapshot = CorpusSnapshot {
            images: dedupe(vec![
                record("aaaa111111111111", Category::Diagram),
                record("aaaa111111111111", Category::Schematic),
            ]),
            shortfalls: vec![],
        };
        let counts = snapshot.category_counts();
        let total: usize = counts.values().sum();
        assert_eq!(snapshot.images.len(), 1);
        assert_eq!(total, 2);
    }

    #[test]
    fn sniff_extension_recognizes_common_formats() {
        assert_eq!(sniff_extension(&[0xFF, 0xD8, 0xFF, 0xE0]), Some("jpg"));
        assert_eq!(
            sniff_extension(&[0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A, 0]),
            Some("png")
        );
        assert_eq!(sniff_extension(b"GIF89a..."), Some("gif"));
        assert_eq!(sniff_extension(b"RIFF\x00\x00\x00\x00WEBPVP8 "), Some("webp"));
        assert_eq!(sniff_extension(b"BM\x00\x00"), Some("bmp"));
        assert_eq!(sniff_extension(b"II*\0data"), Some("tif"));
        assert_eq!(sniff_extension(b"MM\0*data"), Some("tif"));
        assert_eq!(sniff_extension(b"<html>"), None);
        assert_eq!(sniff_extension(b""), None);
    }

    #[test]
    fn anonymize_copies_bytes_under_neutral_name() {
        let dir = tempfile::tempdir().unwrap();
        let png = [
            0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A, 1, 2, 3, 4, 5,
        ];
        let digest = store::sha256_bytes(&png);
        let local_path = format!("files/{digest}.png");
        std::fs::create_dir_all(dir.path().join("files")).unwrap();
        std::fs::write(dir.path().join(&local_path), png).unwrap();
        let mut image = record(&digest, Category::Photo);
        image.local_path = local_path;

        let artifact = anonymize_for_upload(dir.path(), &image).unwrap();
        assert_eq!(artifact.file_name, "upload_file.png");
        assert_eq!(artifact.content_digest, digest);
        assert_eq!(artifact.bytes().unwrap(), png);
        assert!(artifact.path().ends_with("upload_file.png"));
    }

    #[test]
    fn anonymize_rejects_unknown_content() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir_all(dir.path().join("files")).unwrap();
        std::fs::write(dir.path().join("files/x.png"), b"not an image").unwrap();
        let mut image = record("feedfacefeedface", Category::Photo);
        image.local_path = "files/x.png".to_string();
        assert!(matches!(
            anonymize_for_upload(dir.path(), &image),
            Err(AcquireError::UnknownContentType(_))
        ));
    }

    #[test]
    fn missing_snapshot_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_snapshot(dir.path()),
            Err(AcquireError::MissingSnapshot(_))
        ));
    }
}
