//! Shared scaffolding for the integration tests: fabricated corpora and
//! a config pointed at temporary directories with all delays disabled.
#![allow(dead_code)]

use riseval_fixtures::{png_bytes, synth_rgb};
use riseval_harness::config::HarnessConfig;
use riseval_harness::corpus::{image_id, Category, CorpusImage, CorpusSnapshot};
use riseval_harness::store;
use riseval_harness::time;
use std::path::Path;

/// A config rooted at `root` (corpus under `corpus/`, runs under
/// `runs/`) with politeness delays and retries turned off.
pub fn test_config(root: &Path) -> HarnessConfig {
    let mut config = HarnessConfig::default();
    config.paths.corpus_dir = root.join("corpus");
    config.paths.runs_dir = root.join("runs");
    config.engines.politeness_delay_ms = 0;
    config.engines.jitter_ms = 0;
    config.engines.max_retries = 0;
    config.engines.timeout_secs = 10;
    config.acquire.timeout_secs = 10;
    config.acquire.retries = 0;
    config.judge.timeout_secs = 10;
    config.judge.retries = 0;
    config
}

/// Writes a synthetic corpus directly (files plus `corpus.json`),
/// bypassing acquisition. Returns the images in snapshot order.
pub fn fabricate_corpus(
    corpus_dir: &Path,
    specs: &[(u64, &[Category])],
) -> Vec<CorpusImage> {
    let files_dir = corpus_dir.join("files");
    std::fs::create_dir_all(&files_dir).unwrap();
    let mut images = Vec::new();
    for (seed, categories) in specs {
        let bytes = png_bytes(&synth_rgb(*seed, 64, 48));
        let digest = store::sha256_bytes(&bytes);
        let local_path = format!("files/{digest}.png");
        std::fs::write(corpus_dir.join(&local_path), &bytes).unwrap();
        images.push(CorpusImage {
            id: image_id(&digest),
            categories: categories.to_vec(),
            source_page_url: format!("http://media.test/wiki/File:seed_{seed}"),
            file_url: format!("http://media.test/thumb/seed_{seed}?w=64"),
            local_path,
            width: 64,
            height: 48,
            content_digest: digest,
            fetched_at: time::now(),
        });
    }
    let snapshot = CorpusSnapshot {
        images: images.clone(),
        shortfalls: Vec::new(),
    };
    std::fs::write(
        corpus_dir.join("corpus.json"),
        serde_json::to_vec_pretty(&snapshot).unwrap(),
    )
    .unwrap();
    images
}

/// The corpus file's bytes for a fabricated image, for digest-keyed
/// engine plans.
pub fn corpus_bytes(corpus_dir: &Path, image: &CorpusImage) -> Vec<u8> {
    std::fs::read(corpus_dir.join(&image.local_path)).unwrap()
}
