//! Acquisition against the loopback media API: search pagination,
//! rendition downloads, failure recording, cross-category dedup, and
//! idempotent resume.

mod common;

use riseval_fixtures::{serve_media, FixtureFile, MediaFixture};
use riseval_harness::corpus::{self, Category};
use riseval_harness::store;
use std::collections::BTreeSet;

fn file(title: &str, seed: u64) -> FixtureFile {
    FixtureFile {
        title: title.to_string(),
        seed,
        width: 800,
        height: 600,
    }
}

/// diagram: 5 files. schematic: 3 own files plus one byte-duplicate of a
/// diagram file (seed 3). photo: 3 files, one of which 404s. photograph:
/// 1 own file plus a byte-duplicate of a photo file (seed 21).
fn fixture() -> MediaFixture {
    MediaFixture {
        terms: vec![
            (
                "diagram".to_string(),
                (1..=5).map(|s| file(&format!("Diagram_{s}.png"), s)).collect(),
            ),
            (
                "schematic".to_string(),
                vec![
                    file("Schematic_10.png", 10),
                    file("Schematic_11.png", 11),
                    file("Schematic_dup.png", 3),
                    file("Schematic_12.png", 12),
                ],
            ),
            (
                "photo".to_string(),
                vec![
                    file("Photo_20.png", 20),
                    file("Photo_21.png", 21),
                    file("Photo_broken.png", 22),
                ],
            ),
            (
                "photograph".to_string(),
                vec![file("Photograph_30.png", 30), file("Photograph_dup.png", 21)],
            ),
        ],
        broken: BTreeSet::from(["Photo_broken.png".to_string()]),
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn acquires_dedupes_and_records_failures() {
    let root = tempfile::tempdir().unwrap();
    let server = serve_media(fixture()).await;
    let mut config = common::test_config(root.path());
    config.acquire.api_base = server.base_url.clone();
    config.acquire.per_term = 5;
    config.acquire.width = 64;

    let outcome = corpus::acquire_corpus(&config).await.unwrap();

    // 14 references, one failed download, two byte-duplicates.
    assert_eq!(outcome.downloaded, 13);
    assert_eq!(outcome.snapshot.images.len(), 11);
    assert_eq!(outcome.failures.len(), 1);
    assert_eq!(outcome.failures[0].title, "File:Photo_broken.png");
    assert!(outcome.failures[0].reason.contains("404"));

    let counts = outcome.snapshot.category_counts();
    assert_eq!(counts[&Category::Diagram], 5);
    assert_eq!(counts[&Category::Schematic], 4);
    assert_eq!(counts[&Category::Photo], 2);
    assert_eq!(counts[&Category::Photograph], 2);

    // The duplicates carry both memberships, everything else one.
    let multi: Vec<_> = outcome
        .snapshot
        .images
        .iter()
        .filter(|img| img.categories.len() > 1)
        .collect();
    assert_eq!(multi.len(), 2);
    assert_eq!(
        multi[0].categories,
        vec![Category::Diagram, Category::Schematic]
    );
    assert_eq!(
        multi[1].categories,
        vec![Category::Photo, Category::Photograph]
    );

    // Shortfalls for every term that had fewer than per_term references.
    let shortfall_terms: Vec<_> = outcome
        .snapshot
        .shortfalls
        .iter()
        .map(|s| (s.category, s.found))
        .collect();
    assert_eq!(
        shortfall_terms,
        vec![
            (Category::Schematic, 4),
            (Category::Photo, 3),
            (Category::Photograph, 2)
        ]
    );

    // Digests are pairwise distinct and every file exists on disk at the
    // requested rendition size.
    let digests: BTreeSet<_> = outcome
        .snapshot
        .images
        .iter()
        .map(|img| img.content_digest.clone())
        .collect();
    assert_eq!(digests.len(), outcome.snapshot.images.len());
    for image in &outcome.snapshot.images {
        assert_eq!((image.width, image.height), (64, 48));
        let bytes = std::fs::read(config.paths.corpus_dir.join(&image.local_path)).unwrap();
        assert_eq!(store::sha256_bytes(&bytes), image.content_digest);
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn rerun_is_idempotent() {
    let root = tempfile::tempdir().unwrap();
    let server = serve_media(fixture()).await;
    let mut config = common::test_config(root.path());
    config.acquire.api_base = server.base_url.clone();
    config.acquire.per_term = 5;
    config.acquire.width = 64;

    corpus::acquire_corpus(&config).await.unwrap();
    let snapshot_path = corpus::snapshot_path(&config.paths.corpus_dir);
    let first = std::fs::read(&snapshot_path).unwrap();
    let (_, first_digest) = corpus::load_snapshot(&config.paths.corpus_dir).unwrap();

    let again = corpus::acquire_corpus(&config).await.unwrap();
    // Nothing new is fetched and the snapshot is byte-identical; the
    // broken reference is retried (it never reached the manifest).
    assert_eq!(again.downloaded, 0);
    let second = std::fs::read(&snapshot_path).unwrap();
    assert_eq!(first, second);
    let (_, second_digest) = corpus::load_snapshot(&config.paths.corpus_dir).unwrap();
    assert_eq!(first_digest, second_digest);
}
