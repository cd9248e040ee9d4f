//! Writers for the fixture engine adapter's on-disk bundle format:
//! `<dir>/<content-digest>/<kind>.json` holding `{"results": [...]}`.

use serde::{Deserialize, Serialize};
use std::fs;
use std::io;
use std::path::Path;

/// One planted search result. Empty strings model fields the engine page
/// did not carry.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PlantedSer {
    pub ser_url: String,
    pub page_url: String,
    pub image_url: String,
    pub thumbnail_url: String,
}

impl PlantedSer {
    /// A fully-populated result whose URLs share one stem.
    pub fn stem(stem: &str) -> Self {
        Self {
            ser_url: format!("{stem}/ser"),
            page_url: format!("{stem}/page"),
            image_url: format!("{stem}/image"),
            thumbnail_url: format!("{stem}/thumb"),
        }
    }
}

/// Writes the bundle file for one (query digest, result kind) pair.
/// `kind` is the adapter's directory name: `similar_to` or `pages_with`.
pub fn write_engine_bundle(
    dir: &Path,
    digest: &str,
    kind: &str,
    results: &[PlantedSer],
) -> io::Result<()> {
    let bundle_dir = dir.join(digest);
    fs::create_dir_all(&bundle_dir)?;
    let body = serde_json::json!({ "results": results });
    fs::write(
        bundle_dir.join(format!("{kind}.json")),
        serde_json::to_vec_pretty(&body)?,
    )
}
