//! Deterministic test doubles for the retrieval harness.
//!
//! Everything here is seed-driven and offline: [`synth`] renders synthetic
//! photographs/diagrams at any resolution, [`media`] serves a
//! Wikimedia-shaped search + rendition API over loopback HTTP, [`engines`]
//! serves engine-shaped reverse-search responses to uploads, and
//! [`bundles`] writes canned result bundles for the fixture engine
//! adapter.

pub mod bundles;
pub mod engines;
pub mod media;
pub mod synth;

pub use bundles::{write_engine_bundle, PlantedSer};
pub use engines::{serve_engines, EnginePlan, EngineServer, PlantedResults};
pub use media::{serve_media, FixtureFile, MediaFixture, MediaServer};
pub use synth::{jpeg_bytes, png_bytes, synth_rgb};
