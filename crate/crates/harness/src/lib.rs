//! Harness for measuring how retrievable images are through reverse image
//! search engines.
//!
//! The pipeline has four stages, each resumable and individually
//! re-runnable against a run directory:
//!
//! 1. **acquire** ([`corpus`]): pull a categorized image corpus from a
//!    media repository API at a fixed rendition width.
//! 2. **submit** ([`engines`]): upload each image to every enabled engine
//!    under a neutral file name, archive the raw response pages, and parse
//!    them into normalized search-result records.
//! 3. **judge** ([`judge`]): download result thumbnails and classify each
//!    result as the same image or not, using perceptual hashes.
//! 4. **report** ([`report`]): aggregate judgments into precision,
//!    retrievability, and MRR curves with CSV tables and SVG figures.
//!
//! [`store`] provides the run-scoped persistence (record logs, manifest,
//! locking) the stages share, and [`pipeline`] chains them with stage
//! gating.

pub mod config;
pub mod corpus;
pub mod engines;
pub mod judge;
pub mod pipeline;
pub mod report;
pub mod store;
pub mod time;

mod error;

pub use error::HarnessError;
