//! Rank-based retrieval metrics.
//!
//! Everything in this crate is a pure function over immutable inputs: a
//! [`JudgedRanking`] holds the per-position relevance judgments for one
//! query, and the metric functions reduce rankings (or collections of
//! them) to numbers. Aggregation is deterministic regardless of input
//! grouping, so callers may evaluate groups in parallel.

mod error;
mod ranking;
mod retrieval;
mod series;
mod stats;

pub use error::MetricsError;
pub use ranking::{mrr, precision_at_k, reciprocal_rank, JudgedRanking};
pub use retrieval::{binary_cost, retrievability, QueryOutcome, RetrievabilityInput};
pub use series::{aggregate_series, MetricSeries, SeriesKey, SeriesPoint, CUTOFFS};
pub use stats::mean_with_standard_error;
