use crate::error::MetricsError;
use crate::ranking::{mrr, precision_at_k, JudgedRanking};
use crate::retrieval::binary_cost;
use crate::stats::mean_with_standard_error;

/// Cutoffs evaluated for every precision and retrievability curve.
pub const CUTOFFS: std::ops::RangeInclusive<u32> = 1..=10;

/// Identifies one aggregation group. The field values are opaque labels
/// here; the harness fills them from its own enums.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeriesKey {
    pub engine: String,
    pub result_kind: String,
    pub category: String,
    pub hash_method: String,
}

/// One point of a metric curve: the mean over `n` queries at a cutoff,
/// with the standard error of that mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub cutoff: u32,
    pub mean: f64,
    pub standard_error: f64,
    pub n: usize,
}

/// Aggregated curves and summary statistics for one group of queries.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub key: SeriesKey,
    pub precision_at_k: Vec<SeriesPoint>,
    pub retrievability_at_c: Vec<SeriesPoint>,
    pub mrr: f64,
    pub queries_total: usize,
    pub queries_with_results: usize,
}

/// Reduces one group of judged rankings to its metric curves.
///
/// Precision means cover only the queries that returned at least one
/// result; when every ranking in the group is empty the precision curve is
/// empty too. Retrievability and MRR average over every submitted query,
/// counting a query with no results as one that never surfaced its target,
/// so those curves always span the full group.
pub fn aggregate_series(
    key: SeriesKey,
    rankings: &[JudgedRanking],
) -> Result<MetricSeries, MetricsError> {
    if rankings.is_empty() {
        return Err(MetricsError::EmptyInput);
    }

    let with_results: Vec<&JudgedRanking> = rankings
        .iter()
        .filter(|r| r.retrieved_count() > 0)
        .collect();

    let mut precision = Vec::new();
    if !with_results.is_empty() {
        for k in CUTOFFS {
            let samples: Vec<f64> = with_results
                .iter()
                .map(|r| precision_at_k(r, k))
                .collect::<Result<_, _>>()?;
            let (mean, standard_error) = mean_with_standard_error(&samples)?;
            precision.push(SeriesPoint {
                cutoff: k,
                mean,
                standard_error,
                n: samples.len(),
            });
        }
    }

    let first_ranks: Vec<Option<u32>> = rankings.iter().map(|r| r.first_relevant_rank()).collect();
    let mut retrievability = Vec::new();
    for c in CUTOFFS {
        let samples: Vec<f64> = first_ranks
            .iter()
            .map(|rank| binary_cost(*rank, c) as f64)
            .collect();
        let (mean, standard_error) = mean_with_standard_error(&samples)?;
        retrievability.push(SeriesPoint {
            cutoff: c,
            mean,
            standard_error,
            n: samples.len(),
        });
    }

    Ok(MetricSeries {
        key,
        mrr: mrr(rankings)?,
        queries_total: rankings.len(),
        queries_with_results: with_results.len(),
        precision_at_k: precision,
        retrievability_at_c: retrievability,
    })
}
