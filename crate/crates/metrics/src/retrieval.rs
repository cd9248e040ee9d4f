use crate::error::MetricsError;

/// Outcome of one query with respect to the target document: the rank at
/// which the document first appeared (or absence), and the query's
/// opportunity weight (1 unless overridden).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryOutcome {
    weight: f64,
    first_found_rank: Option<u32>,
}

impl QueryOutcome {
    /// The document appeared, first at the given 1-based rank.
    pub fn found(rank: u32) -> Self {
        assert!(rank >= 1, "ranks are 1-based");
        Self {
            weight: 1.0,
            first_found_rank: Some(rank),
        }
    }

    /// The document never appeared in this query's results.
    pub fn absent() -> Self {
        Self {
            weight: 1.0,
            first_found_rank: None,
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Result<Self, MetricsError> {
        if !weight.is_finite() || weight < 0.0 {
            return Err(MetricsError::InvalidWeight(weight));
        }
        self.weight = weight;
        Ok(self)
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn first_found_rank(&self) -> Option<u32> {
        self.first_found_rank
    }
}

/// Per-query outcomes for a single target document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RetrievabilityInput {
    outcomes: Vec<QueryOutcome>,
}

impl RetrievabilityInput {
    pub fn new(outcomes: Vec<QueryOutcome>) -> Self {
        Self { outcomes }
    }

    pub fn outcomes(&self) -> &[QueryOutcome] {
        &self.outcomes
    }
}

/// Binary access cost: 1 when the document was found within the first `c`
/// results, 0 otherwise (including when it never appeared).
pub fn binary_cost(first_found_rank: Option<u32>, c: u32) -> u32 {
    assert!(c >= 1, "cutoffs are 1-based");
    match first_found_rank {
        Some(rank) if rank <= c => 1,
        _ => 0,
    }
}

/// Retrievability of a document at cutoff `c`: the weighted count of
/// queries that surface it within the first `c` results.
pub fn retrievability(input: &RetrievabilityInput, c: u32) -> f64 {
    input
        .outcomes()
        .iter()
        .map(|o| o.weight() * binary_cost(o.first_found_rank(), c) as f64)
        .sum()
}
