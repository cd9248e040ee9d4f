use crate::error::MetricsError;

/// Relevance judgments for one query's ranked results.
///
/// Index `i` of the relevance sequence is the result at position `i + 1`;
/// positions are 1-based and gap-free. An empty ranking models a query for
/// which the engine returned nothing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JudgedRanking {
    relevance: Vec<bool>,
}

impl JudgedRanking {
    pub fn new(relevance: Vec<bool>) -> Self {
        Self { relevance }
    }

    /// A ranking with no retrieved results.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn relevance(&self) -> &[bool] {
        &self.relevance
    }

    pub fn retrieved_count(&self) -> usize {
        self.relevance.len()
    }

    /// 1-based rank of the first relevant result, if any.
    pub fn first_relevant_rank(&self) -> Option<u32> {
        self.relevance.iter().position(|r| *r).map(|i| i as u32 + 1)
    }
}

/// Precision at cutoff `k`: the fraction of relevant results among the
/// first `k` when more than `k` were retrieved, and among all retrieved
/// results otherwise. An empty ranking scores 0.
pub fn precision_at_k(ranking: &JudgedRanking, k: u32) -> Result<f64, MetricsError> {
    if k == 0 {
        return Err(MetricsError::InvalidCutoff);
    }
    let retrieved = ranking.retrieved_count();
    if retrieved == 0 {
        return Ok(0.0);
    }
    let judged = if (k as usize) < retrieved {
        &ranking.relevance()[..k as usize]
    } else {
        ranking.relevance()
    };
    let relevant = judged.iter().filter(|r| **r).count();
    Ok(relevant as f64 / judged.len() as f64)
}

/// 1 over the rank of the first relevant result; 0 when nothing relevant
/// was retrieved.
pub fn reciprocal_rank(ranking: &JudgedRanking) -> f64 {
    ranking
        .first_relevant_rank()
        .map_or(0.0, |rank| 1.0 / rank as f64)
}

/// Mean reciprocal rank over a set of queries.
pub fn mrr(rankings: &[JudgedRanking]) -> Result<f64, MetricsError> {
    if rankings.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(rankings.iter().map(reciprocal_rank).sum::<f64>() / rankings.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ranking(bits: &[u8]) -> JudgedRanking {
        JudgedRanking::new(bits.iter().map(|b| *b == 1).collect())
    }

    #[test]
    fn precision_counts_relevant_in_first_k() {
        let r = ranking(&[1, 0, 1, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(precision_at_k(&r, 4).unwrap(), 0.5);
    }

    #[test]
    fn precision_falls_back_to_retrieved_count_past_the_end() {
        let r = ranking(&[1, 1, 1, 0, 0, 0]);
        assert_eq!(precision_at_k(&r, 10).unwrap(), 0.5);
    }

    #[test]
    fn precision_of_all_relevant_is_one() {
        let r = ranking(&[1; 10]);
        assert_eq!(precision_at_k(&r, 10).unwrap(), 1.0);
    }

    #[test]
    fn precision_of_empty_ranking_is_zero() {
        assert_eq!(precision_at_k(&JudgedRanking::empty(), 3).unwrap(), 0.0);
    }

    #[test]
    fn precision_rejects_zero_cutoff() {
        let r = ranking(&[1]);
        assert_eq!(precision_at_k(&r, 0), Err(MetricsError::InvalidCutoff));
    }

    #[test]
    fn reciprocal_rank_of_first_hit() {
        assert_eq!(reciprocal_rank(&ranking(&[1, 0, 0])), 1.0);
        assert_eq!(reciprocal_rank(&ranking(&[0, 0, 1])), 1.0 / 3.0);
        assert_eq!(reciprocal_rank(&ranking(&[0, 0, 0])), 0.0);
        assert_eq!(reciprocal_rank(&JudgedRanking::empty()), 0.0);
    }

    #[test]
    fn mrr_averages_reciprocal_ranks() {
        let rankings = vec![
            ranking(&[1]),
            ranking(&[0, 1]),
            ranking(&[0, 0, 0, 1]),
        ];
        let got = mrr(&rankings).unwrap();
        assert!((got - (1.0 + 0.5 + 0.25) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mrr_of_all_first_relevant_is_one() {
        let rankings = vec![ranking(&[1, 0]), ranking(&[1, 1])];
        assert_eq!(mrr(&rankings).unwrap(), 1.0);
    }

    #[test]
    fn mrr_of_nothing_relevant_is_zero() {
        let rankings = vec![ranking(&[0, 0]), JudgedRanking::empty()];
        assert_eq!(mrr(&rankings).unwrap(), 0.0);
    }

    #[test]
    fn mrr_rejects_empty_input() {
        assert_eq!(mrr(&[]), Err(MetricsError::EmptyInput));
    }
}
