use crate::error::HashError;

/// Dimension of the difference-feature vector: two 16x16 orientation
/// planes (horizontal and vertical differences) flattened together.
pub const VISHASH_DIMENSION: usize = 512;

/// A real-valued hash: the shape-oriented difference features compared by
/// [`normalized_l2`]. Entries lie in `[-1, 1]` and are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self, HashError> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(HashError::InvalidImage(format!(
                "non-finite feature value {bad}"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    /// Canonical text form: decimal floats with 9 significant digits,
    /// space separated.
    pub fn to_text(&self) -> String {
        self.values
            .iter()
            .map(|v| format!("{v:.8e}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn from_text(text: &str) -> Result<Self, HashError> {
        let values = text
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|e| HashError::InvalidImage(format!("bad feature value: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(values)
    }
}

/// `||a - b|| / (||a|| + ||b||)`, defined as 0 when both norms are zero.
/// Always in `[0, 1]` by the triangle inequality.
pub fn normalized_l2(a: &FeatureVector, b: &FeatureVector) -> Result<f64, HashError> {
    if a.dimension() != b.dimension() {
        return Err(HashError::DimensionMismatch(a.dimension(), b.dimension()));
    }
    let mut diff_sq = 0.0;
    let mut a_sq = 0.0;
    let mut b_sq = 0.0;
    for (x, y) in a.values.iter().zip(&b.values) {
        diff_sq += (x - y) * (x - y);
        a_sq += x * x;
        b_sq += y * y;
    }
    let denom = a_sq.sqrt() + b_sq.sqrt();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((diff_sq.sqrt() / denom).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_to_self_is_zero() {
        let a = FeatureVector::new(vec![0.5, -0.25, 0.125]).unwrap();
        assert_eq!(normalized_l2(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn distance_to_negation_is_one() {
        let a = FeatureVector::new(vec![0.5, -0.25, 0.125]).unwrap();
        let b = FeatureVector::new(vec![-0.5, 0.25, -0.125]).unwrap();
        assert!((normalized_l2(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_unit_vectors() {
        let mut av = vec![0.0; 8];
        let mut bv = vec![0.0; 8];
        av[0] = 1.0;
        bv[1] = 1.0;
        let a = FeatureVector::new(av).unwrap();
        let b = FeatureVector::new(bv).unwrap();
        let d = normalized_l2(&a, &b).unwrap();
        assert!((d - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-12);
        assert!((d - 0.70711).abs() < 1e-5);
    }

    #[test]
    fn both_zero_vectors_have_distance_zero() {
        let a = FeatureVector::new(vec![0.0; 4]).unwrap();
        assert_eq!(normalized_l2(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = FeatureVector::new(vec![1.0]).unwrap();
        let b = FeatureVector::new(vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            normalized_l2(&a, &b),
            Err(HashError::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn text_round_trip_keeps_nine_significant_digits() {
        let a = FeatureVector::new(vec![0.123456789123, -1.0, 0.0]).unwrap();
        let text = a.to_text();
        let back = FeatureVector::from_text(&text).unwrap();
        for (x, y) in a.values().iter().zip(back.values()) {
            assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn non_finite_rejected() {
        assert!(FeatureVector::new(vec![f64::INFINITY]).is_err());
    }
}
