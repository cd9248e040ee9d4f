use crate::error::MetricsError;

/// Arithmetic mean and standard error of the mean, using the sample
/// standard deviation (n − 1 denominator). A single sample has standard
/// error 0 by convention.
pub fn mean_with_standard_error(samples: &[f64]) -> Result<(f64, f64), MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() == 1 {
        return Ok((mean, 0.0));
    }
    let variance = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (variance / n).sqrt()))
}
