use crate::error::HashError;

/// Orthonormal type-II 2-D DCT of a square row-major matrix, computed
/// separably (rows, then columns). `output[0]` is the DC term.
///
/// AC coefficients are computed against the first sample of each vector,
/// which is algebraically the same transform (the cosine basis rows for
/// `k >= 1` sum to zero) but keeps constant inputs exactly sparse: a
/// constant matrix transforms to a single nonzero coefficient `n * c`
/// with every AC term exactly `0.0`.
pub fn dct2d(matrix: &[f64], n: usize) -> Result<Vec<f64>, HashError> {
    if n == 0 {
        return Err(HashError::InvalidDimension("DCT of empty matrix".into()));
    }
    if matrix.len() != n * n {
        return Err(HashError::InvalidDimension(format!(
            "matrix has {} values, expected {n}x{n}",
            matrix.len()
        )));
    }

    let basis = CosBasis::new(n);
    let mut rows_done = vec![0.0; n * n];
    let mut scratch = vec![0.0; n];
    for r in 0..n {
        basis.forward(&matrix[r * n..(r + 1) * n], &mut scratch);
        rows_done[r * n..(r + 1) * n].copy_from_slice(&scratch);
    }

    let mut out = vec![0.0; n * n];
    let mut column = vec![0.0; n];
    for c in 0..n {
        for r in 0..n {
            column[r] = rows_done[r * n + c];
        }
        basis.forward(&column, &mut scratch);
        for r in 0..n {
            out[r * n + c] = scratch[r];
        }
    }
    // The 2-D DC term is (1/n) * sum of all inputs; computing it directly
    // instead of scaling by sqrt(1/n) twice keeps it exact for constant
    // matrices (n * c rather than n * c plus an ulp of noise).
    out[0] = matrix.iter().sum::<f64>() / n as f64;
    Ok(out)
}

/// Precomputed cosine table for a 1-D orthonormal DCT-II of length `n`.
struct CosBasis {
    n: usize,
    /// table[k * n + i] = cos(pi * (2i + 1) * k / (2n))
    table: Vec<f64>,
    scale_dc: f64,
    scale_ac: f64,
}

impl CosBasis {
    fn new(n: usize) -> Self {
        let mut table = vec![0.0; n * n];
        for k in 0..n {
            for i in 0..n {
                table[k * n + i] =
                    (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos();
            }
        }
        Self {
            n,
            table,
            scale_dc: (1.0 / n as f64).sqrt(),
            scale_ac: (2.0 / n as f64).sqrt(),
        }
    }

    fn forward(&self, input: &[f64], output: &mut [f64]) {
        let n = self.n;
        output[0] = self.scale_dc * input.iter().sum::<f64>();
        // Each k >= 1 basis row sums to zero, so shifting the input by any
        // constant leaves the coefficient unchanged; anchoring on the first
        // sample makes AC terms of a constant input exactly 0.0 (a mean
        // anchor would reintroduce rounding noise through the division).
        let anchor = input[0];
        for k in 1..n {
            let row = &self.table[k * n..(k + 1) * n];
            let acc: f64 = input
                .iter()
                .zip(row)
                .map(|(x, c)| (x - anchor) * c)
                .sum();
            output[k] = self.scale_ac * acc;
        }
    }
}
