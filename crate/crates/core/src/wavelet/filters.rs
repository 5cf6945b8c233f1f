/// Orthogonal two-channel filter bank.
///
/// `low_pass` and `high_pass` are the synthesis filters; analysis uses the
/// same coefficients as inner products (the adjoint), so one pair serves
/// both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    pub low_pass: Vec<f64>,
    pub high_pass: Vec<f64>,
}

impl FilterPair {
    /// Build the pair from a scaling filter using the quadrature mirror
    /// relation `g[n] = (-1)^n h[L-1-n]`.
    pub fn from_scaling(h: Vec<f64>) -> Self {
        let len = h.len();
        let g = (0..len)
            .map(|n| if n % 2 == 0 { h[len - 1 - n] } else { -h[len - 1 - n] })
            .collect();
        FilterPair {
            low_pass: h,
            high_pass: g,
        }
    }

    pub fn len(&self) -> usize {
        self.low_pass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.low_pass.is_empty()
    }
}

/// The 4-tap Daubechies filters,
/// `h = [1+sqrt3, 3+sqrt3, 3-sqrt3, 1-sqrt3] / (4 sqrt2)`.
pub fn db4_filter_bank() -> FilterPair {
    let s3 = 3f64.sqrt();
    let norm = 4.0 * std::f64::consts::SQRT_2;
    FilterPair::from_scaling(vec![
        (1.0 + s3) / norm,
        (3.0 + s3) / norm,
        (3.0 - s3) / norm,
        (1.0 - s3) / norm,
    ])
}
