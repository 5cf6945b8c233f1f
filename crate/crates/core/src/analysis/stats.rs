/// Zero-lag Pearson correlation; `None` when either input has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    if a.is_empty() {
        return None;
    }
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

pub(crate) fn rms(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Ordinary least-squares line `y = intercept + slope * t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square of the fit residuals.
    pub residual: f64,
}

/// Fit with the abscissa centered for conditioning. Needs two distinct `t`.
pub fn linear_fit(t: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(t.len(), y.len());
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut stt, mut sty) = (0.0, 0.0);
    for (ti, yi) in t.iter().zip(y) {
        stt += (ti - mt) * (ti - mt);
        sty += (ti - mt) * (yi - my);
    }
    let slope = sty / stt;
    let intercept = my - slope * mt;
    let sse: f64 = t
        .iter()
        .zip(y)
        .map(|(ti, yi)| (yi - intercept - slope * ti).powi(2))
        .sum();
    LineFit {
        slope,
        intercept,
        residual: (sse / n).sqrt(),
    }
}
