use crate::error::{Error, Result};
use crate::grid::SystemModel;
use crate::wavelet::DecompositionSet;

use super::stats::{linear_fit, LineFit};
use super::Window;

/// Fewest samples accepted in a fit window.
pub const MIN_FIT_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSlope {
    pub label: String,
    /// Hz/s.
    pub slope: f64,
    /// RMS of the line-fit residuals, Hz.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocofEstimate {
    pub window: Window,
    pub channels: Vec<ChannelSlope>,
    /// Slope of the inertia-weighted average of the approximations, when
    /// a model was supplied.
    pub system: Option<ChannelSlope>,
}

impl RocofEstimate {
    /// `rocof.csv`: `channel,slope_hz_per_s,residual`; the system estimate,
    /// if any, is the last row labelled `coi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("channel,slope_hz_per_s,residual\n");
        for c in self.channels.iter().chain(self.system.iter()) {
            out.push_str(&format!("{},{:.15e},{:.15e}\n", c.label, c.slope, c.residual));
        }
        out
    }
}

/// Least-squares slope of every channel's final approximation over
/// `window`. With a model, the inertia-weighted average approximation is
/// fitted as the system estimate.
pub fn estimate_rocof(
    decomp: &DecompositionSet,
    model: Option<&SystemModel>,
    window: Window,
) -> Result<RocofEstimate> {
    let range = decomp.window_indices(window.start, window.end)?;
    if range.len() < MIN_FIT_SAMPLES {
        return Err(Error::InvalidWindow {
            t0: window.start,
            t1: window.end,
            reason: format!(
                "window too short: {} samples, need at least {MIN_FIT_SAMPLES}",
                range.len()
            ),
        });
    }
    let t: Vec<f64> = range.clone().map(|n| decomp.time_at(n)).collect();
    let fit = |label: &str, y: &[f64]| {
        let LineFit { slope, residual, .. } = linear_fit(&t, y);
        ChannelSlope {
            label: label.to_string(),
            slope,
            residual,
        }
    };
    let approximations: Vec<&[f64]> = (0..decomp.num_channels())
        .map(|c| decomp.approximation(c).expect("approximation exists"))
        .collect();
    let channels = approximations
        .iter()
        .zip(decomp.labels())
        .map(|(a, label)| fit(label, &a[range.clone()]))
        .collect();

    let system = match model {
        None => None,
        Some(m) => {
            let weights = m.inertia_weights();
            if weights.len() != decomp.num_channels() {
                return Err(Error::ChannelCountMismatch {
                    channels: decomp.num_channels(),
                    generators: weights.len(),
                });
            }
            let total: f64 = weights.iter().sum();
            let coi: Vec<f64> = range
                .clone()
                .map(|n| {
                    approximations
                        .iter()
                        .zip(&weights)
                        .map(|(a, w)| w * a[n])
                        .sum::<f64>()
                        / total
                })
                .collect();
            Some(fit("coi", &coi))
        }
    };
    Ok(RocofEstimate {
        window,
        channels,
        system,
    })
}
