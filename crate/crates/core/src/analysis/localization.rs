use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::signal::time_decimals;
use crate::wavelet::DecompositionSet;

use super::Window;

/// Sum of D1^2 per channel over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProfile {
    pub window: Window,
    pub labels: Vec<String>,
    pub energies: Vec<f64>,
}

impl EnergyProfile {
    /// Channel indices by descending energy; equal energies keep label order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.energies.len()).collect();
        order.sort_by(|&a, &b| {
            self.energies[b]
                .total_cmp(&self.energies[a])
                .then_with(|| self.labels[a].cmp(&self.labels[b]))
        });
        order
    }
}

pub fn d1_energy(decomp: &DecompositionSet, window: Window) -> Result<EnergyProfile> {
    let range = decomp.window_indices(window.start, window.end)?;
    let energies = (0..decomp.num_channels())
        .map(|c| {
            let d1 = decomp.detail(c, 1).expect("every decomposition has D1");
            d1[range.clone()].iter().map(|v| v * v).sum()
        })
        .collect();
    Ok(EnergyProfile {
        window,
        labels: decomp.labels().iter().map(|s| s.to_string()).collect(),
        energies,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    pub window: Window,
    pub threshold: f64,
    pub sample_rate: f64,
    pub labels: Vec<String>,
    pub energies: Vec<f64>,
    /// Channel indices by descending D1 energy, ties by label. Empty when
    /// nothing was detected.
    pub ranking: Vec<usize>,
    /// First time in the window with |D1| above the threshold.
    pub arrival_times: Vec<Option<f64>>,
    /// Detected channel indices by ascending arrival time. Simultaneous
    /// arrivals are ordered by descending energy, then label.
    pub arrival_order: Vec<usize>,
    pub no_disturbance: bool,
}

impl LocalizationReport {
    /// Label of the most energetic channel, if anything was detected.
    pub fn origin(&self) -> Option<&str> {
        self.ranking.first().map(|&i| self.labels[i].as_str())
    }

    /// `energies.csv`: `channel,energy,arrival_time`, rows in ranking
    /// order (label order when nothing was detected); undetected arrivals
    /// are written as `NA`.
    pub fn to_csv(&self) -> String {
        let places = time_decimals(self.sample_rate);
        let mut out = String::from("channel,energy,arrival_time\n");
        let order: Vec<usize> = if self.ranking.is_empty() {
            let mut all: Vec<usize> = (0..self.labels.len()).collect();
            all.sort_by(|&a, &b| self.labels[a].cmp(&self.labels[b]));
            all
        } else {
            self.ranking.clone()
        };
        for i in order {
            let arrival = self.arrival_times[i].map_or_else(|| "NA".to_string(), |t| format!("{t:.*}", places));
            out.push_str(&format!("{},{:.15e},{}\n", self.labels[i], self.energies[i], arrival));
        }
        out
    }
}

/// Rank channels by D1 energy in `window` and time the first threshold
/// crossing of |D1| in the same window.
pub fn localize(decomp: &DecompositionSet, window: Window, threshold: f64) -> Result<LocalizationReport> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be > 0, got {threshold}")));
    }
    let profile = d1_energy(decomp, window)?;
    let range = decomp.window_indices(window.start, window.end)?;
    let arrival_times: Vec<Option<f64>> = (0..decomp.num_channels())
        .map(|c| {
            let d1 = decomp.detail(c, 1).expect("every decomposition has D1");
            range
                .clone()
                .find(|&n| d1[n].abs() > threshold)
                .map(|n| decomp.time_at(n))
        })
        .collect();
    let no_disturbance = arrival_times.iter().all(Option::is_none);
    let ranking = if no_disturbance { Vec::new() } else { profile.ranking() };
    let mut arrival_order: Vec<usize> = (0..arrival_times.len()).filter(|&i| arrival_times[i].is_some()).collect();
    arrival_order.sort_by(|&a, &b| {
        arrival_times[a]
            .partial_cmp(&arrival_times[b])
            .unwrap_or(Ordering::Equal)
            .then_with(|| profile.energies[b].total_cmp(&profile.energies[a]))
            .then_with(|| profile.labels[a].cmp(&profile.labels[b]))
    });
    Ok(LocalizationReport {
        window,
        threshold,
        sample_rate: decomp.sample_rate(),
        labels: profile.labels,
        energies: profile.energies,
        ranking,
        arrival_times,
        arrival_order,
        no_disturbance,
    })
}

/// Earliest |D1| threshold crossing over the whole record, used as the event
/// time when none is given.
pub fn earliest_arrival(decomp: &DecompositionSet, threshold: f64) -> Option<f64> {
    (0..decomp.num_channels())
        .filter_map(|c| {
            let d1 = decomp.detail(c, 1)?;
            d1.iter().position(|v| v.abs() > threshold)
        })
        .min()
        .map(|n| decomp.time_at(n))
}
