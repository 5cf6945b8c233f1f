use crate::error::{Error, Result};
use crate::signal::{format_value, time_decimals, SignalSet};

use super::bands::{band_frequencies, Band, BandMap};
use super::dwt::{decompose, reconstruct_bands, Extension};

/// Full-length band components of one channel, in band-map order
/// (D1..DL, AL).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBands {
    pub label: String,
    pub components: Vec<Vec<f64>>,
}

/// Band components for every channel of a record.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionSet {
    sample_rate: f64,
    start_time: f64,
    len: usize,
    extension: Extension,
    band_map: BandMap,
    channels: Vec<ChannelBands>,
}

impl DecompositionSet {
    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    /// Samples per component.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn levels(&self) -> usize {
        self.band_map.levels
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn band_map(&self) -> &BandMap {
        &self.band_map
    }

    pub fn channels(&self) -> &[ChannelBands] {
        &self.channels
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.channels.iter().map(|c| c.label.as_str()).collect()
    }

    pub fn time_at(&self, index: usize) -> f64 {
        self.start_time + index as f64 / self.sample_rate
    }

    /// Component `band` of channel `channel`, if both exist.
    pub fn component(&self, channel: usize, band: Band) -> Option<&[f64]> {
        let idx = self.band_map.index_of(band)?;
        self.channels.get(channel).map(|c| c.components[idx].as_slice())
    }

    pub fn detail(&self, channel: usize, level: usize) -> Option<&[f64]> {
        self.component(channel, Band::Detail(level))
    }

    pub fn approximation(&self, channel: usize) -> Option<&[f64]> {
        self.component(channel, Band::Approximation(self.levels()))
    }

    /// Sample index range covering the closed time window `[t0, t1]`.
    pub(crate) fn window_indices(&self, t0: f64, t1: f64) -> Result<std::ops::Range<usize>> {
        window_indices(self.start_time, self.sample_rate, self.len, t0, t1)
    }

    /// One CSV per channel: `time,D1,...,DL,AL`.
    pub fn channel_csv(&self, channel: usize) -> Option<String> {
        let c = self.channels.get(channel)?;
        let mut out = String::from("time");
        for label in self.band_map.labels() {
            out.push(',');
            out.push_str(&label);
        }
        out.push('\n');
        let places = time_decimals(self.sample_rate);
        for n in 0..self.len {
            out.push_str(&format!("{:.*}", places, self.time_at(n)));
            for comp in &c.components {
                out.push(',');
                out.push_str(&format_value(comp[n]));
            }
            out.push('\n');
        }
        Some(out)
    }

    /// Multiply every component by `factor`.
    pub fn scaled(&self, factor: f64) -> DecompositionSet {
        let mut out = self.clone();
        for c in &mut out.channels {
            for comp in &mut c.components {
                comp.iter_mut().for_each(|v| *v *= factor);
            }
        }
        out
    }
}

pub(crate) fn window_indices(
    start: f64,
    fs: f64,
    len: usize,
    t0: f64,
    t1: f64,
) -> Result<std::ops::Range<usize>> {
    let invalid = |reason: &str| Error::InvalidWindow {
        t0,
        t1,
        reason: reason.to_string(),
    };
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(invalid("window is empty"));
    }
    let end = start + len.saturating_sub(1) as f64 / fs;
    let eps = 1e-9 / fs;
    if len == 0 || t0 < start - eps || t1 > end + eps {
        return Err(invalid(&format!("outside the record [{start}, {end}]")));
    }
    let first = ((t0 - start) * fs - 1e-6).ceil().max(0.0) as usize;
    let last = (((t1 - start) * fs + 1e-6).floor() as usize).min(len - 1);
    if first > last {
        return Err(invalid("window contains no samples"));
    }
    Ok(first..last + 1)
}

/// Decompose every channel and reconstruct its band components.
///
/// Errors carry the label of the failing channel.
pub fn decompose_set(signals: &SignalSet, levels: usize, extension: Extension) -> Result<DecompositionSet> {
    if levels == 0 {
        return Err(Error::InvalidParameter("levels must be >= 1".into()));
    }
    let channels = signals
        .channels()
        .iter()
        .map(|c| {
            let pyramid = decompose(&c.samples, levels, extension).map_err(|e| e.in_channel(&c.label))?;
            let components = reconstruct_bands(&pyramid, extension).map_err(|e| e.in_channel(&c.label))?;
            Ok(ChannelBands {
                label: c.label.clone(),
                components,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecompositionSet {
        sample_rate: signals.sample_rate(),
        start_time: signals.start_time(),
        len: signals.len(),
        extension,
        band_map: band_frequencies(signals.sample_rate(), levels),
        channels,
    })
}
