//! Uniformly sampled multi-channel frequency-deviation records.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Maximum allowed deviation of any time step from the median step, as a
/// fraction of the median, when inferring the sample rate from a file.
pub const MAX_STEP_JITTER: f64 = 0.01;

/// Anti-alias cutoff as a fraction of the target sample rate.
pub const ANTI_ALIAS_CUTOFF_RATIO: f64 = 0.45;

/// Full transition width of the anti-alias filter as a fraction of the
/// target sample rate. With the 0.45 cutoff the stopband starts at 0.55.
pub const ANTI_ALIAS_TRANSITION_RATIO: f64 = 0.3;

/// Blackman window: taps = 5.5 / (normalized transition width).
const WINDOW_LEN_FACTOR: f64 = 5.5;

/// A named sample sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub label: String,
    pub samples: Vec<f64>,
}

impl Channel {
    pub fn new(label: impl Into<String>, samples: Vec<f64>) -> Self {
        Channel {
            label: label.into(),
            samples,
        }
    }
}

/// Multi-channel record sampled at `sample_rate` Hz starting at `start_time`.
///
/// All channels have the same length and unique labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSet {
    sample_rate: f64,
    start_time: f64,
    channels: Vec<Channel>,
}

impl SignalSet {
    pub fn new(sample_rate: f64, start_time: f64, channels: Vec<Channel>) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive, got {sample_rate}"
            )));
        }
        if !start_time.is_finite() {
            return Err(Error::InvalidParameter("start time must be finite".into()));
        }
        if let Some(first) = channels.first() {
            let len = first.samples.len();
            if let Some(bad) = channels.iter().find(|c| c.samples.len() != len) {
                return Err(Error::MalformedSignal(format!(
                    "channel '{}' has {} samples, expected {}",
                    bad.label,
                    bad.samples.len(),
                    len
                )));
            }
        }
        let mut seen = HashSet::new();
        for c in &channels {
            if !seen.insert(c.label.as_str()) {
                return Err(Error::MalformedSignal(format!(
                    "duplicate channel label '{}'",
                    c.label
                )));
            }
        }
        Ok(SignalSet {
            sample_rate,
            start_time,
            channels,
        })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel(&self, label: &str) -> Option<&Channel> {
        self.channels.iter().find(|c| c.label == label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|c| c.label.as_str())
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    /// Samples per channel (0 for an empty set).
    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, |c| c.samples.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn time_at(&self, index: usize) -> f64 {
        self.start_time + index as f64 / self.sample_rate
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.time_at(n)).collect()
    }

    /// Multiply every sample by `factor`.
    pub fn scaled(&self, factor: f64) -> SignalSet {
        SignalSet {
            sample_rate: self.sample_rate,
            start_time: self.start_time,
            channels: self
                .channels
                .iter()
                .map(|c| Channel::new(c.label.clone(), c.samples.iter().map(|v| v * factor).collect()))
                .collect(),
        }
    }

    /// Anti-alias low-pass at 0.45 * `target_fs`, then integer decimation.
    ///
    /// The output keeps samples 0, R, 2R, ... of the filtered record, so a
    /// record of length N becomes ceil(N / R) samples with the same start time.
    pub fn resample(&self, target_fs: f64) -> Result<SignalSet> {
        let ratio = decimation_ratio(self.sample_rate, target_fs)?;
        if ratio == 1 {
            return Ok(self.clone());
        }
        let taps = anti_alias_taps(self.sample_rate, target_fs);
        let channels = self
            .channels
            .iter()
            .map(|c| Channel::new(c.label.clone(), filter_decimate(&c.samples, &taps, ratio)))
            .collect();
        Ok(SignalSet {
            sample_rate: target_fs,
            start_time: self.start_time,
            channels,
        })
    }

    /// CSV text with header `time,<label>...`; times with
    /// [`time_decimals`] places and values in scientific notation with 16
    /// significant digits.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("time");
        for c in &self.channels {
            out.push(',');
            out.push_str(&c.label);
        }
        out.push('\n');
        let places = time_decimals(self.sample_rate);
        for n in 0..self.len() {
            out.push_str(&format!("{:.*}", places, self.time_at(n)));
            for c in &self.channels {
                out.push(',');
                out.push_str(&format_value(c.samples[n]));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv_string().as_bytes())?;
        Ok(())
    }

    /// Parse a CSV record. The sample rate is inferred from the median time
    /// step; any step deviating more than 1% from it is rejected.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<SignalSet> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::MalformedSignal(e.to_string()))?
            .clone();
        if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
            return Err(Error::MalformedSignal("empty file".into()));
        }
        if &headers[0] != "time" {
            return Err(Error::MalformedSignal(format!(
                "first header column must be 'time', found '{}'",
                &headers[0]
            )));
        }
        let labels: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        if let Some(empty) = labels.iter().position(|l| l.is_empty()) {
            return Err(Error::MalformedSignal(format!(
                "header column {} has an empty label",
                empty + 2
            )));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::MalformedSignal(format!("duplicate channel label '{l}'")));
            }
        }

        let mut times = Vec::new();
        let mut data: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
        for (i, record) in rdr.records().enumerate() {
            let row = i + 1;
            let record = record.map_err(|e| Error::MalformedSignal(format!("row {row}: {e}")))?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            for col in 0..headers.len() {
                let name = &headers[col];
                let cell = record.get(col).unwrap_or("");
                if cell.is_empty() {
                    return Err(Error::MalformedSignal(format!(
                        "missing value at row {row}, column '{name}'"
                    )));
                }
                let v: f64 = cell.parse().map_err(|_| {
                    Error::MalformedSignal(format!(
                        "unparseable value '{cell}' at row {row}, column '{name}'"
                    ))
                })?;
                if !v.is_finite() {
                    return Err(Error::MalformedSignal(format!(
                        "non-finite value at row {row}, column '{name}'"
                    )));
                }
                if col == 0 {
                    times.push(v);
                } else {
                    data[col - 1].push(v);
                }
            }
            if record.len() > headers.len() {
                return Err(Error::MalformedSignal(format!(
                    "row {row} has {} fields, header has {}",
                    record.len(),
                    headers.len()
                )));
            }
        }
        if times.is_empty() {
            return Err(Error::MalformedSignal("empty file: no data rows".into()));
        }
        if times.len() < 2 {
            return Err(Error::MalformedSignal(
                "at least two rows are needed to infer the sample rate".into(),
            ));
        }
        let sample_rate = infer_sample_rate(&times)?;
        let channels = labels
            .into_iter()
            .zip(data)
            .map(|(l, s)| Channel::new(l, s))
            .collect();
        SignalSet::new(sample_rate, times[0], channels)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<SignalSet> {
        let f = std::fs::File::open(path)?;
        SignalSet::from_csv_reader(std::io::BufReader::new(f))
    }
}

/// Decimal places for writing time stamps at `sample_rate`: the fewest
/// from 3 to 9 that represent the sample step exactly.
pub fn time_decimals(sample_rate: f64) -> usize {
    let step = 1.0 / sample_rate;
    (3..=9)
        .find(|&p| {
            let scale = 10f64.powi(p as i32);
            ((step * scale).round() / scale - step).abs() <= 1e-12 * step
        })
        .unwrap_or(9)
}

pub(crate) fn format_value(v: f64) -> String {
    format!("{v:.15e}")
}

fn infer_sample_rate(times: &[f64]) -> Result<f64> {
    let mut steps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    let mut sorted = steps.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 0 {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    };
    if median <= 0.0 {
        return Err(Error::NonuniformSampling(
            "time column is not strictly increasing".into(),
        ));
    }
    for (i, s) in steps.drain(..).enumerate() {
        if (s - median).abs() > MAX_STEP_JITTER * median {
            return Err(Error::NonuniformSampling(format!(
                "step {:.6} s between rows {} and {} deviates more than 1% from median step {:.6} s",
                s,
                i + 1,
                i + 2,
                median
            )));
        }
    }
    let fs = 1.0 / median;
    // Timestamps are written with limited precision; snap to an integer rate
    // when the median step is consistent with one.
    let rounded = fs.round();
    if rounded > 0.0 && (fs - rounded).abs() <= 1e-6 * fs {
        Ok(rounded)
    } else {
        Ok(fs)
    }
}

pub(crate) fn decimation_ratio(source_fs: f64, target_fs: f64) -> Result<usize> {
    if !(target_fs.is_finite() && target_fs > 0.0) || target_fs > source_fs {
        return Err(Error::NonIntegerDecimation {
            source_fs,
            target_fs,
        });
    }
    let ratio = source_fs / target_fs;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > 1e-9 * ratio {
        return Err(Error::NonIntegerDecimation {
            source_fs,
            target_fs,
        });
    }
    Ok(rounded as usize)
}

/// Hamming-windowed sinc low-pass for decimating `source_fs` to `target_fs`,
/// normalized to unit DC gain. Odd length, symmetric.
pub fn anti_alias_taps(source_fs: f64, target_fs: f64) -> Vec<f64> {
    let cutoff = ANTI_ALIAS_CUTOFF_RATIO * target_fs / source_fs;
    let transition = ANTI_ALIAS_TRANSITION_RATIO * target_fs / source_fs;
    let mut len = (WINDOW_LEN_FACTOR / transition).ceil() as usize;
    if len % 2 == 0 {
        len += 1;
    }
    let half = (len / 2) as f64;
    let mut taps: Vec<f64> = (0..len)
        .map(|k| {
            let x = k as f64 - half;
            let sinc = if x == 0.0 {
                2.0 * cutoff
            } else {
                (2.0 * PI * cutoff * x).sin() / (PI * x)
            };
            let phase = 2.0 * PI * k as f64 / (len - 1) as f64;
            let window = 0.42 - 0.5 * phase.cos() + 0.08 * (2.0 * phase).cos();
            sinc * window
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Zero-phase FIR evaluated only at every `ratio`-th sample, with
/// whole-sample mirror extension at both ends.
fn filter_decimate(x: &[f64], taps: &[f64], ratio: usize) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let half = (taps.len() / 2) as isize;
    (0..n)
        .step_by(ratio)
        .map(|center| {
            taps.iter()
                .enumerate()
                .map(|(k, &h)| h * x[mirror_index(center as isize + k as isize - half, n)])
                .sum()
        })
        .collect()
}

fn mirror_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let mut j = i.rem_euclid(period);
    if j >= n as isize {
        j = period - j;
    }
    j as usize
}
