use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::filters::{db4_filter_bank, FilterPair};

/// How the signal is continued past its ends at every level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Extension {
    /// Half-sample mirror: x[-1] = x[0], x[-2] = x[1], ...
    #[default]
    Symmetric,
    /// Circular wrap (periodization). Odd-length inputs are padded by
    /// repeating the last sample. Orthonormal for even lengths.
    Periodic,
    /// Zeros outside the record.
    Zero,
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Extension::Symmetric => "symmetric",
            Extension::Periodic => "periodic",
            Extension::Zero => "zero",
        })
    }
}

impl FromStr for Extension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(Extension::Symmetric),
            "periodic" => Ok(Extension::Periodic),
            "zero" => Ok(Extension::Zero),
            other => Err(Error::InvalidParameter(format!(
                "unknown extension '{other}' (expected symmetric, periodic or zero)"
            ))),
        }
    }
}

/// Raw coefficients of a multilevel DWT.
#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid {
    pub extension: Extension,
    /// Input length at each level; `input_lengths[0]` is the signal length.
    pub input_lengths: Vec<usize>,
    /// Detail coefficients, level 1 first.
    pub details: Vec<Vec<f64>>,
    pub approximation: Vec<f64>,
}

impl Pyramid {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn signal_len(&self) -> usize {
        self.input_lengths[0]
    }

    /// Sum of squares of every coefficient.
    pub fn energy(&self) -> f64 {
        self.details
            .iter()
            .chain(std::iter::once(&self.approximation))
            .flat_map(|c| c.iter())
            .map(|v| v * v)
            .sum()
    }
}

/// Multilevel DWT of `signal` with the 4-tap Daubechies bank.
///
/// Every level's input must be at least as long as the filter.
pub fn decompose(signal: &[f64], levels: usize, extension: Extension) -> Result<Pyramid> {
    let bank = db4_filter_bank();
    if levels == 0 {
        return Err(Error::InvalidParameter("levels must be >= 1".into()));
    }
    let mut input_lengths = Vec::with_capacity(levels);
    let mut details = Vec::with_capacity(levels);
    let mut approx = signal.to_vec();
    for level in 1..=levels {
        if approx.len() < bank.len() {
            return Err(Error::InsufficientLength {
                level,
                len: approx.len(),
                needed: bank.len(),
            });
        }
        input_lengths.push(approx.len());
        let (a, d) = analysis_step(&approx, &bank, extension);
        details.push(d);
        approx = a;
    }
    Ok(Pyramid {
        extension,
        input_lengths,
        details,
        approximation: approx,
    })
}

/// Inverse DWT of a full pyramid.
pub fn reconstruct(pyramid: &Pyramid) -> Vec<f64> {
    let bank = db4_filter_bank();
    let mut approx = pyramid.approximation.clone();
    for level in (0..pyramid.levels()).rev() {
        approx = synthesis_step(
            &approx,
            &pyramid.details[level],
            &bank,
            pyramid.extension,
            pyramid.input_lengths[level],
        );
    }
    approx
}

/// Full-length band components D1..DL, AL: each is the inverse transform
/// of the pyramid with every other band zeroed. They sum to the signal.
pub fn reconstruct_bands(pyramid: &Pyramid, extension: Extension) -> Result<Vec<Vec<f64>>> {
    if pyramid.extension != extension {
        return Err(Error::MismatchedExtension {
            built: pyramid.extension.to_string(),
            requested: extension.to_string(),
        });
    }
    let bank = db4_filter_bank();
    let levels = pyramid.levels();
    let mut bands = Vec::with_capacity(levels + 1);
    for j in 0..levels {
        let zeros = vec![0.0; pyramid.details[j].len()];
        let mut approx = synthesis_step(
            &zeros,
            &pyramid.details[j],
            &bank,
            extension,
            pyramid.input_lengths[j],
        );
        approx = upsample_to_signal(approx, pyramid, j, &bank);
        bands.push(approx);
    }
    let approx = upsample_to_signal(pyramid.approximation.clone(), pyramid, levels, &bank);
    bands.push(approx);
    Ok(bands)
}

/// Carry an approximation at `from_level` down to the signal length with
/// zero details.
fn upsample_to_signal(mut approx: Vec<f64>, pyramid: &Pyramid, from_level: usize, bank: &FilterPair) -> Vec<f64> {
    for level in (0..from_level).rev() {
        let zeros = vec![0.0; approx.len()];
        approx = synthesis_step(
            &approx,
            &zeros,
            bank,
            pyramid.extension,
            pyramid.input_lengths[level],
        );
    }
    approx
}

/// Offset of the filter support for coefficient m: 2m - (L - 2).
fn support_start(m: usize, filter_len: usize) -> isize {
    2 * m as isize - (filter_len as isize - 2)
}

fn analysis_step(x: &[f64], bank: &FilterPair, extension: Extension) -> (Vec<f64>, Vec<f64>) {
    let taps = bank.len();
    match extension {
        Extension::Periodic => {
            let padded = periodic_pad(x);
            let n = padded.len();
            let half = n / 2;
            let mut a = vec![0.0; half];
            let mut d = vec![0.0; half];
            for m in 0..half {
                let start = support_start(m, taps);
                for k in 0..taps {
                    let v = padded[(start + k as isize).rem_euclid(n as isize) as usize];
                    a[m] += bank.low_pass[k] * v;
                    d[m] += bank.high_pass[k] * v;
                }
            }
            (a, d)
        }
        Extension::Symmetric | Extension::Zero => {
            let n = x.len();
            let out_len = (n + taps - 1) / 2;
            let mut a = vec![0.0; out_len];
            let mut d = vec![0.0; out_len];
            for m in 0..out_len {
                let start = support_start(m, taps);
                for k in 0..taps {
                    let v = extended(x, start + k as isize, extension);
                    a[m] += bank.low_pass[k] * v;
                    d[m] += bank.high_pass[k] * v;
                }
            }
            (a, d)
        }
    }
}

/// Adjoint of [`analysis_step`], truncated to `out_len` samples. Exact
/// inverse for every extension because each output sample inside the
/// record only touches coefficients that were computed.
fn synthesis_step(a: &[f64], d: &[f64], bank: &FilterPair, extension: Extension, out_len: usize) -> Vec<f64> {
    let taps = bank.len();
    match extension {
        Extension::Periodic => {
            let n = 2 * a.len();
            let mut y = vec![0.0; n];
            for m in 0..a.len() {
                let start = support_start(m, taps);
                for k in 0..taps {
                    let pos = (start + k as isize).rem_euclid(n as isize) as usize;
                    y[pos] += bank.low_pass[k] * a[m] + bank.high_pass[k] * d[m];
                }
            }
            y.truncate(out_len);
            y
        }
        Extension::Symmetric | Extension::Zero => {
            let mut y = vec![0.0; out_len];
            for m in 0..a.len() {
                let start = support_start(m, taps);
                for k in 0..taps {
                    let pos = start + k as isize;
                    if pos >= 0 && (pos as usize) < out_len {
                        y[pos as usize] += bank.low_pass[k] * a[m] + bank.high_pass[k] * d[m];
                    }
                }
            }
            y
        }
    }
}

fn periodic_pad(x: &[f64]) -> Vec<f64> {
    let mut padded = x.to_vec();
    if padded.len() % 2 == 1 {
        padded.push(*x.last().expect("non-empty level input"));
    }
    padded
}

fn extended(x: &[f64], i: isize, extension: Extension) -> f64 {
    let n = x.len() as isize;
    if (0..n).contains(&i) {
        return x[i as usize];
    }
    match extension {
        Extension::Zero => 0.0,
        Extension::Symmetric => {
            // Half-sample mirror has period 2n.
            let j = i.rem_euclid(2 * n);
            let j = if j < n { j } else { 2 * n - 1 - j };
            x[j as usize]
        }
        Extension::Periodic => x[i.rem_euclid(n) as usize],
    }
}
