use std::fmt;

/// One output band of a multilevel decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Band {
    /// Detail at level j (1-based); D1 is the highest band.
    Detail(usize),
    /// Final approximation at the given depth.
    Approximation(usize),
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Band::Detail(j) => write!(f, "D{j}"),
            Band::Approximation(l) => write!(f, "A{l}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEdges {
    pub band: Band,
    pub f_low: f64,
    pub f_high: f64,
}

impl BandEdges {
    pub fn contains(&self, f: f64) -> bool {
        f >= self.f_low && f <= self.f_high
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.f_low + self.f_high)
    }
}

/// `D1 [5.000 - 2.500 Hz]`, upper edge first. Edges are rounded half up
/// to millihertz, so 0.3125 prints as 0.313.
impl fmt::Display for BandEdges {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let milli = |x: f64| (x * 1000.0).round() / 1000.0;
        write!(f, "{} [{:.3} - {:.3} Hz]", self.band, milli(self.f_high), milli(self.f_low))
    }
}

/// Nominal dyadic frequency bands of D1..DL and AL.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMap {
    pub sample_rate: f64,
    pub levels: usize,
    /// D1, D2, ..., DL, AL.
    pub entries: Vec<BandEdges>,
}

impl BandMap {
    pub fn get(&self, band: Band) -> Option<&BandEdges> {
        self.entries.iter().find(|e| e.band == band)
    }

    /// Position of `band` in component order (D1 first, AL last).
    pub fn index_of(&self, band: Band) -> Option<usize> {
        self.entries.iter().position(|e| e.band == band)
    }

    pub fn labels(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.band.to_string()).collect()
    }
}

/// Detail level j spans [fs / 2^(j+1), fs / 2^j]; the approximation spans
/// [0, fs / 2^(levels+1)].
pub fn band_frequencies(sample_rate: f64, levels: usize) -> BandMap {
    let mut entries: Vec<BandEdges> = (1..=levels)
        .map(|j| BandEdges {
            band: Band::Detail(j),
            f_low: sample_rate / 2f64.powi(j as i32 + 1),
            f_high: sample_rate / 2f64.powi(j as i32),
        })
        .collect();
    entries.push(BandEdges {
        band: Band::Approximation(levels),
        f_low: 0.0,
        f_high: sample_rate / 2f64.powi(levels as i32 + 1),
    });
    BandMap {
        sample_rate,
        levels,
        entries,
    }
}
