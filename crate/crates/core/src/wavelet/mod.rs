//! Daubechies 4-tap multilevel DWT and multiresolution band components.
//!
//! "Db4" here follows the power-system literature's naming by coefficient
//! count: the 4-tap orthogonal Daubechies wavelet with two vanishing
//! moments, which other libraries call `db2`.

mod bands;
mod dwt;
mod filters;
mod set;

pub use bands::{band_frequencies, Band, BandEdges, BandMap};
pub use dwt::{decompose, reconstruct, reconstruct_bands, Extension, Pyramid};
pub use filters::{db4_filter_bank, FilterPair};
pub use set::{decompose_set, ChannelBands, DecompositionSet};

/// Depth used by the standard 10 Hz analysis: D1..D5 and A5.
pub const DEFAULT_LEVELS: usize = 5;
