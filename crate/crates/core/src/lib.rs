//! Electromechanical disturbance simulation and wavelet diagnostics for
//! multi-machine power networks.
//!
//! The crate has three layers:
//!
//! - [`grid`]: classical swing-equation network models, benchmark topologies
//!   (ring, chain, two-area) and a fixed-step RK4 simulator producing bus
//!   frequency-deviation records at 10 Hz.
//! - [`wavelet`]: the 4-tap Daubechies filter bank, multilevel DWT and
//!   full-length band reconstruction (D1..DL, AL).
//! - [`analysis`]: D1-energy disturbance localization, D5 coherency
//!   partitioning and A5-slope ROCOF estimation.
//!
//! [`signal`] holds the shared [`SignalSet`] container, the anti-alias
//! resampler and CSV serialization.

pub mod analysis;
pub mod error;
pub mod grid;
pub mod signal;
pub mod wavelet;

pub use error::{Error, Result};
pub use signal::SignalSet;
