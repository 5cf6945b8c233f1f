//! Diagnostics over band components: D1-energy localization, deepest-detail
//! coherency grouping and approximation-slope ROCOF.

mod coherency;
mod localization;
mod rocof;
mod stats;

pub use coherency::{coherency_groups, CoherencyPartition, CoherentGroup, GroupMembership};
pub use localization::{d1_energy, earliest_arrival, localize, EnergyProfile, LocalizationReport};
pub use rocof::{estimate_rocof, ChannelSlope, RocofEstimate, MIN_FIT_SAMPLES};
pub use stats::{linear_fit, pearson, LineFit};

/// Length of the default energy window after the event, seconds.
pub const DEFAULT_ENERGY_SPAN: f64 = 0.4;
/// Default detection threshold on |D1|, Hz.
pub const DEFAULT_THRESHOLD: f64 = 5e-4;
pub const DEFAULT_THETA_IN: f64 = 0.8;
pub const DEFAULT_THETA_OUT: f64 = 0.5;
/// Channels whose deepest-detail RMS is below this fraction of the largest
/// channel RMS are weakly participating.
pub const WEAK_PARTICIPATION_RATIO: f64 = 0.25;
/// Default ROCOF fit window, seconds after the event: skips the
/// inter-machine transient.
pub const DEFAULT_FIT_OFFSET: (f64, f64) = (3.0, 9.0);

/// Closed time window in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn new(start: f64, end: f64) -> Self {
        Window { start, end }
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:.3}, {:.3}]", self.start, self.end)
    }
}
