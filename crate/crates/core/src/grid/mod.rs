//! Classical multi-machine swing-equation networks.
//!
//! Every node is a generator behind a constant internal EMF; lines are
//! lossless susceptances between machine nodes. Machine quantities are
//! converted to the system base before integration.

mod benchmark;
mod model;
mod simulate;

pub use benchmark::{build_benchmark, BenchmarkSpec, GeneratorOverride, Topology};
pub use model::{GeneratorParams, Line, SystemModel};
pub use simulate::{
    coi_frequency, simulate, simulate_events, DisturbanceEvent, SimulationResult, SwingIntegrator,
    OUTPUT_SAMPLE_RATE,
};
