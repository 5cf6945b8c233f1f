//! TOML scenario files.
//!
//! ```toml
//! duration = 20.0
//! dt = 0.001
//!
//! [topology]
//! kind = "ring"        # ring | chain | two_area
//! nodes = 20
//!
//! [generator]
//! inertia_h = 4.0
//! damping_d = 1.0
//!
//! [[events]]
//! node = 7
//! time = 1.0
//! delta_p = -0.05
//! ```

use std::path::Path;

use anyhow::{Context, Result};
use emwave::grid::{
    BenchmarkSpec, DisturbanceEvent, GeneratorOverride, GeneratorParams, SystemModel, Topology,
};
use serde::Deserialize;

fn default_duration() -> f64 {
    20.0
}

fn default_dt() -> f64 {
    1e-3
}

fn default_frequency() -> f64 {
    60.0
}

fn default_base() -> f64 {
    100.0
}

fn default_line_b() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub topology: TopologySpec,
    #[serde(default)]
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub overrides: Vec<OverrideSpec>,
    #[serde(default)]
    pub events: Vec<EventSpec>,
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_frequency")]
    pub nominal_frequency: f64,
    #[serde(default = "default_base")]
    pub base_mva: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologySpec {
    Ring {
        nodes: usize,
        #[serde(default = "default_line_b")]
        line_susceptance: f64,
    },
    Chain {
        nodes: usize,
        #[serde(default = "default_line_b")]
        line_susceptance: f64,
    },
    TwoArea {
        per_area: usize,
        tie_susceptance: f64,
        #[serde(default = "default_line_b")]
        line_susceptance: f64,
    },
}

/// Unset fields fall back to [`GeneratorParams::default`].
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub inertia_h: Option<f64>,
    pub damping_d: Option<f64>,
    pub rating_mva: Option<f64>,
    pub emf: Option<f64>,
    pub mech_power: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideSpec {
    pub node: usize,
    pub inertia_h: Option<f64>,
    pub damping_d: Option<f64>,
    pub rating_mva: Option<f64>,
    pub emf: Option<f64>,
    pub mech_power: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventSpec {
    pub node: usize,
    pub time: f64,
    pub delta_p: f64,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read scenario {}", path.display()))?;
        Scenario::parse(&text).with_context(|| format!("invalid scenario {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Scenario> {
        Ok(toml::from_str(text)?)
    }

    pub fn benchmark_spec(&self) -> BenchmarkSpec {
        let (topology, line_b) = match self.topology {
            TopologySpec::Ring { nodes, line_susceptance } => (Topology::Ring { nodes }, line_susceptance),
            TopologySpec::Chain { nodes, line_susceptance } => (Topology::Chain { nodes }, line_susceptance),
            TopologySpec::TwoArea {
                per_area,
                tie_susceptance,
                line_susceptance,
            } => (
                Topology::TwoArea {
                    per_area,
                    tie_susceptance,
                },
                line_susceptance,
            ),
        };
        let d = GeneratorParams::default();
        let g = &self.generator;
        let generator = GeneratorParams {
            inertia_h: g.inertia_h.unwrap_or(d.inertia_h),
            damping_d: g.damping_d.unwrap_or(d.damping_d),
            rating_mva: g.rating_mva.unwrap_or(d.rating_mva),
            emf: g.emf.unwrap_or(d.emf),
            mech_power: g.mech_power.unwrap_or(d.mech_power),
        };
        let mut spec = BenchmarkSpec::new(topology)
            .with_generator(generator)
            .with_line_susceptance(line_b);
        spec.nominal_frequency = self.nominal_frequency;
        spec.base_mva = self.base_mva;
        for o in &self.overrides {
            spec = spec.with_override(GeneratorOverride {
                node: o.node,
                inertia_h: o.inertia_h,
                damping_d: o.damping_d,
                rating_mva: o.rating_mva,
                emf: o.emf,
                mech_power: o.mech_power,
            });
        }
        spec
    }

    pub fn build_model(&self) -> emwave::Result<SystemModel> {
        self.benchmark_spec().build()
    }

    pub fn disturbance_events(&self) -> Vec<DisturbanceEvent> {
        self.events
            .iter()
            .map(|e| DisturbanceEvent::new(e.node, e.time, e.delta_p))
            .collect()
    }

    /// Time of the first scheduled event, if any.
    pub fn first_event_time(&self) -> Option<f64> {
        self.events.iter().map(|e| e.time).min_by(f64::total_cmp)
    }
}
