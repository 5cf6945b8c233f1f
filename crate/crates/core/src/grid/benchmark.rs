use crate::error::{Error, Result};

use super::model::{GeneratorParams, Line, SystemModel};

/// Benchmark network shapes standing in for a large interconnection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topology {
    /// Nodes 0..n in a closed loop.
    Ring { nodes: usize },
    /// Nodes 0..n in a line.
    Chain { nodes: usize },
    /// Two chains of `per_area` nodes joined end to start by one weak tie.
    /// Area 1 is nodes 0..per_area, area 2 the rest.
    TwoArea { per_area: usize, tie_susceptance: f64 },
}

impl Topology {
    pub fn num_nodes(&self) -> usize {
        match *self {
            Topology::Ring { nodes } | Topology::Chain { nodes } => nodes,
            Topology::TwoArea { per_area, .. } => 2 * per_area,
        }
    }
}

/// Per-node replacements for the benchmark's default generator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GeneratorOverride {
    pub node: usize,
    pub inertia_h: Option<f64>,
    pub damping_d: Option<f64>,
    pub rating_mva: Option<f64>,
    pub emf: Option<f64>,
    pub mech_power: Option<f64>,
}

impl GeneratorOverride {
    fn apply(&self, g: &mut GeneratorParams) {
        if let Some(v) = self.inertia_h {
            g.inertia_h = v;
        }
        if let Some(v) = self.damping_d {
            g.damping_d = v;
        }
        if let Some(v) = self.rating_mva {
            g.rating_mva = v;
        }
        if let Some(v) = self.emf {
            g.emf = v;
        }
        if let Some(v) = self.mech_power {
            g.mech_power = v;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub topology: Topology,
    pub generator: GeneratorParams,
    /// Susceptance of every line except a two-area tie, per unit.
    pub line_susceptance: f64,
    pub nominal_frequency: f64,
    pub base_mva: f64,
    pub overrides: Vec<GeneratorOverride>,
}

impl BenchmarkSpec {
    pub fn new(topology: Topology) -> Self {
        BenchmarkSpec {
            topology,
            generator: GeneratorParams::default(),
            line_susceptance: 1.0,
            nominal_frequency: 60.0,
            base_mva: 100.0,
            overrides: Vec::new(),
        }
    }

    pub fn with_generator(mut self, generator: GeneratorParams) -> Self {
        self.generator = generator;
        self
    }

    pub fn with_line_susceptance(mut self, b: f64) -> Self {
        self.line_susceptance = b;
        self
    }

    pub fn with_override(mut self, o: GeneratorOverride) -> Self {
        self.overrides.push(o);
        self
    }

    pub fn build(&self) -> Result<SystemModel> {
        build_benchmark(self)
    }
}

/// Build a benchmark network and solve its steady state.
pub fn build_benchmark(spec: &BenchmarkSpec) -> Result<SystemModel> {
    let n = spec.topology.num_nodes();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "benchmark needs at least 2 nodes, got {n}"
        )));
    }
    let b = spec.line_susceptance;
    let lines = match spec.topology {
        Topology::Ring { nodes } => {
            let mut lines: Vec<Line> = (0..nodes - 1).map(|k| Line::new(k, k + 1, b)).collect();
            // A 2-node "ring" is a single line.
            if nodes > 2 {
                lines.push(Line::new(nodes - 1, 0, b));
            }
            lines
        }
        Topology::Chain { nodes } => (0..nodes - 1).map(|k| Line::new(k, k + 1, b)).collect(),
        Topology::TwoArea {
            per_area,
            tie_susceptance,
        } => {
            if !(tie_susceptance < b) {
                return Err(Error::InvalidParameter(format!(
                    "weak tie susceptance {tie_susceptance} must be below intra-area susceptance {b}"
                )));
            }
            let mut lines = Vec::with_capacity(2 * per_area - 1);
            for area in 0..2 {
                let base = area * per_area;
                lines.extend((0..per_area - 1).map(|k| Line::new(base + k, base + k + 1, b)));
            }
            lines.push(Line::new(per_area - 1, per_area, tie_susceptance));
            lines
        }
    };

    let mut generators = vec![spec.generator; n];
    for o in &spec.overrides {
        let g = generators.get_mut(o.node).ok_or_else(|| {
            Error::InvalidParameter(format!("override for node {} outside 0..{n}", o.node))
        })?;
        o.apply(g);
    }
    SystemModel::new(generators, lines, spec.nominal_frequency, spec.base_mva)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_ring_is_flat() {
        let m = BenchmarkSpec::new(Topology::Ring { nodes: 20 }).build().unwrap();
        assert_eq!(m.num_nodes(), 20);
        assert_eq!(m.lines().len(), 20);
        assert!(m.initial_angles().iter().all(|&a| a == 0.0));
        assert!(m.electrical_power(m.initial_angles()).iter().all(|&p| p == 0.0));
    }

    #[test]
    fn two_area_with_transfer_solves_steady_state() {
        let mut spec = BenchmarkSpec::new(Topology::TwoArea {
            per_area: 2,
            tie_susceptance: 0.1,
        });
        for (node, pm) in [(0, 0.04), (1, 0.02), (2, -0.01), (3, -0.05)] {
            spec = spec.with_override(GeneratorOverride {
                node,
                mech_power: Some(pm),
                ..Default::default()
            });
        }
        let m = spec.build().unwrap();
        assert_eq!(m.num_nodes(), 4);
        assert!(m.hop_distances(0).iter().all(Option::is_some));
        assert!(m.power_balance_residual(m.initial_angles()) < 1e-8);
        // Tie carries the whole area-1 surplus.
        let tie = (0.06f64 / 0.1).asin();
        let got = m.initial_angles()[1] - m.initial_angles()[2];
        assert!((got - tie).abs() < 1e-10);
    }

    #[test]
    fn zero_susceptance_chain_is_disconnected() {
        let err = BenchmarkSpec::new(Topology::Chain { nodes: 2 })
            .with_line_susceptance(0.0)
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::DisconnectedTopology(_)));
    }

    #[test]
    fn tie_must_be_weaker() {
        let err = BenchmarkSpec::new(Topology::TwoArea {
            per_area: 2,
            tie_susceptance: 1.5,
        })
        .build()
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn too_small_and_bad_override() {
        assert!(BenchmarkSpec::new(Topology::Ring { nodes: 1 }).build().is_err());
        let err = BenchmarkSpec::new(Topology::Chain { nodes: 3 })
            .with_override(GeneratorOverride {
                node: 3,
                inertia_h: Some(2.0),
                ..Default::default()
            })
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }
}
