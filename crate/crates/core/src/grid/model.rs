use std::collections::VecDeque;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;
/// Largest power-balance residual accepted for a steady state, per unit.
pub const STEADY_STATE_TOL: f64 = 1e-8;

/// Classical machine parameters.
///
/// `inertia_h` is in seconds and `damping_d` in per-unit torque per per-unit
/// speed, both on the machine base `rating_mva`. `emf` is per unit and
/// `mech_power` is per unit on the system base; a negative value is a net
/// load at that node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorParams {
    pub inertia_h: f64,
    pub damping_d: f64,
    pub rating_mva: f64,
    pub emf: f64,
    pub mech_power: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            inertia_h: 4.0,
            damping_d: 1.0,
            rating_mva: 100.0,
            emf: 1.0,
            mech_power: 0.0,
        }
    }
}

impl GeneratorParams {
    fn validate(&self, node: usize) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::InvalidParameter(format!("generator {node}: {what} = {v}")))
        };
        if !(self.inertia_h.is_finite() && self.inertia_h > 0.0) {
            return bad("inertia H must be > 0", self.inertia_h);
        }
        if !(self.damping_d.is_finite() && self.damping_d >= 0.0) {
            return bad("damping D must be >= 0", self.damping_d);
        }
        if !(self.rating_mva.is_finite() && self.rating_mva > 0.0) {
            return bad("rating S must be > 0", self.rating_mva);
        }
        if !(self.emf.is_finite() && self.emf > 0.0) {
            return bad("EMF E must be > 0", self.emf);
        }
        if !self.mech_power.is_finite() {
            return bad("mechanical power must be finite", self.mech_power);
        }
        Ok(())
    }
}

/// Lossless line between two machine nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub from: usize,
    pub to: usize,
    pub susceptance: f64,
}

impl Line {
    pub fn new(from: usize, to: usize, susceptance: f64) -> Self {
        Line {
            from,
            to,
            susceptance,
        }
    }
}

/// A validated network with a solved steady state.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    generators: Vec<GeneratorParams>,
    lines: Vec<Line>,
    nominal_frequency: f64,
    base_mva: f64,
    initial_angles: Vec<f64>,
}

impl SystemModel {
    /// Validate the network and solve for the steady-state angles.
    ///
    /// Zero-susceptance lines count as open for the connectivity check.
    pub fn new(
        generators: Vec<GeneratorParams>,
        lines: Vec<Line>,
        nominal_frequency: f64,
        base_mva: f64,
    ) -> Result<Self> {
        if generators.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 generators, got {}",
                generators.len()
            )));
        }
        if !(nominal_frequency.is_finite() && nominal_frequency > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "nominal frequency must be > 0, got {nominal_frequency}"
            )));
        }
        if !(base_mva.is_finite() && base_mva > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "base power must be > 0, got {base_mva}"
            )));
        }
        for (i, g) in generators.iter().enumerate() {
            g.validate(i)?;
        }
        let n = generators.len();
        for l in &lines {
            if l.from >= n || l.to >= n {
                return Err(Error::InvalidParameter(format!(
                    "line {}-{} references a node outside 0..{n}",
                    l.from, l.to
                )));
            }
            if l.from == l.to {
                return Err(Error::InvalidParameter(format!("line {}-{} is a self loop", l.from, l.to)));
            }
            if !(l.susceptance.is_finite() && l.susceptance >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "line {}-{} susceptance must be > 0, got {}",
                    l.from, l.to, l.susceptance
                )));
            }
        }
        let lines: Vec<Line> = lines.into_iter().filter(|l| l.susceptance > 0.0).collect();
        let mut model = SystemModel {
            generators,
            lines,
            nominal_frequency,
            base_mva,
            initial_angles: vec![0.0; n],
        };
        let reach = model.hop_distances(0);
        if let Some(island) = reach.iter().position(Option::is_none) {
            return Err(Error::DisconnectedTopology(format!(
                "node {island} is not reachable from node 0"
            )));
        }
        model.initial_angles = model.solve_steady_state()?;
        Ok(model)
    }

    pub fn generators(&self) -> &[GeneratorParams] {
        &self.generators
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn num_nodes(&self) -> usize {
        self.generators.len()
    }

    pub fn nominal_frequency(&self) -> f64 {
        self.nominal_frequency
    }

    pub fn base_mva(&self) -> f64 {
        self.base_mva
    }

    pub fn initial_angles(&self) -> &[f64] {
        &self.initial_angles
    }

    /// Synchronous speed in rad/s.
    pub fn synchronous_speed(&self) -> f64 {
        2.0 * PI * self.nominal_frequency
    }

    /// Inertia coefficients M_i = 2 H_i S_i / (w_s S_base), in pu s^2/rad.
    pub fn inertia_coefficients(&self) -> Vec<f64> {
        let ws = self.synchronous_speed();
        self.generators
            .iter()
            .map(|g| 2.0 * g.inertia_h * g.rating_mva / (ws * self.base_mva))
            .collect()
    }

    /// Damping coefficients on the system base, in pu power per rad/s.
    pub fn damping_coefficients(&self) -> Vec<f64> {
        let ws = self.synchronous_speed();
        self.generators
            .iter()
            .map(|g| g.damping_d * g.rating_mva / (ws * self.base_mva))
            .collect()
    }

    /// H_i S_i in MW s, the weights of the center-of-inertia average.
    pub fn inertia_weights(&self) -> Vec<f64> {
        self.generators.iter().map(|g| g.inertia_h * g.rating_mva).collect()
    }

    /// Aggregate inertia constant sum(H_i S_i) / S_base, in seconds.
    pub fn aggregate_inertia(&self) -> f64 {
        self.inertia_weights().iter().sum::<f64>() / self.base_mva
    }

    pub fn mech_powers(&self) -> Vec<f64> {
        self.generators.iter().map(|g| g.mech_power).collect()
    }

    /// Electrical power injection at every node for the given angles.
    pub fn electrical_power(&self, angles: &[f64]) -> Vec<f64> {
        let mut pe = vec![0.0; self.num_nodes()];
        self.electrical_power_into(angles, &mut pe);
        pe
    }

    pub(crate) fn electrical_power_into(&self, angles: &[f64], pe: &mut [f64]) {
        pe.iter_mut().for_each(|p| *p = 0.0);
        for l in &self.lines {
            let (i, j) = (l.from, l.to);
            let flow = self.generators[i].emf
                * self.generators[j].emf
                * l.susceptance
                * (angles[i] - angles[j]).sin();
            pe[i] += flow;
            pe[j] -= flow;
        }
    }

    /// Largest |Pm_i - Pe_i| at the given angles.
    pub fn power_balance_residual(&self, angles: &[f64]) -> f64 {
        self.electrical_power(angles)
            .iter()
            .zip(&self.generators)
            .map(|(pe, g)| (g.mech_power - pe).abs())
            .fold(0.0, f64::max)
    }

    /// Largest |delta_i - delta_j| over all lines.
    pub fn max_line_angle(&self, angles: &[f64]) -> f64 {
        self.lines
            .iter()
            .map(|l| (angles[l.from] - angles[l.to]).abs())
            .fold(0.0, f64::max)
    }

    /// Breadth-first hop counts from `source`; `None` for unreachable nodes.
    pub fn hop_distances(&self, source: usize) -> Vec<Option<usize>> {
        let n = self.num_nodes();
        let mut adjacency = vec![Vec::new(); n];
        for l in &self.lines {
            adjacency[l.from].push(l.to);
            adjacency[l.to].push(l.from);
        }
        let mut dist = vec![None; n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &v in &adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Newton power flow with node 0 as the angle reference.
    fn solve_steady_state(&self) -> Result<Vec<f64>> {
        let n = self.num_nodes();
        let pm = self.mech_powers();
        if pm.iter().all(|&p| p == 0.0) {
            return Ok(vec![0.0; n]);
        }
        let total: f64 = pm.iter().sum();
        let scale = pm.iter().map(|p| p.abs()).fold(1.0, f64::max);
        if total.abs() > 1e-12 * scale {
            return Err(Error::NoEquilibrium(format!(
                "mechanical powers sum to {total:.3e} pu; a lossless network needs exact balance"
            )));
        }

        let mut angles = vec![0.0; n];
        for _ in 0..NEWTON_MAX_ITER {
            let pe = self.electrical_power(&angles);
            let mismatch = DVector::from_iterator(n - 1, (1..n).map(|i| pm[i] - pe[i]));
            if mismatch.amax() < NEWTON_TOL {
                break;
            }
            let jac = self.power_jacobian(&angles);
            let step = jac
                .lu()
                .solve(&mismatch)
                .ok_or_else(|| Error::NoEquilibrium("singular power-flow Jacobian".into()))?;
            for i in 1..n {
                angles[i] += step[i - 1];
            }
        }
        let residual = self.power_balance_residual(&angles);
        if !(residual < STEADY_STATE_TOL) {
            return Err(Error::NoEquilibrium(format!(
                "power flow did not converge (residual {residual:.3e} pu)"
            )));
        }
        if self.max_line_angle(&angles) >= PI / 2.0 {
            return Err(Error::NoEquilibrium(
                "only an unstable operating point exists (line angle beyond 90 degrees)".into(),
            ));
        }
        Ok(angles)
    }

    /// dPe/d(delta) for nodes 1..n, i.e. the weighted Laplacian with the
    /// reference row and column removed.
    fn power_jacobian(&self, angles: &[f64]) -> DMatrix<f64> {
        let n = self.num_nodes();
        let mut jac = DMatrix::zeros(n - 1, n - 1);
        for l in &self.lines {
            let (i, j) = (l.from, l.to);
            let k = self.generators[i].emf
                * self.generators[j].emf
                * l.susceptance
                * (angles[i] - angles[j]).cos();
            if i > 0 {
                jac[(i - 1, i - 1)] += k;
            }
            if j > 0 {
                jac[(j - 1, j - 1)] += k;
            }
            if i > 0 && j > 0 {
                jac[(i - 1, j - 1)] -= k;
                jac[(j - 1, i - 1)] -= k;
            }
        }
        jac
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens(pm: &[f64]) -> Vec<GeneratorParams> {
        pm.iter()
            .map(|&p| GeneratorParams {
                mech_power: p,
                ..GeneratorParams::default()
            })
            .collect()
    }

    #[test]
    fn chain_flows_match_arcsine_closed_form() {
        // On a tree, line flows are fixed by the injections alone, so each
        // angle difference is asin(flow / B).
        let pm = [0.3, -0.1, 0.2, -0.4];
        let b = [1.2, 0.8, 1.5];
        let lines = (0..3).map(|k| Line::new(k, k + 1, b[k])).collect();
        let m = SystemModel::new(gens(&pm), lines, 60.0, 100.0).unwrap();
        let mut upstream = 0.0;
        for k in 0..3 {
            upstream += pm[k];
            let expected = (upstream / b[k]).asin();
            let got = m.initial_angles()[k] - m.initial_angles()[k + 1];
            assert!((got - expected).abs() < 1e-10, "line {k}: {got} vs {expected}");
        }
        assert!(m.power_balance_residual(m.initial_angles()) < 1e-8);
    }

    #[test]
    fn unbalanced_power_has_no_equilibrium() {
        let lines = vec![Line::new(0, 1, 1.0)];
        let err = SystemModel::new(gens(&[0.1, 0.0]), lines, 60.0, 100.0).unwrap_err();
        assert!(matches!(err, Error::NoEquilibrium(_)));
        assert!(err.is_numerical());
    }

    #[test]
    fn overloaded_line_has_no_equilibrium() {
        let lines = vec![Line::new(0, 1, 0.5)];
        let err = SystemModel::new(gens(&[0.8, -0.8]), lines, 60.0, 100.0).unwrap_err();
        assert!(matches!(err, Error::NoEquilibrium(_)));
    }

    #[test]
    fn rejects_bad_generator_params() {
        let mut g = gens(&[0.0, 0.0]);
        g[1].inertia_h = 0.0;
        let err = SystemModel::new(g, vec![Line::new(0, 1, 1.0)], 60.0, 100.0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));

        let mut g = gens(&[0.0, 0.0]);
        g[0].damping_d = -0.1;
        assert!(SystemModel::new(g, vec![Line::new(0, 1, 1.0)], 60.0, 100.0).is_err());
    }

    #[test]
    fn disconnected_is_rejected() {
        let lines = vec![Line::new(0, 1, 1.0)];
        let err = SystemModel::new(gens(&[0.0; 3]), lines, 60.0, 100.0).unwrap_err();
        assert!(matches!(err, Error::DisconnectedTopology(_)));
    }

    #[test]
    fn inertia_coefficient_units() {
        let m = SystemModel::new(gens(&[0.0, 0.0]), vec![Line::new(0, 1, 1.0)], 50.0, 200.0).unwrap();
        let expected = 2.0 * 4.0 * 100.0 / (2.0 * PI * 50.0 * 200.0);
        assert!((m.inertia_coefficients()[0] - expected).abs() < 1e-15);
        assert!((m.aggregate_inertia() - 4.0).abs() < 1e-15);
    }
}
