use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::signal::{decimation_ratio, Channel, SignalSet};

use super::model::SystemModel;

/// Sample rate of every simulated record, Hz.
pub const OUTPUT_SAMPLE_RATE: f64 = 10.0;

/// Largest internal integration step accepted, seconds.
pub const MAX_INTERNAL_STEP: f64 = 0.01;

/// A step change of mechanical power at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceEvent {
    pub node: usize,
    /// Seconds from the start of the record.
    pub time: f64,
    /// Per unit on the system base; negative is a generation loss.
    pub delta_p: f64,
}

impl DisturbanceEvent {
    pub fn new(node: usize, time: f64, delta_p: f64) -> Self {
        DisturbanceEvent { node, time, delta_p }
    }

    fn validate(&self, model: &SystemModel) -> Result<()> {
        if self.node >= model.num_nodes() {
            return Err(Error::InvalidParameter(format!(
                "event node {} outside 0..{}",
                self.node,
                model.num_nodes()
            )));
        }
        if !(self.time.is_finite() && self.time >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "event time must be >= 0, got {}",
                self.time
            )));
        }
        if !self.delta_p.is_finite() {
            return Err(Error::InvalidParameter("event power step must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    /// Frequency deviation in Hz per generator, at 10 Hz.
    pub signals: SignalSet,
    /// Some line angle exceeded 90 degrees during the run.
    pub loss_of_synchronism: bool,
    /// Largest line angle seen at any internal step, radians.
    pub max_line_angle: f64,
}

/// Fixed-step RK4 integrator for the classical swing equations
///
/// ```text
/// M_i d2(delta_i)/dt2 = Pm_i - sum_j E_i E_j B_ij sin(delta_i - delta_j) - D_i d(delta_i)/dt
/// ```
///
/// with the rotor speed deviation `omega_i = d(delta_i)/dt` in rad/s.
#[derive(Debug, Clone)]
pub struct SwingIntegrator<'a> {
    model: &'a SystemModel,
    inertia: Vec<f64>,
    damping: Vec<f64>,
    mech_power: Vec<f64>,
    angles: Vec<f64>,
    speeds: Vec<f64>,
    steps_taken: u64,
    dt: f64,
    pending: Vec<DisturbanceEvent>,
    scratch: Scratch,
}

#[derive(Debug, Clone)]
struct Scratch {
    pe: Vec<f64>,
    k_angle: [Vec<f64>; 4],
    k_speed: [Vec<f64>; 4],
    trial_angles: Vec<f64>,
    trial_speeds: Vec<f64>,
}

impl<'a> SwingIntegrator<'a> {
    pub fn new(model: &'a SystemModel, events: &[DisturbanceEvent], dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0 && dt <= MAX_INTERNAL_STEP) {
            return Err(Error::InvalidParameter(format!(
                "internal step must be in (0, {MAX_INTERNAL_STEP}] s, got {dt}"
            )));
        }
        for e in events {
            e.validate(model)?;
        }
        let n = model.num_nodes();
        let mut pending = events.to_vec();
        // Stable sort keeps the caller's order for simultaneous events.
        pending.sort_by(|a, b| a.time.total_cmp(&b.time));
        pending.reverse();
        let zeros = || vec![0.0; n];
        Ok(SwingIntegrator {
            model,
            inertia: model.inertia_coefficients(),
            damping: model.damping_coefficients(),
            mech_power: model.mech_powers(),
            angles: model.initial_angles().to_vec(),
            speeds: zeros(),
            steps_taken: 0,
            dt,
            pending,
            scratch: Scratch {
                pe: zeros(),
                k_angle: [zeros(), zeros(), zeros(), zeros()],
                k_speed: [zeros(), zeros(), zeros(), zeros()],
                trial_angles: zeros(),
                trial_speeds: zeros(),
            },
        })
    }

    pub fn time(&self) -> f64 {
        self.steps_taken as f64 * self.dt
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Rotor speed deviations, rad/s.
    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn set_speeds(&mut self, speeds: &[f64]) {
        self.speeds.copy_from_slice(speeds);
    }

    /// Frequency deviations in Hz.
    pub fn frequency_deviations(&self) -> impl Iterator<Item = f64> + '_ {
        self.speeds.iter().map(|w| w / (2.0 * PI))
    }

    /// Transient energy relative to the initial operating point: rotor
    /// kinetic energy plus the potential of the mechanical inputs and the
    /// line couplings. Conserved when every D_i is zero.
    pub fn energy(&self) -> f64 {
        let kinetic: f64 = self
            .inertia
            .iter()
            .zip(&self.speeds)
            .map(|(m, w)| 0.5 * m * w * w)
            .sum();
        let delta0 = self.model.initial_angles();
        let input: f64 = self
            .mech_power
            .iter()
            .zip(self.angles.iter().zip(delta0))
            .map(|(p, (d, d0))| -p * (d - d0))
            .sum();
        let gens = self.model.generators();
        let coupling: f64 = self
            .model
            .lines()
            .iter()
            .map(|l| {
                let k = gens[l.from].emf * gens[l.to].emf * l.susceptance;
                let now = self.angles[l.from] - self.angles[l.to];
                let then = delta0[l.from] - delta0[l.to];
                -k * (now.cos() - then.cos())
            })
            .sum();
        kinetic + input + coupling
    }

    /// Apply due events, then advance one RK4 step.
    pub fn step(&mut self) {
        let t = self.time();
        while let Some(e) = self.pending.last() {
            // Events take effect on the first step starting at or after them.
            if e.time > t + 0.5 * self.dt {
                break;
            }
            self.mech_power[e.node] += e.delta_p;
            self.pending.pop();
        }

        let n = self.angles.len();
        let dt = self.dt;
        let offsets = [0.0, 0.5 * dt, 0.5 * dt, dt];
        for stage in 0..4 {
            {
                let s = &mut self.scratch;
                for i in 0..n {
                    if stage == 0 {
                        s.trial_angles[i] = self.angles[i];
                        s.trial_speeds[i] = self.speeds[i];
                    } else {
                        s.trial_angles[i] = self.angles[i] + offsets[stage] * s.k_angle[stage - 1][i];
                        s.trial_speeds[i] = self.speeds[i] + offsets[stage] * s.k_speed[stage - 1][i];
                    }
                }
            }
            let s = &mut self.scratch;
            self.model.electrical_power_into(&s.trial_angles, &mut s.pe);
            for i in 0..n {
                s.k_angle[stage][i] = s.trial_speeds[i];
                s.k_speed[stage][i] = (self.mech_power[i] - s.pe[i] - self.damping[i] * s.trial_speeds[i])
                    / self.inertia[i];
            }
        }
        let s = &self.scratch;
        for i in 0..n {
            self.angles[i] += dt / 6.0
                * (s.k_angle[0][i] + 2.0 * s.k_angle[1][i] + 2.0 * s.k_angle[2][i] + s.k_angle[3][i]);
            self.speeds[i] += dt / 6.0
                * (s.k_speed[0][i] + 2.0 * s.k_speed[1][i] + 2.0 * s.k_speed[2][i] + s.k_speed[3][i]);
        }
        self.steps_taken += 1;
    }
}

/// Simulate a single disturbance. See [`simulate_events`].
pub fn simulate(
    model: &SystemModel,
    event: &DisturbanceEvent,
    duration: f64,
    dt_internal: f64,
) -> Result<SimulationResult> {
    simulate_events(model, std::slice::from_ref(event), duration, dt_internal)
}

/// Integrate from the steady state for `duration` seconds at `dt_internal`
/// and return generator frequency deviations resampled to 10 Hz.
///
/// `1 / dt_internal` must be an integer multiple of 10 Hz. Loss of
/// synchronism is reported in the result, not as an error.
pub fn simulate_events(
    model: &SystemModel,
    events: &[DisturbanceEvent],
    duration: f64,
    dt_internal: f64,
) -> Result<SimulationResult> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidParameter(format!("duration must be > 0, got {duration}")));
    }
    if let Some(e) = events.iter().find(|e| e.time >= duration) {
        return Err(Error::InvalidParameter(format!(
            "duration {duration} s must exceed event time {} s",
            e.time
        )));
    }
    let mut integrator = SwingIntegrator::new(model, events, dt_internal)?;
    let internal_fs = 1.0 / dt_internal;
    decimation_ratio(internal_fs, OUTPUT_SAMPLE_RATE)?;

    let n = model.num_nodes();
    let steps = (duration / dt_internal + 1e-9).floor() as usize;
    let mut traces: Vec<Vec<f64>> = vec![Vec::with_capacity(steps + 1); n];
    let mut max_angle = model.max_line_angle(integrator.angles());
    let record = |integ: &SwingIntegrator, traces: &mut Vec<Vec<f64>>| {
        for (trace, f) in traces.iter_mut().zip(integ.frequency_deviations()) {
            trace.push(f);
        }
    };
    record(&integrator, &mut traces);
    for _ in 0..steps {
        integrator.step();
        max_angle = max_angle.max(model.max_line_angle(integrator.angles()));
        record(&integrator, &mut traces);
    }

    let width = digits(n.saturating_sub(1)).max(2);
    let channels = traces
        .into_iter()
        .enumerate()
        .map(|(i, trace)| Channel::new(format!("bus{i:0width$}"), trace))
        .collect();
    let internal = SignalSet::new(internal_fs, 0.0, channels)?;
    let signals = internal.resample(OUTPUT_SAMPLE_RATE)?;
    Ok(SimulationResult {
        signals,
        loss_of_synchronism: max_angle > PI / 2.0,
        max_line_angle: max_angle,
    })
}

fn digits(mut v: usize) -> usize {
    let mut d = 1;
    while v >= 10 {
        v /= 10;
        d += 1;
    }
    d
}

/// Inertia-weighted average of the channels, labelled `coi`.
///
/// Channel k is taken to belong to generator k.
pub fn coi_frequency(model: &SystemModel, signals: &SignalSet) -> Result<SignalSet> {
    let weights = model.inertia_weights();
    coi_of_channels(&weights, signals)
}

pub(crate) fn coi_of_channels(weights: &[f64], signals: &SignalSet) -> Result<SignalSet> {
    if weights.len() != signals.num_channels() {
        return Err(Error::ChannelCountMismatch {
            channels: signals.num_channels(),
            generators: weights.len(),
        });
    }
    let total: f64 = weights.iter().sum();
    let mut coi = vec![0.0; signals.len()];
    for (c, w) in signals.channels().iter().zip(weights) {
        for (acc, v) in coi.iter_mut().zip(&c.samples) {
            *acc += w * v;
        }
    }
    coi.iter_mut().for_each(|v| *v /= total);
    SignalSet::new(
        signals.sample_rate(),
        signals.start_time(),
        vec![Channel::new("coi", coi)],
    )
}
