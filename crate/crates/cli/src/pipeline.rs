use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use emwave::analysis::{
    coherency_groups, earliest_arrival, estimate_rocof, localize, CoherencyPartition,
    LocalizationReport, RocofEstimate, Window, DEFAULT_ENERGY_SPAN, DEFAULT_FIT_OFFSET,
    MIN_FIT_SAMPLES,
};
use emwave::grid::{simulate_events, SystemModel};
use emwave::wavelet::{decompose_set, DecompositionSet};
use emwave::SignalSet;

use crate::config::{Input, PipelineConfig, Stage};
use crate::scenario::Scenario;

/// Default coherency window relative to the event time. The first two
/// seconds hold the common-mode frequency dip, which leaks into the deepest
/// detail and masks the inter-area swing.
pub const COHERENCY_OFFSET: (f64, f64) = (2.0, 40.0);

/// Samples needed for the default coherency window to be used.
const MIN_COHERENCY_SAMPLES: usize = 20;

/// Everything a run writes, held in memory until the pipeline succeeds.
#[derive(Debug, Default)]
pub struct Outputs {
    /// `components/<file>` contents; `None` when the stage writes no components.
    pub components: Option<Vec<(String, String)>>,
    /// Top-level report files in write order; `summary.txt` is last.
    pub files: Vec<(String, String)>,
}

impl Outputs {
    pub fn summary(&self) -> &str {
        self.files
            .iter()
            .find(|(name, _)| name == "summary.txt")
            .map(|(_, text)| text.as_str())
            .unwrap_or("")
    }
}

fn stage<T>(name: &str, r: emwave::Result<T>) -> Result<T> {
    r.with_context(|| format!("stage '{name}' failed"))
}

/// Read a `time,<label>,...` CSV. The sample rate is inferred from the
/// time column.
pub fn load_signals_csv(path: &Path) -> emwave::Result<SignalSet> {
    SignalSet::read_csv(path)
}

struct Loaded {
    signals: SignalSet,
    model: Option<SystemModel>,
    scheduled_event: Option<f64>,
    loss_of_synchronism: Option<(bool, f64)>,
    source: String,
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.display().to_string())
}

fn load(input: &Input) -> Result<Loaded> {
    match input {
        Input::Scenario(path) => {
            let scenario = Scenario::load(path).context("stage 'load' failed")?;
            let model = stage("steady state", scenario.build_model())?;
            let sim = stage(
                "simulate",
                simulate_events(&model, &scenario.disturbance_events(), scenario.duration, scenario.dt),
            )?;
            Ok(Loaded {
                signals: sim.signals,
                model: Some(model),
                scheduled_event: scenario.first_event_time(),
                loss_of_synchronism: Some((sim.loss_of_synchronism, sim.max_line_angle)),
                source: format!("scenario {}", file_name(path)),
            })
        }
        Input::Signals(path) => {
            let signals = load_signals_csv(path)
                .with_context(|| format!("cannot load signals from {}", path.display()))
                .context("stage 'load' failed")?;
            Ok(Loaded {
                signals,
                model: None,
                scheduled_event: None,
                loss_of_synchronism: None,
                source: format!("signals {}", file_name(path)),
            })
        }
    }
}

/// Component file name for a channel label. Characters outside
/// `[A-Za-z0-9._-]` become `_`.
pub fn component_file_name(label: &str) -> String {
    let clean: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') { c } else { '_' })
        .collect();
    format!("{clean}.csv")
}

fn component_files(decomp: &DecompositionSet) -> Result<Vec<(String, String)>> {
    let mut files: Vec<(String, String)> = Vec::with_capacity(decomp.num_channels());
    for (i, label) in decomp.labels().into_iter().enumerate() {
        let name = component_file_name(label);
        if files.iter().any(|(n, _)| *n == name) {
            anyhow::bail!(crate::ConfigError::Invalid(format!(
                "channel labels collide on component file name '{name}'"
            )));
        }
        files.push((name, decomp.channel_csv(i).expect("channel index in range")));
    }
    Ok(files)
}

fn end_time(signals: &SignalSet) -> f64 {
    signals.time_at(signals.len().saturating_sub(1))
}

fn sample_count(w: Window, start: f64, fs: f64, len: usize) -> usize {
    (0..len)
        .map(|n| start + n as f64 / fs)
        .filter(|&t| t >= w.start - 1e-6 / fs && t <= w.end + 1e-6 / fs)
        .count()
}

enum Section<T> {
    Done(T),
    Skipped(String),
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<Outputs> {
    cfg.validate()?;
    let loaded = load(&cfg.input)?;
    let signals = &loaded.signals;
    let mut out = Outputs::default();
    let mut s = String::new();
    let _ = writeln!(s, "emwave summary");
    let _ = writeln!(s, "input: {}", loaded.source);
    let _ = writeln!(
        s,
        "record: {} channels, {} samples at {} Hz, {:.3} s to {:.3} s",
        signals.num_channels(),
        signals.len(),
        signals.sample_rate(),
        signals.start_time(),
        end_time(signals)
    );
    if let Some((lost, angle)) = loaded.loss_of_synchronism {
        let _ = writeln!(
            s,
            "loss of synchronism: {} (max line angle {:.1} deg)",
            if lost { "yes" } else { "no" },
            angle.to_degrees()
        );
    }

    if cfg.stage == Stage::Simulate {
        out.files.push(("signals.csv".into(), signals.to_csv_string()));
        out.files.push(("summary.txt".into(), s));
        return Ok(out);
    }

    let decomp = stage("decompose", decompose_set(signals, cfg.levels, cfg.extension))?;
    let _ = writeln!(s, "levels: {}, extension: {}", cfg.levels, cfg.extension);
    let _ = writeln!(s, "bands:");
    for e in &decomp.band_map().entries {
        let _ = writeln!(s, "  {e}");
    }
    if cfg.stage.wants_components() {
        out.components = Some(component_files(&decomp)?);
    }

    if decomp.num_channels() == 0 {
        let _ = writeln!(s, "no channels to analyze");
        out.files.push(("summary.txt".into(), s));
        return Ok(out);
    }

    let detected = earliest_arrival(&decomp, cfg.threshold);
    let (event_time, how) = match (cfg.event_window, loaded.scheduled_event, detected) {
        (Some(w), _, _) => (w.start, "from --event-window"),
        (None, Some(t), _) => (t, "scheduled in scenario"),
        (None, None, Some(t)) => (t, "first D1 threshold crossing"),
        (None, None, None) => (signals.start_time(), "record start, nothing detected"),
    };
    let _ = writeln!(s, "event time: {event_time:.3} s ({how})");
    if detected.is_none() {
        let _ = writeln!(s, "no disturbance found");
    }
    let record_end = end_time(signals);
    let fs = signals.sample_rate();

    if cfg.stage.wants_localization() {
        let window = cfg.event_window.unwrap_or_else(|| {
            Window::new(event_time, (event_time + DEFAULT_ENERGY_SPAN).min(record_end))
        });
        let report = stage("localize", localize(&decomp, window, cfg.threshold))?;
        write_localization(&mut s, &report);
        out.files.push(("energies.csv".into(), report.to_csv()));
    }

    if cfg.stage.wants_coherency() {
        let section = match cfg.coherency_window {
            Some(w) => Section::Done(stage(
                "coherency",
                coherency_groups(&decomp, w, cfg.theta_in, cfg.theta_out),
            )?),
            None => {
                let w = Window::new(
                    event_time + COHERENCY_OFFSET.0,
                    record_end.min(event_time + COHERENCY_OFFSET.1),
                );
                if w.end > w.start && sample_count(w, signals.start_time(), fs, signals.len()) >= MIN_COHERENCY_SAMPLES {
                    Section::Done(stage(
                        "coherency",
                        coherency_groups(&decomp, w, cfg.theta_in, cfg.theta_out),
                    )?)
                } else {
                    Section::Skipped(format!("record too short for default window {w}"))
                }
            }
        };
        match section {
            Section::Done(p) => {
                write_coherency(&mut s, &p);
                out.files.push(("coherency.csv".into(), p.to_csv()));
            }
            Section::Skipped(why) => {
                let _ = writeln!(s, "\ncoherency: skipped, {why}");
            }
        }
    }

    if cfg.stage.wants_rocof() {
        let model = loaded.model.as_ref();
        let section = match cfg.fit_window {
            Some(w) => Section::Done(stage("rocof", estimate_rocof(&decomp, model, w))?),
            None => {
                let w = Window::new(
                    event_time + DEFAULT_FIT_OFFSET.0,
                    record_end.min(event_time + DEFAULT_FIT_OFFSET.1),
                );
                if w.end > w.start && sample_count(w, signals.start_time(), fs, signals.len()) >= MIN_FIT_SAMPLES {
                    Section::Done(stage("rocof", estimate_rocof(&decomp, model, w))?)
                } else {
                    Section::Skipped(format!("record too short for default window {w}"))
                }
            }
        };
        match section {
            Section::Done(est) => {
                write_rocof(&mut s, &est, cfg.levels);
                out.files.push(("rocof.csv".into(), est.to_csv()));
            }
            Section::Skipped(why) => {
                let _ = writeln!(s, "\nrocof: skipped, {why}");
            }
        }
    }

    out.files.push(("summary.txt".into(), s));
    Ok(out)
}

fn join_labels(labels: &[String], idx: &[usize]) -> String {
    idx.iter().map(|&i| labels[i].as_str()).collect::<Vec<_>>().join(" ")
}

fn write_localization(s: &mut String, r: &LocalizationReport) {
    let _ = writeln!(s, "\nlocalization (D1 energy)");
    let _ = writeln!(s, "  window: {}", r.window);
    let _ = writeln!(s, "  threshold: {:e} Hz", r.threshold);
    match r.origin() {
        None => {
            let _ = writeln!(s, "  no disturbance found");
        }
        Some(origin) => {
            let top = r.ranking[0];
            let _ = writeln!(s, "  top-ranked origin: {origin} (energy {:.6e})", r.energies[top]);
            let _ = writeln!(s, "  ranking: {}", join_labels(&r.labels, &r.ranking));
            let _ = writeln!(s, "  arrival order: {}", join_labels(&r.labels, &r.arrival_order));
        }
    }
}

fn write_coherency(s: &mut String, p: &CoherencyPartition) {
    let _ = writeln!(s, "\ncoherency ({})", p.band);
    let _ = writeln!(s, "  window: {}", p.window);
    for (g, group) in p.groups.iter().enumerate() {
        let _ = writeln!(
            s,
            "  group {}: {} (reference {})",
            g + 1,
            join_labels(&p.labels, &group.members),
            p.labels[group.reference]
        );
    }
    if !p.weak.is_empty() {
        let _ = writeln!(s, "  weak: {}", join_labels(&p.labels, &p.weak));
    }
    if p.opposing.is_empty() {
        let _ = writeln!(s, "  opposing groups: none");
    }
    for &(a, b) in &p.opposing {
        let _ = writeln!(s, "  opposing groups: {} and {}", a + 1, b + 1);
    }
}

fn write_rocof(s: &mut String, est: &RocofEstimate, levels: usize) {
    let _ = writeln!(s, "\nrocof (A{levels} slope)");
    let _ = writeln!(s, "  window: {}", est.window);
    if let Some(sys) = &est.system {
        let _ = writeln!(s, "  system (coi): {:.6} Hz/s", sys.slope);
    }
    let lo = est.channels.iter().map(|c| c.slope).fold(f64::INFINITY, f64::min);
    let hi = est.channels.iter().map(|c| c.slope).fold(f64::NEG_INFINITY, f64::max);
    let _ = writeln!(s, "  channel slopes: {lo:.6} to {hi:.6} Hz/s");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_names() {
        assert_eq!(component_file_name("bus07"), "bus07.csv");
        assert_eq!(component_file_name("PMU 3/a"), "PMU_3_a.csv");
    }

    #[test]
    fn window_sample_count() {
        assert_eq!(sample_count(Window::new(1.0, 1.4), 0.0, 10.0, 100), 5);
        assert_eq!(sample_count(Window::new(9.0, 20.0), 0.0, 10.0, 100), 10);
    }
}
