use std::path::PathBuf;

use emwave::analysis::{Window, DEFAULT_THETA_IN, DEFAULT_THETA_OUT, DEFAULT_THRESHOLD};
use emwave::wavelet::{Extension, DEFAULT_LEVELS};

use crate::ConfigError;

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Scenario(PathBuf),
    Signals(PathBuf),
}

/// Which stages run and which report files they produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Simulate,
    Decompose,
    Localize,
    Coherency,
    Rocof,
    Analyze,
}

impl Stage {
    pub fn wants_components(self) -> bool {
        matches!(self, Stage::Decompose | Stage::Analyze)
    }

    pub fn wants_localization(self) -> bool {
        matches!(self, Stage::Localize | Stage::Analyze)
    }

    pub fn wants_coherency(self) -> bool {
        matches!(self, Stage::Coherency | Stage::Analyze)
    }

    pub fn wants_rocof(self) -> bool {
        matches!(self, Stage::Rocof | Stage::Analyze)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub stage: Stage,
    pub input: Input,
    pub levels: usize,
    pub extension: Extension,
    /// Energy window; its start also anchors the default coherency and fit
    /// windows.
    pub event_window: Option<Window>,
    pub coherency_window: Option<Window>,
    pub fit_window: Option<Window>,
    pub threshold: f64,
    pub theta_in: f64,
    pub theta_out: f64,
    pub out_dir: PathBuf,
}

impl PipelineConfig {
    pub fn new(stage: Stage, input: Input, out_dir: PathBuf) -> Self {
        PipelineConfig {
            stage,
            input,
            levels: DEFAULT_LEVELS,
            extension: Extension::Symmetric,
            event_window: None,
            coherency_window: None,
            fit_window: None,
            threshold: DEFAULT_THRESHOLD,
            theta_in: DEFAULT_THETA_IN,
            theta_out: DEFAULT_THETA_OUT,
            out_dir,
        }
    }

    /// Build from the raw input flags, which must name exactly one source.
    pub fn input_from(scenario: Option<PathBuf>, signals: Option<PathBuf>) -> Result<Input, ConfigError> {
        match (scenario, signals) {
            (Some(p), None) => Ok(Input::Scenario(p)),
            (None, Some(p)) => Ok(Input::Signals(p)),
            _ => Err(ConfigError::InputSource),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.levels == 0 {
            return Err(ConfigError::Invalid("levels must be >= 1".into()));
        }
        if self.stage == Stage::Simulate && !matches!(self.input, Input::Scenario(_)) {
            return Err(ConfigError::Invalid("simulate needs --scenario".into()));
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(ConfigError::Invalid(format!("threshold must be > 0, got {}", self.threshold)));
        }
        if !(self.theta_out > 0.0 && self.theta_out <= self.theta_in && self.theta_in <= 1.0) {
            return Err(ConfigError::Invalid(format!(
                "need 0 < theta-out <= theta-in <= 1, got theta-in = {}, theta-out = {}",
                self.theta_in, self.theta_out
            )));
        }
        if self.out_dir.is_file() {
            return Err(ConfigError::Invalid(format!(
                "output path {} is a file, not a directory",
                self.out_dir.display()
            )));
        }
        Ok(())
    }
}

/// Parse `T0,T1` into a window with `T0 < T1`.
pub fn parse_window(s: &str) -> Result<Window, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected T0,T1, got '{s}'"))?;
    let t0: f64 = a.trim().parse().map_err(|_| format!("bad start time '{a}'"))?;
    let t1: f64 = b.trim().parse().map_err(|_| format!("bad end time '{b}'"))?;
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(format!("window needs finite T0 < T1, got {t0},{t1}"));
    }
    Ok(Window::new(t0, t1))
}
