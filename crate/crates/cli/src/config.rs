use std::f64::consts::PI;
use std::path::Path;

use ggkdv::gram::ObservationMode;
use ggkdv::hum::ControlMode;
use ggkdv::spectral::{critical_time, PhysicalParams};
use serde::Deserialize;

use crate::error::CliError;

/// Experiment configuration. Every key is optional and top-level; command-line
/// flags override whatever the file sets.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub command: Option<String>,
    pub preset: Option<String>,
    pub a: Option<f64>,
    pub c: Option<f64>,
    pub d: Option<f64>,
    pub r: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Truncations swept by `observe`.
    #[serde(rename = "N_list")]
    pub n_list: Option<Vec<usize>>,
    pub x0: Option<f64>,
    /// Control horizon for `control` and `duality`.
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    /// Observation window length.
    pub window: Option<f64>,
    pub window_start: Option<f64>,
    /// Explicit window lengths swept by `observe`.
    pub windows: Option<Vec<f64>>,
    /// Window lengths as multiples of the critical time.
    pub windows_t0: Option<Vec<f64>>,
    pub mode: Option<String>,
    pub seed: Option<u64>,
    pub initial: Option<StateSpec>,
    pub target: Option<StateSpec>,
    pub omega_target: Option<f64>,
    #[serde(rename = "Th")]
    pub th: Option<f64>,
    #[serde(rename = "T_sim")]
    pub t_sim: Option<f64>,
    /// Coincidence tolerance for `resonance`.
    pub tol: Option<f64>,
    /// Number of random draws for `duality`.
    pub draws: Option<usize>,
    /// Explicit frequency family for `ingham`.
    pub frequencies: Option<Vec<f64>>,
    /// Sizes of the symmetric integer families `{−m, …, m}` for `ingham`.
    pub family_sizes: Option<Vec<usize>>,
}

/// Initial or target data: a named preset or explicit `[re, im]` modal coefficients.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Coeffs(Vec<[f64; 2]>),
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Preset values, then any explicit coefficient on top.
    pub fn params(&self) -> Result<PhysicalParams, CliError> {
        let base = match self.preset.as_deref().unwrap_or("generic") {
            "generic" => PhysicalParams::generic(),
            "resonant" => PhysicalParams::resonant(),
            other => return Err(CliError::Config(format!("unknown preset `{other}`"))),
        };
        Ok(PhysicalParams::new(
            self.a.unwrap_or(base.a()),
            self.c.unwrap_or(base.c()),
            self.d.unwrap_or(base.d()),
            self.r.unwrap_or(base.r()),
        )?)
    }

    pub fn n(&self) -> usize {
        self.n.unwrap_or(6)
    }

    pub fn x0(&self) -> f64 {
        self.x0.unwrap_or(0.0)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(7)
    }

    /// Defaults to 1, or `1.2·T₀` when the parameters have a critical time.
    pub fn horizon(&self, params: &PhysicalParams) -> f64 {
        self.horizon.unwrap_or_else(|| default_length(params, 1.2))
    }

    /// Defaults to 1, or `1.5·T₀` when the parameters have a critical time.
    pub fn window(&self, params: &PhysicalParams) -> f64 {
        self.window.unwrap_or_else(|| default_length(params, 1.5))
    }

    pub fn window_lengths(&self, params: &PhysicalParams) -> Result<Vec<f64>, CliError> {
        let t0 = critical_time(params);
        match (&self.windows, &self.windows_t0) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "set either `windows` or `windows_t0`, not both".into(),
            )),
            (Some(w), None) => Ok(w.clone()),
            (None, Some(m)) if t0 > 0.0 => Ok(m.iter().map(|f| f * t0).collect()),
            (None, Some(_)) => Err(CliError::Config(
                "`windows_t0` needs parameters with a positive critical time".into(),
            )),
            (None, None) => Ok(vec![self.window(params)]),
        }
    }

    pub fn observation_mode(&self) -> Result<ObservationMode, CliError> {
        self.mode
            .as_deref()
            .unwrap_or("both")
            .parse()
            .map_err(|e: ggkdv::Error| CliError::Config(e.to_string()))
    }

    pub fn control_mode(&self) -> Result<ControlMode, CliError> {
        self.mode
            .as_deref()
            .unwrap_or("both")
            .parse()
            .map_err(|e: ggkdv::Error| CliError::Config(e.to_string()))
    }

    pub fn omega_target(&self) -> f64 {
        self.omega_target.unwrap_or(0.5)
    }

    /// Defaults to 2, or `1.2·T₀` if that is longer.
    pub fn th(&self, params: &PhysicalParams) -> f64 {
        self.th
            .unwrap_or_else(|| 2f64.max(1.2 * critical_time(params)))
    }

    pub fn t_sim(&self) -> f64 {
        self.t_sim.unwrap_or(20.0)
    }
}

fn default_length(params: &PhysicalParams, factor: f64) -> f64 {
    let t0 = critical_time(params);
    if t0 > 0.0 {
        factor * t0
    } else {
        1.0
    }
}

/// Default Ingham window `[0, 2π]`.
pub const INGHAM_WINDOW: f64 = 2.0 * PI;
