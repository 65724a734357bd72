use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bath::{BathSpec, SpectralDensity};
use crate::jc::JCParams;
use crate::operator::{pauli, DensityMatrix, Ket, Operator, C64};
use crate::propagate::TimeGrid;

use super::RunError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Fig2,
    JcSim,
    Eigenops,
    Attractor,
    Coefficients,
    Touchard,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Fig2,
        Experiment::JcSim,
        Experiment::Eigenops,
        Experiment::Attractor,
        Experiment::Coefficients,
        Experiment::Touchard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig2 => "fig2",
            Experiment::JcSim => "jc-sim",
            Experiment::Eigenops => "eigenops",
            Experiment::Attractor => "attractor",
            Experiment::Coefficients => "coefficients",
            Experiment::Touchard => "touchard",
        }
    }

    pub fn parse(s: &str) -> Option<Experiment> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A real amplitude or a `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl Amplitude {
    pub fn value(self) -> C64 {
        match self {
            Amplitude::Real(r) => C64::new(r, 0.0),
            Amplitude::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JcConfig {
    pub omega_c: f64,
    pub omega_eg: f64,
    pub g: f64,
    pub alpha: Amplitude,
}

impl Default for JcConfig {
    fn default() -> Self {
        Self { omega_c: 1.0, omega_eg: 1.2, g: 0.1, alpha: Amplitude::Real(2.0) }
    }
}

impl JcConfig {
    pub fn params(&self) -> Result<JCParams, RunError> {
        JCParams::new(self.omega_c, self.omega_eg, self.g, self.alpha.value()).map_err(|e| RunError::Config(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityModel {
    Ohmic,
    Cubic,
    Flat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub temperature: f64,
    pub spectral_density: DensityModel,
    pub eta: f64,
    pub cutoff: f64,
}

impl Default for BathConfig {
    fn default() -> Self {
        Self { temperature: 0.2, spectral_density: DensityModel::Ohmic, eta: 0.01, cutoff: 10.0 }
    }
}

impl BathConfig {
    pub fn spec(&self) -> Result<BathSpec, RunError> {
        let (eta, cutoff) = (self.eta, self.cutoff);
        let j = match self.spectral_density {
            DensityModel::Ohmic => SpectralDensity::Ohmic { eta, cutoff },
            DensityModel::Cubic => SpectralDensity::Cubic { eta, cutoff },
            DensityModel::Flat => SpectralDensity::Flat { eta, cutoff },
        };
        BathSpec::new(self.temperature, j).map_err(|e| RunError::Config(e.to_string()))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub t0: Option<f64>,
    /// End time; each experiment has its own default.
    #[serde(default)]
    pub t1: Option<f64>,
    #[serde(default)]
    pub steps: Option<usize>,
}

impl GridConfig {
    pub fn grid(&self, default_t1: f64, default_steps: usize) -> Result<TimeGrid, RunError> {
        let t0 = self.t0.unwrap_or(0.0);
        let t1 = self.t1.unwrap_or(t0 + default_t1);
        TimeGrid::new(t0, t1, self.steps.unwrap_or(default_steps)).map_err(|e| RunError::Config(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedState {
    Ground,
    Excited,
    Plus,
    Minus,
    PlusI,
    Mixed,
}

/// Either a named state or row-major density-matrix entries `[[re, im]; 4]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<NamedState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<[[f64; 2]; 4]>,
}

impl Default for InitialState {
    fn default() -> Self {
        Self::named(NamedState::Plus)
    }
}

impl InitialState {
    pub fn named(name: NamedState) -> Self {
        Self { name: Some(name), entries: None }
    }

    pub fn state(&self) -> Result<DensityMatrix, RunError> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ket = |a: C64, b: C64| DensityMatrix::from_ket(&Ket::from_vec(vec![a, b]));
        let r = |x: f64| C64::new(x, 0.0);
        let out = match (self.name, &self.entries) {
            (Some(NamedState::Ground), None) => DensityMatrix::new(pauli::ground()),
            (Some(NamedState::Excited), None) => DensityMatrix::new(pauli::excited()),
            (Some(NamedState::Plus), None) => ket(r(s), r(s)),
            (Some(NamedState::Minus), None) => ket(r(s), r(-s)),
            (Some(NamedState::PlusI), None) => ket(r(s), C64::new(0.0, s)),
            (Some(NamedState::Mixed), None) => Ok(DensityMatrix::maximally_mixed(2)),
            (None, Some(entries)) => {
                let e: Vec<C64> = entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                Operator::from_rows(2, &e).and_then(DensityMatrix::new)
            }
            _ => return Err(RunError::Config("initial_state needs exactly one of `name` or `entries`".into())),
        };
        out.map_err(|e| RunError::Config(format!("initial_state: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig2Config {
    /// Coherent amplitudes |α|, one run each.
    pub alphas: Vec<f64>,
    /// Ω held fixed by g = √(Ω² - Δ²)/(2|α|).
    pub rabi: f64,
    /// Window end in units of 1/Ω when `grid.t1` is absent.
    pub normalized_window: f64,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self { alphas: vec![5.0, 25.0, 50.0, 100.0], rabi: 2.0, normalized_window: 40.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    Detuning,
    Temperature,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { variable: SweepVariable::Detuning, from: -0.5, to: 0.5, points: 41 }
    }
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.from];
        }
        (0..self.points)
            .map(|k| self.from + (self.to - self.from) * k as f64 / (self.points - 1) as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TouchardConfig {
    pub orders: Vec<u32>,
    pub x: Vec<f64>,
}

impl Default for TouchardConfig {
    fn default() -> Self {
        Self { orders: vec![0, 1, 2, 3, 4, 5, 6], x: vec![1e2, 1e3, 1e4] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub jc: JcConfig,
    #[serde(default)]
    pub bath: Option<BathConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default)]
    pub fig2: Fig2Config,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub touchard: TouchardConfig,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            output: None,
            jc: JcConfig::default(),
            bath: None,
            grid: GridConfig::default(),
            initial_state: InitialState::default(),
            fig2: Fig2Config::default(),
            sweep: SweepConfig::default(),
            touchard: TouchardConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        let cfg: Self = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Rejects non-finite or out-of-range values before any run starts.
    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |what: &str| Err(RunError::Config(format!("{what} must be finite and in range")));
        self.jc.params()?;
        if let Some(b) = &self.bath {
            b.spec()?;
        }
        for v in [self.grid.t0, self.grid.t1].into_iter().flatten() {
            if !v.is_finite() {
                return bad("grid time");
            }
        }
        if self.grid.steps == Some(0) {
            return bad("grid.steps");
        }
        self.initial_state.state()?;
        let f = &self.fig2;
        if f.alphas.is_empty() || f.alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return bad("fig2.alphas");
        }
        let delta = self.jc.omega_eg - self.jc.omega_c;
        if !(f.rabi.is_finite() && f.rabi > delta.abs()) {
            return Err(RunError::Config(format!("fig2.rabi = {} must exceed |Δ| = {}", f.rabi, delta.abs())));
        }
        if !(f.normalized_window.is_finite() && f.normalized_window > 0.0) {
            return bad("fig2.normalized_window");
        }
        let s = &self.sweep;
        if !(s.from.is_finite() && s.to.is_finite()) || s.points == 0 {
            return bad("sweep");
        }
        if s.variable == SweepVariable::Temperature && s.from.min(s.to) < 0.0 {
            return bad("sweep temperature");
        }
        let t = &self.touchard;
        if t.orders.iter().any(|&j| j > 12) || t.x.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return bad("touchard");
        }
        Ok(())
    }
}
