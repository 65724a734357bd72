//! Configuration-driven experiments writing CSV data and JSON summaries.

mod analysis;
mod config;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

pub use analysis::{
    bloch, collapse_sigma_z, convergence_series, eigenops_report, fit_gaussian_decay, fixed_rabi_params,
    log_log_slope, touchard_table, ConvergenceSeries, EigenopsReport, GaussianFit, TouchardRow,
};
pub use config::{
    Amplitude, BathConfig, DensityModel, Experiment, ExperimentConfig, Fig2Config, GridConfig, InitialState,
    JcConfig, NamedState, SweepConfig, SweepVariable, TouchardConfig,
};

use crate::bath::jc_kinetic_coefficients;
use crate::error::Error;
use crate::jc::{collapse_envelope, jc_dissipator, JCParams};
use crate::operator::Operator;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Degenerate(_) => RunError::Config(e.to_string()),
            other => RunError::Numerical(other),
        }
    }
}

impl RunError {
    /// 2 for configuration, 3 for numerical-contract and 4 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io { .. } => 4,
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub alpha: Option<Vec<f64>>,
    pub tmax: Option<f64>,
    pub steps: Option<usize>,
}

impl ExperimentConfig {
    /// `alpha` sets the fig2 list, or the (real) drive amplitude of other
    /// experiments; `tmax` sets `grid.t1`.
    pub fn apply(&mut self, o: &Overrides) -> Result<(), RunError> {
        if let Some(out) = &o.out {
            self.output = Some(out.clone());
        }
        if let Some(alphas) = &o.alpha {
            match (self.experiment, alphas.as_slice()) {
                (_, []) => return Err(RunError::Config("--alpha list is empty".into())),
                (Experiment::Fig2, list) => self.fig2.alphas = list.to_vec(),
                (_, [a]) => self.jc.alpha = Amplitude::Real(*a),
                _ => return Err(RunError::Config(format!("{} takes a single --alpha", self.experiment))),
            }
        }
        if let Some(t) = o.tmax {
            self.grid.t1 = Some(t);
        }
        if let Some(s) = o.steps {
            self.grid.steps = Some(s);
        }
        self.validate()
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub summary: Value,
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, RunError> {
    let path = dir.join(name);
    let mut text = header.join(",");
    text.push('\n');
    for r in rows {
        text.push_str(&r.join(","));
        text.push('\n');
    }
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}

fn write_summary(dir: &Path, cfg: &ExperimentConfig, results: Value) -> Result<(PathBuf, Value), RunError> {
    let path = dir.join(format!("{}_summary.json", cfg.experiment));
    let config = serde_json::to_value(cfg).expect("config serializes");
    let summary = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": cfg.experiment.name(),
        "config": config,
        "results": results,
    });
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok((path, summary))
}

/// Runs the configured experiment, writing into `cfg.output` (default `out`).
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    cfg.validate()?;
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let (mut files, results) = match cfg.experiment {
        Experiment::Fig2 => run_fig2(cfg, &dir)?,
        Experiment::JcSim => run_jc_sim(cfg, &dir)?,
        Experiment::Eigenops => run_eigenops(cfg)?,
        Experiment::Attractor => run_attractor(cfg)?,
        Experiment::Coefficients => run_coefficients(cfg, &dir)?,
        Experiment::Touchard => run_touchard(cfg, &dir)?,
    };
    let (path, summary) = write_summary(&dir, cfg, results)?;
    files.push(path);
    Ok(RunOutput { files, summary })
}

type Produced = (Vec<PathBuf>, Value);

fn series_rows(s: &ConvergenceSeries, rabi: f64, envelope: Option<&JCParams>) -> Vec<Vec<String>> {
    (0..s.times.len())
        .map(|k| {
            let t = s.times[k];
            let mut row = vec![fmt_num(t * rabi), fmt_num(t), fmt_num(s.fidelity[k])];
            row.extend(s.autonomous[k].iter().map(|v| fmt_num(*v)));
            row.extend(s.semiclassical[k].iter().map(|v| fmt_num(*v)));
            if let Some(p) = envelope {
                row.push(fmt_num(collapse_envelope(t, p)));
            }
            row
        })
        .collect()
}

const SERIES_HEADER: [&str; 9] =
    ["t_normalized", "t", "fidelity", "sx_auto", "sy_auto", "sz_auto", "sx_semi", "sy_semi", "sz_semi"];

fn fit_json(fit: Result<GaussianFit, Error>, p: &JCParams) -> Value {
    let nbar = p.mean_photons();
    let d = p.detuning();
    let g2 = p.g * p.g;
    // φ(t) = κ t² with κ = 2n̄g⁴/(Δ² + 4n̄g²)
    let predicted = 2.0 * nbar * g2 * g2 / (d * d + 4.0 * nbar * g2);
    match fit {
        Ok(f) => json!({
            "kappa": f.kappa,
            "kappa_times_alpha_sq": f.kappa * nbar,
            "kappa_predicted": predicted,
            "peaks": f.peaks,
        }),
        Err(e) => json!({ "kappa": null, "kappa_predicted": predicted, "note": e.to_string() }),
    }
}

fn run_fig2(cfg: &ExperimentConfig, dir: &Path) -> Result<Produced, RunError> {
    let f = &cfg.fig2;
    let rho0 = cfg.initial_state.state()?;
    let detuning = cfg.jc.omega_eg - cfg.jc.omega_c;
    let grid = cfg.grid.grid(f.normalized_window / f.rabi, 2000)?;
    let runs = f
        .alphas
        .par_iter()
        .map(|&a| {
            let p = fixed_rabi_params(a, cfg.jc.omega_c, detuning, f.rabi)?;
            let series = convergence_series(&p, &rho0, &grid)?;
            let sz = collapse_sigma_z(&p, &grid)?;
            let fit = fit_gaussian_decay(&series.times, &sz);
            Ok((a, p, series, fit))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut files = Vec::new();
    let mut per_alpha = Vec::new();
    for (a, p, series, fit) in runs {
        let name = format!("fig2_alpha_{a}.csv");
        files.push(write_csv(dir, &name, &SERIES_HEADER, &series_rows(&series, f.rabi, None))?);
        let (kmin, fmin) = series
            .fidelity
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc });
        per_alpha.push(json!({
            "alpha": a,
            "g": p.g,
            "min_fidelity": fmin,
            "t_normalized_at_min": series.times[kmin] * f.rabi,
            "envelope_fit": fit_json(fit, &p),
            "file": name,
        }));
    }
    let mut ordered: Vec<(f64, f64)> = per_alpha
        .iter()
        .map(|v| (v["alpha"].as_f64().unwrap_or(0.0), v["min_fidelity"].as_f64().unwrap_or(0.0)))
        .collect();
    ordered.sort_by(|x, y| x.0.total_cmp(&y.0));
    let increasing = ordered.windows(2).all(|w| w[1].1 > w[0].1);
    Ok((
        files,
        json!({
            "rabi": f.rabi,
            "detuning": detuning,
            "window": [grid.t0, grid.t1],
            "steps": grid.steps,
            "runs": per_alpha,
            "min_fidelity_increasing_in_alpha": increasing,
        }),
    ))
}

fn run_jc_sim(cfg: &ExperimentConfig, dir: &Path) -> Result<Produced, RunError> {
    let p = cfg.jc.params()?;
    let rho0 = cfg.initial_state.state()?;
    let rabi = p.rabi_frequency();
    let default_t1 = if rabi > 0.0 { 20.0 * std::f64::consts::PI / rabi } else { 10.0 * p.period() };
    let grid = cfg.grid.grid(default_t1, 2000)?;
    let series = convergence_series(&p, &rho0, &grid)?;
    let mut header = SERIES_HEADER.to_vec();
    header.push("envelope");
    let scale = if rabi > 0.0 { rabi } else { 1.0 };
    let file = write_csv(dir, "jc_sim.csv", &header, &series_rows(&series, scale, Some(&p)))?;
    let sz: Vec<f64> = series.autonomous.iter().map(|b| b[2]).collect();
    Ok((
        vec![file],
        json!({
            "rabi": rabi,
            "detuning": p.detuning(),
            "mean_photons": p.mean_photons(),
            "min_fidelity": series.min_fidelity(),
            "sz_envelope_fit": fit_json(fit_gaussian_decay(&series.times, &sz), &p),
        }),
    ))
}

fn run_eigenops(cfg: &ExperimentConfig) -> Result<Produced, RunError> {
    let p = cfg.jc.params()?;
    let report = eigenops_report(&p)?;
    let value = serde_json::to_value(&report).expect("report serializes");
    Ok((Vec::new(), value))
}

fn op_json(op: &Operator) -> Value {
    let d = op.dim();
    let rows: Vec<Value> = (0..d)
        .map(|r| Value::Array((0..d).map(|c| json!([op.get(r, c).re, op.get(r, c).im])).collect()))
        .collect();
    Value::Array(rows)
}

fn run_attractor(cfg: &ExperimentConfig) -> Result<Produced, RunError> {
    let p = cfg.jc.params()?;
    let bath = cfg
        .bath
        .as_ref()
        .ok_or_else(|| RunError::Config("attractor needs a [bath] table".into()))?
        .spec()?;
    let diss = jc_dissipator(&p, &bath)?;
    let att = diss.attractor()?;
    let k = diss.coefficients;
    Ok((
        Vec::new(),
        json!({
            "frame": "rotating",
            "coefficients": {
                "gamma0": k.gamma0,
                "gamma_minus": k.gamma_minus,
                "gamma_plus": k.gamma_plus,
                "s_plus": k.s_plus,
                "s_minus": k.s_minus,
                "k0": k.k0,
                "rabi": k.rabi,
            },
            "deltas": att.deltas.iter().map(|d| if d.is_finite() { json!(d) } else { json!(d.to_string()) }).collect::<Vec<_>>(),
            "state": op_json(att.state.op()),
            "effective_hamiltonian": att.effective_hamiltonian.as_ref().map(op_json),
            "residual": att.residual,
            "commutation_residual": att.commutation_residual,
            "warnings": att.warnings,
        }),
    ))
}

fn run_coefficients(cfg: &ExperimentConfig, dir: &Path) -> Result<Produced, RunError> {
    let base = cfg.jc.clone();
    let bath_cfg = cfg.bath.clone().unwrap_or_default();
    let mut rows = Vec::new();
    for v in cfg.sweep.values() {
        let (mut jc, mut bc) = (base.clone(), bath_cfg.clone());
        match cfg.sweep.variable {
            SweepVariable::Detuning => jc.omega_eg = jc.omega_c + v,
            SweepVariable::Temperature => bc.temperature = v,
        }
        let p = jc.params()?;
        let k = jc_kinetic_coefficients(&p, &bc.spec()?)?;
        for (name, g) in [("gamma0", k.gamma0), ("gammaMinus", k.gamma_minus), ("gammaPlus", k.gamma_plus)] {
            if !(g >= 0.0) {
                return Err(RunError::Numerical(Error::Contract(format!("{name} = {g} at sweep value {v}"))));
            }
        }
        rows.push(vec![p.detuning(), bc.temperature, k.gamma0, k.gamma_minus, k.gamma_plus]);
    }
    let text: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|v| fmt_num(*v)).collect()).collect();
    let file = write_csv(dir, "coefficients.csv", &["Delta", "T", "gamma0", "gammaMinus", "gammaPlus"], &text)?;
    Ok((vec![file], json!({ "points": rows.len(), "variable": cfg.sweep.variable })))
}

fn run_touchard(cfg: &ExperimentConfig, dir: &Path) -> Result<Produced, RunError> {
    let t = &cfg.touchard;
    let table = touchard_table(&t.orders, &t.x)?;
    let text: Vec<Vec<String>> = table
        .iter()
        .map(|r| {
            vec![r.order.to_string(), fmt_num(r.x), fmt_num(r.scaled), fmt_num(r.asymptotic_scaled), fmt_num(r.residual)]
        })
        .collect();
    let file = write_csv(dir, "touchard.csv", &["order", "x", "scaled", "asymptotic_scaled", "residual"], &text)?;
    let slopes: Vec<Value> = t
        .orders
        .iter()
        .map(|&j| {
            let rows: Vec<&TouchardRow> = table.iter().filter(|r| r.order == j).collect();
            let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r.residual).collect();
            let max_res = ys.iter().copied().fold(0.0, f64::max);
            json!({ "order": j, "slope": log_log_slope(&xs, &ys), "max_residual": max_res })
        })
        .collect();
    Ok((vec![file], json!({ "slopes": slopes })))
}
