//! Density-matrix time evolution under static and time-dependent generators.

use std::collections::BTreeMap;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::integrate::rk4_step;
use crate::operator::{
    hermitian_eig_unchecked, matrix_exp, uhlmann_fidelity, unvec, vec, DensityMatrix, Operator,
    Superoperator, C64,
};

/// Uniform grid t0, t0 + h, ..., t1 with `steps` intervals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) || t1 <= t0 {
            return Err(Error::Contract(format!("time grid needs t1 > t0, got [{t0}, {t1}]")));
        }
        if steps == 0 {
            return Err(Error::Contract("time grid needs at least one step".into()));
        }
        Ok(Self { t0, t1, steps })
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.steps as f64
    }

    /// All steps + 1 nodes, endpoints included.
    pub fn times(&self) -> Vec<f64> {
        let h = self.dt();
        (0..=self.steps)
            .map(|k| if k == self.steps { self.t1 } else { self.t0 + k as f64 * h })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub metadata: BTreeMap<String, String>,
    /// Step-halving estimate of the endpoint error, when requested.
    pub error_estimate: Option<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectories are never empty")
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }
}

const TRACE_DRIFT: f64 = 1e-8;
const POSITIVITY_BREACH: f64 = 1e-6;

fn checked_state(v: &DVector<C64>, dims: &[usize], t: f64) -> Result<DensityMatrix> {
    let op = unvec(v)?.with_dims(dims.to_vec())?;
    let tr = op.trace();
    if (tr.re - 1.0).abs() > TRACE_DRIFT || tr.im.abs() > TRACE_DRIFT {
        return Err(Error::Integration(format!("trace drifted to {tr} at t = {t:.6e}")));
    }
    let herm = op.hermiticity_error();
    if herm > 1e-9 {
        return Err(Error::Integration(format!("Hermiticity lost ({herm:.3e}) at t = {t:.6e}")));
    }
    let min = hermitian_eig_unchecked(op.matrix()).values[0];
    if min < -POSITIVITY_BREACH {
        return Err(Error::Positivity(min));
    }
    DensityMatrix::with_tolerance(op, TRACE_DRIFT, POSITIVITY_BREACH)
}

/// ρ(t_k) = (e^{L h})^k ρ0 on the grid.
pub fn evolve_static(l: &Superoperator, rho0: &DensityMatrix, grid: &TimeGrid) -> Result<Trajectory> {
    if l.source_dim() != rho0.dim() {
        return Err(Error::Dimension("generator and state dimensions differ".into()));
    }
    let err = l.trace_annihilation_error();
    if err > 1e-10 * l.matrix().iter().fold(1.0f64, |a, z| a.max(z.norm())) {
        return Err(Error::Contract(format!("generator is not trace annihilating ({err:.3e})")));
    }
    let step = l.exp(grid.dt());
    let dims = rho0.op().dims().to_vec();
    let times = grid.times();
    let mut v = vec(rho0.op());
    let mut states = Vec::with_capacity(times.len());
    states.push(rho0.clone());
    for &t in &times[1..] {
        v = step.matrix() * &v;
        states.push(checked_state(&v, &dims, t)?);
    }
    Ok(Trajectory { times, states, metadata: BTreeMap::new(), error_estimate: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stepper {
    /// Classical fourth-order Runge–Kutta on vec(ρ).
    Rk4,
    /// exp(L(t + h/2) h) per substep.
    PiecewiseExponential,
}

#[derive(Clone, Copy, Debug)]
pub struct TimedepOptions {
    /// Integration substeps per grid interval.
    pub substeps: usize,
    pub stepper: Stepper,
    /// Also run at half the step and report the difference.
    pub estimate_error: bool,
}

impl Default for TimedepOptions {
    fn default() -> Self {
        Self { substeps: 20, stepper: Stepper::Rk4, estimate_error: false }
    }
}

/// Substeps per grid interval giving 2000 steps per `period`.
pub fn default_substeps(grid: &TimeGrid, period: f64) -> usize {
    ((2000.0 * grid.dt() / period).ceil() as usize).max(1)
}

fn integrate_path(
    l_of_t: &impl Fn(f64) -> Superoperator,
    v0: &DVector<C64>,
    grid: &TimeGrid,
    substeps: usize,
    stepper: Stepper,
    mut visit: impl FnMut(usize, f64, &DVector<C64>) -> Result<()>,
) -> Result<DVector<C64>> {
    let times = grid.times();
    let h = grid.dt() / substeps as f64;
    let mut v = v0.clone();
    for k in 1..times.len() {
        let start = times[k - 1];
        for s in 0..substeps {
            let t = start + s as f64 * h;
            v = match stepper {
                Stepper::Rk4 => rk4_step(&|t, y: &DVector<C64>| l_of_t(t).matrix() * y, t, &v, h),
                Stepper::PiecewiseExponential => {
                    let l = l_of_t(t + 0.5 * h);
                    matrix_exp(&(l.matrix() * C64::new(h, 0.0))) * &v
                }
            };
        }
        visit(k, times[k], &v)?;
    }
    Ok(v)
}

/// Integrate dρ/dt = L(t)ρ with a fixed step.
pub fn evolve_timedep(
    l_of_t: impl Fn(f64) -> Superoperator,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    opts: TimedepOptions,
) -> Result<Trajectory> {
    if opts.substeps == 0 {
        return Err(Error::Contract("substeps must be positive".into()));
    }
    let l0 = l_of_t(grid.t0);
    if l0.source_dim() != rho0.dim() {
        return Err(Error::Dimension("generator and state dimensions differ".into()));
    }
    let dims = rho0.op().dims().to_vec();
    let v0 = vec(rho0.op());
    let times = grid.times();
    let mut states = Vec::with_capacity(times.len());
    states.push(rho0.clone());
    let fine = integrate_path(&l_of_t, &v0, grid, opts.substeps, opts.stepper, |_, t, v| {
        states.push(checked_state(v, &dims, t)?);
        Ok(())
    })?;
    let error_estimate = if opts.estimate_error {
        let doubled =
            integrate_path(&l_of_t, &v0, grid, 2 * opts.substeps, opts.stepper, |_, _, _| Ok(()))?;
        let order = match opts.stepper {
            Stepper::Rk4 => 15.0,
            Stepper::PiecewiseExponential => 3.0,
        };
        Some((doubled - fine).iter().fold(0.0f64, |a, z| a.max(z.norm())) / order)
    } else {
        None
    };
    Ok(Trajectory { times, states, metadata: BTreeMap::new(), error_estimate })
}

/// tr(O ρ(t)) for each operator (outer index) and time (inner index).
pub fn expectation_series(traj: &Trajectory, ops: &[Operator]) -> Result<Vec<Vec<C64>>> {
    let d = traj.states.first().map(|s| s.dim()).unwrap_or(0);
    ops.iter()
        .map(|o| {
            if o.dim() != d {
                return Err(Error::Dimension(format!(
                    "observable of dimension {} on states of dimension {d}",
                    o.dim()
                )));
            }
            Ok(traj.states.iter().map(|s| s.expectation(o)).collect())
        })
        .collect()
}

/// Real expectation values of Hermitian observables.
pub fn real_expectation_series(traj: &Trajectory, ops: &[Operator]) -> Result<Vec<Vec<f64>>> {
    for o in ops {
        if !o.is_hermitian(1e-12) {
            return Err(Error::Contract("observable is not Hermitian".into()));
        }
    }
    expectation_series(traj, ops)?
        .into_iter()
        .map(|series| {
            series
                .into_iter()
                .map(|z| {
                    if z.im.abs() > 1e-10 {
                        Err(Error::Contract(format!("expectation has imaginary part {:.3e}", z.im)))
                    } else {
                        Ok(z.re)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn fidelity_series(a: &Trajectory, b: &Trajectory) -> Result<Vec<f64>> {
    if a.times.len() != b.times.len()
        || a.times.iter().zip(&b.times).any(|(x, y)| (x - y).abs() > 1e-12 * x.abs().max(1.0))
    {
        return Err(Error::Dimension("trajectories sampled on different grids".into()));
    }
    a.states.iter().zip(&b.states).map(|(x, y)| uhlmann_fidelity(x, y)).collect()
}
