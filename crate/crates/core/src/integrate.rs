//! Runge–Kutta steppers shared by the propagators.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::operator::{max_abs, polar_unitary, CMatrix, C64, I};

/// Controls for the adaptive unitary propagator.
#[derive(Clone, Copy, Debug)]
pub struct UnitaryOptions {
    /// Accepted local error per step (max-norm, after extrapolation).
    pub tol: f64,
    /// Polar re-unitarization cadence in accepted steps.
    pub renormalize_every: usize,
    pub max_steps: usize,
}

impl Default for UnitaryOptions {
    fn default() -> Self {
        Self { tol: 1e-13, renormalize_every: 100, max_steps: 50_000_000 }
    }
}

fn rk4_unitary_step(h: &impl Fn(f64) -> CMatrix, t: f64, u: &CMatrix, dt: f64) -> CMatrix {
    let mi = -I;
    let k1 = h(t) * u * mi;
    let hm = h(t + 0.5 * dt);
    let k2 = &hm * (u + &k1 * C64::new(0.5 * dt, 0.0)) * mi;
    let k3 = &hm * (u + &k2 * C64::new(0.5 * dt, 0.0)) * mi;
    let k4 = h(t + dt) * (u + &k3 * C64::new(dt, 0.0)) * mi;
    u + (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0)
}

/// Solve dU/dt = -i H(t) U from U(t0) = I and return U at each of `times`
/// (ascending, all ≥ t0).
///
/// Step doubling with local Richardson extrapolation. The propagator is
/// projected back onto the unitary group every `renormalize_every` steps.
pub fn propagate_unitary(
    h: impl Fn(f64) -> CMatrix,
    dim: usize,
    t0: f64,
    times: &[f64],
    opts: UnitaryOptions,
) -> Result<Vec<CMatrix>> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < t0) {
        return Err(Error::Contract("sample times must ascend from t0".into()));
    }
    let mut u = CMatrix::identity(dim, dim);
    let mut t = t0;
    let scale = max_abs(&h(t0)).max(1e-3) * dim as f64;
    let mut dt = 0.05 / scale;
    let mut accepted = 0usize;
    let mut steps = 0usize;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        while target - t > 1e-14 * target.abs().max(1.0) {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Integration(format!(
                    "step budget exhausted at t = {t:.6e}"
                )));
            }
            let step = dt.min(target - t);
            let full = rk4_unitary_step(&h, t, &u, step);
            let half = rk4_unitary_step(&h, t, &u, 0.5 * step);
            let fine = rk4_unitary_step(&h, t + 0.5 * step, &half, 0.5 * step);
            let diff = &fine - &full;
            let err = max_abs(&diff) / 15.0;
            let factor = if err > 0.0 { 0.9 * (opts.tol / err).powf(0.2) } else { 4.0 };
            if err <= opts.tol {
                u = fine + diff * C64::new(1.0 / 15.0, 0.0);
                t += step;
                accepted += 1;
                if accepted % opts.renormalize_every == 0 {
                    u = polar_unitary(&u);
                }
                // a step clipped to hit the target says nothing about the next size
                if step == dt {
                    dt *= factor.min(4.0);
                }
            } else {
                dt = step * factor.max(0.1);
            }
            if dt < 1e-14 * scale.recip() {
                return Err(Error::Integration(format!("step size underflow at t = {t:.6e}")));
            }
        }
        t = target;
        out.push(u.clone());
    }
    Ok(out)
}

/// One classical RK4 step for dy/dt = f(t, y).
pub(crate) fn rk4_step(
    f: &impl Fn(f64, &DVector<C64>) -> DVector<C64>,
    t: f64,
    y: &DVector<C64>,
    dt: f64,
) -> DVector<C64> {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * dt, &(y + &k1 * C64::new(0.5 * dt, 0.0)));
    let k3 = f(t + 0.5 * dt, &(y + &k2 * C64::new(0.5 * dt, 0.0)));
    let k4 = f(t + dt, &(y + &k3 * C64::new(dt, 0.0)));
    y + (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0)
}
