use nalgebra::DVector;

use super::{hermitian_eig_unchecked, Operator, C64};
use crate::error::{Error, Result};

pub type Ket = DVector<C64>;

const TRACE_TOL: f64 = 1e-10;
const HERM_TOL: f64 = 1e-12;
const POS_TOL: f64 = 1e-10;

/// A validated quantum state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Strict validation: unit trace, Hermitian, positive semidefinite.
    pub fn new(op: Operator) -> Result<Self> {
        let herm = op.hermiticity_error();
        if herm > HERM_TOL {
            return Err(Error::Contract(format!("state not Hermitian: {herm:.3e}")));
        }
        Self::with_tolerance(op, TRACE_TOL, POS_TOL)
    }

    /// Validation with loosened trace and positivity tolerances, for states
    /// produced by numerical integration. The Hermitian part is kept.
    pub fn with_tolerance(op: Operator, trace_tol: f64, pos_tol: f64) -> Result<Self> {
        let herm = op.hermiticity_error();
        if herm > 1e-9 {
            return Err(Error::Contract(format!("state not Hermitian: {herm:.3e}")));
        }
        let op = op.hermitian_part();
        let tr = op.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > trace_tol {
            return Err(Error::Contract(format!("state trace {tr} differs from 1")));
        }
        let min = hermitian_eig_unchecked(op.matrix()).values[0];
        if min < -pos_tol {
            return Err(Error::Positivity(min));
        }
        Ok(Self { op })
    }

    pub fn from_ket(psi: &Ket) -> Result<Self> {
        let n = psi.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::Contract(format!("ket norm {n} differs from 1")));
        }
        Self::new(Operator::outer(psi, psi))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { op: Operator::identity(d).scale_re(1.0 / d as f64) }
    }

    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        Ok(Self { op: self.op.with_dims(dims)? })
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// tr(O ρ)
    pub fn expectation(&self, o: &Operator) -> C64 {
        // tr(Oρ) = Σ_ij O_ij ρ_ji
        let (a, r) = (o.matrix(), self.op.matrix());
        let d = self.dim();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                s += a[(i, j)] * r[(j, i)];
            }
        }
        s
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig_unchecked(self.op.matrix()).values
    }

    pub fn purity(&self) -> f64 {
        self.op.hs_inner(&self.op).re
    }
}

/// ln n! from a short table and the Stirling series beyond it.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 20 {
        let mut f = 1.0f64;
        for k in 2..=n {
            f *= k as f64;
        }
        return f.ln();
    }
    let x = n as f64;
    let x2 = x * x;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x * x2)
        + 1.0 / (1260.0 * x * x2 * x2)
        - 1.0 / (1680.0 * x * x2 * x2 * x2)
}

/// ⌈|α|² + 10|α| + 20⌉
pub fn default_fock_cutoff(alpha: C64) -> usize {
    let a = alpha.norm();
    (a * a + 10.0 * a + 20.0).ceil() as usize
}

/// ln |<n|α>| for the untruncated coherent state.
pub(crate) fn ln_poisson_amplitude(abs_alpha: f64, n: u64) -> f64 {
    if abs_alpha == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -0.5 * abs_alpha * abs_alpha + n as f64 * abs_alpha.ln() - 0.5 * ln_factorial(n)
}

/// Coherent state on Fock levels 0..=n_max, renormalized after truncation.
///
/// `n_max = None` uses [`default_fock_cutoff`]. A cutoff that discards more
/// than 1e-12 of the Poisson weight is rejected.
pub fn coherent_state(alpha: C64, n_max: Option<usize>) -> Result<Ket> {
    let n_max = n_max.unwrap_or_else(|| default_fock_cutoff(alpha));
    let a = alpha.norm();
    let phase = if a > 0.0 { alpha / a } else { C64::new(1.0, 0.0) };
    let mut psi = Ket::zeros(n_max + 1);
    let mut weight = 0.0;
    let mut ph = C64::new(1.0, 0.0);
    for n in 0..=n_max {
        let mag = ln_poisson_amplitude(a, n as u64).exp();
        psi[n] = ph * mag;
        weight += mag * mag;
        ph *= phase;
    }
    let deficit = 1.0 - weight;
    if deficit > 1e-12 {
        return Err(Error::Truncation { achieved: weight, deficit });
    }
    let norm = psi.norm();
    Ok(psi.unscale(norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{mode, pauli};

    #[test]
    fn ln_factorial_matches_product() {
        let mut acc = 0.0f64;
        for n in 1..=200u64 {
            acc += (n as f64).ln();
            assert!((ln_factorial(n) - acc).abs() < 1e-12 * acc.max(1.0), "n = {n}");
        }
    }

    #[test]
    fn vacuum() {
        let psi = coherent_state(C64::new(0.0, 0.0), None).unwrap();
        assert_eq!(psi[0], C64::new(1.0, 0.0));
        assert!(psi.iter().skip(1).all(|z| z.norm() == 0.0));
    }

    #[test]
    fn coherent_moments() {
        let alpha = C64::new(5.0, 0.0);
        let psi = coherent_state(alpha, Some(120)).unwrap();
        let rho = DensityMatrix::from_ket(&psi).unwrap();
        let n = rho.expectation(&mode::number(121));
        assert!((n.re - 25.0).abs() < 1e-8);
        let alpha = C64::new(1.5, -2.0);
        let psi = coherent_state(alpha, None).unwrap();
        let d = psi.len();
        let rho = DensityMatrix::from_ket(&psi).unwrap();
        let a = rho.expectation(&mode::annihilation(d));
        assert!((a - alpha).norm() < 1e-8);
    }

    #[test]
    fn truncation_reported() {
        match coherent_state(C64::new(5.0, 0.0), Some(20)) {
            Err(Error::Truncation { achieved, .. }) => assert!(achieved < 1.0),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn state_validation() {
        assert!(DensityMatrix::new(pauli::ground()).is_ok());
        assert!(DensityMatrix::new(pauli::sigma_z()).is_err());
        assert!(matches!(
            DensityMatrix::new(Operator::diag(&[1.5, -0.5])),
            Err(Error::Positivity(_))
        ));
    }
}
