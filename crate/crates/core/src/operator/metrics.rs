use super::{hermitian_eig_unchecked, hermitian_map, max_abs, CMatrix, DensityMatrix, Operator, C64};
use crate::error::{Error, Result};

/// Reduce an operator to tensor factor `keep`, tracing out all others.
pub fn partial_trace_op(a: &Operator, keep: usize) -> Result<Operator> {
    let dims = a.dims();
    if dims.len() < 2 {
        return Err(Error::Contract("partial trace needs at least two subsystems".into()));
    }
    if keep >= dims.len() {
        return Err(Error::Dimension(format!(
            "subsystem index {keep} out of range for dims {dims:?}"
        )));
    }
    let dk = dims[keep];
    let inner: usize = dims[keep + 1..].iter().product();
    let outer: usize = dims[..keep].iter().product();
    let m = a.matrix();
    let idx = |o: usize, k: usize, i: usize| (o * dk + k) * inner + i;
    let mut out = CMatrix::zeros(dk, dk);
    for r in 0..dk {
        for c in 0..dk {
            let mut s = C64::new(0.0, 0.0);
            for o in 0..outer {
                for i in 0..inner {
                    s += m[(idx(o, r, i), idx(o, c, i))];
                }
            }
            out[(r, c)] = s;
        }
    }
    Operator::from_matrix(out)
}

pub fn partial_trace(rho: &DensityMatrix, keep: usize) -> Result<DensityMatrix> {
    let reduced = partial_trace_op(rho.op(), keep)?;
    DensityMatrix::with_tolerance(reduced, 1e-10, 1e-10)
}

/// S(ρ) = -tr ρ ln ρ
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues().into_iter().map(shannon_term).sum()
}

fn shannon_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// Uhlmann fidelity (tr √(√ρ σ √ρ))².
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension(format!(
            "fidelity between dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let f = if rho.dim() == 2 {
        // tr(ρσ) + 2√(det ρ det σ), exact for qubits
        let overlap = rho.expectation(sigma.op()).re;
        let det = |m: &CMatrix| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.max(0.0);
        overlap + 2.0 * (det(rho.op().matrix()) * det(sigma.op().matrix())).sqrt()
    } else {
        // Σ singular values of √ρ √σ, with spectra floored against rounding noise
        let floor = |x: f64| if x > 1e-15 { x.sqrt() } else { 0.0 };
        let sr = hermitian_map(rho.op().matrix(), floor);
        let ss = hermitian_map(sigma.op().matrix(), floor);
        let s = (sr * ss).singular_values().sum();
        s * s
    };
    Ok(f.clamp(0.0, 1.0))
}

/// Relative entropy of coherence with respect to the orthonormal basis given
/// by the columns of `basis`: S(diag ρ) - S(ρ).
pub fn coherence_rel_entropy(rho: &DensityMatrix, basis: &CMatrix) -> Result<f64> {
    let d = rho.dim();
    if basis.nrows() != d || basis.ncols() != d {
        return Err(Error::Dimension(format!("basis must be {d}x{d}")));
    }
    let gram = basis.adjoint() * basis;
    if max_abs(&(gram - CMatrix::identity(d, d))) > 1e-8 {
        return Err(Error::Contract("coherence basis is not unitary".into()));
    }
    let rotated = basis.adjoint() * rho.op().matrix() * basis;
    let s_e: f64 = (0..d).map(|i| shannon_term(rotated[(i, i)].re)).sum();
    let s_vn: f64 = hermitian_eig_unchecked(&rotated).values.into_iter().map(shannon_term).sum();
    Ok(s_e - s_vn)
}
