use nalgebra::SymmetricEigen;

use super::{CMatrix, Operator, C64, ZERO};
use crate::error::{Error, Result};

const PHASE_CUTOFF: f64 = 1e-8;

/// Eigenpairs of a Hermitian operator: ascending values, eigenvectors in columns.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEig {
    pub fn vector(&self, k: usize) -> super::Ket {
        self.vectors.column(k).into_owned()
    }

    /// V f(ε) V†
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for k in 0..d {
            let w = C64::new(f(self.values[k]), 0.0);
            for i in 0..d {
                scaled[(i, k)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Diagonalize a Hermitian operator.
///
/// Eigenvalues ascend. Each eigenvector has its first component with modulus
/// above 1e-8 rotated to the positive real axis. Inside a degenerate cluster
/// (|ε_i - ε_j| < 1e-9·max(1,|ε|)) vectors are ordered by the position of that
/// leading component, then by its magnitude (largest first).
pub fn hermitian_eig(h: &Operator) -> Result<HermitianEig> {
    let err = h.hermiticity_error();
    if err > 1e-10 {
        return Err(Error::Contract(format!(
            "hermitian_eig requires a Hermitian input, |A - A†|max = {err:.3e}"
        )));
    }
    Ok(hermitian_eig_unchecked(h.matrix()))
}

pub(crate) fn hermitian_eig_unchecked(m: &CMatrix) -> HermitianEig {
    let d = m.nrows();
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut vecs: Vec<(f64, Vec<C64>)> = (0..d)
        .map(|k| {
            let mut v: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
            fix_leading_phase(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    vecs.sort_by(|a, b| a.0.total_cmp(&b.0));

    // order inside degenerate clusters
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && is_degenerate(vecs[end - 1].0, vecs[end].0) {
            end += 1;
        }
        if end - start > 1 {
            vecs[start..end].sort_by(|a, b| {
                let (ia, ma) = leading(&a.1);
                let (ib, mb) = leading(&b.1);
                ia.cmp(&ib).then(mb.total_cmp(&ma))
            });
        }
        start = end;
    }

    let mut vectors = CMatrix::zeros(d, d);
    let mut values = Vec::with_capacity(d);
    for (k, (val, v)) in vecs.into_iter().enumerate() {
        values.push(val);
        for i in 0..d {
            vectors[(i, k)] = v[i];
        }
    }
    HermitianEig { values, vectors }
}

fn is_degenerate(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9 * 1f64.max(a.abs().max(b.abs()))
}

fn leading(v: &[C64]) -> (usize, f64) {
    v.iter()
        .enumerate()
        .find(|(_, z)| z.norm() > PHASE_CUTOFF)
        .map(|(i, z)| (i, z.norm()))
        .unwrap_or((v.len(), 0.0))
}

fn fix_leading_phase(v: &mut [C64]) {
    if let Some(z) = v.iter().find(|z| z.norm() > PHASE_CUTOFF).copied() {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Matrix exponential (scaling and squaring with Padé approximation).
pub fn matrix_exp(a: &CMatrix) -> CMatrix {
    if a.iter().all(|z| *z == ZERO) {
        return CMatrix::identity(a.nrows(), a.ncols());
    }
    a.clone().exp()
}

/// f applied to the spectrum of a (numerically) Hermitian matrix.
pub(crate) fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    hermitian_eig_unchecked(m).reconstruct_with(f)
}

/// Closest unitary in Frobenius norm: W V† from the SVD.
pub(crate) fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd requested u");
    let vt = svd.v_t.expect("svd requested v_t");
    u * vt
}
