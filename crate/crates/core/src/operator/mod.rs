//! Dense complex operators, Liouville-space superoperators, spectral
//! decompositions and state metrics.

mod linalg;
mod metrics;
mod state;
mod superop;

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use linalg::{hermitian_eig, matrix_exp, HermitianEig};
pub use metrics::{
    coherence_rel_entropy, partial_trace, partial_trace_op, uhlmann_fidelity,
    von_neumann_entropy,
};
pub use state::{coherent_state, default_fock_cutoff, ln_factorial, DensityMatrix, Ket};
pub use superop::{
    commutator_super, dissipator_super, kron, sandwich_super, unvec, vec, Superoperator,
};

pub(crate) use linalg::{hermitian_eig_unchecked, hermitian_map, polar_unitary};
pub(crate) use state::ln_poisson_amplitude;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// A square complex matrix together with its tensor-factor structure.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    data: CMatrix,
    dims: Vec<usize>,
}

impl Operator {
    pub fn new(data: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::Dimension(format!(
                "operator must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let prod: usize = dims.iter().product();
        if dims.is_empty() || prod != data.nrows() {
            return Err(Error::Dimension(format!(
                "dims {:?} do not multiply to {}",
                dims,
                data.nrows()
            )));
        }
        Ok(Self { data, dims })
    }

    /// Wrap a square matrix as a single-factor operator.
    pub fn from_matrix(data: CMatrix) -> Result<Self> {
        let d = data.nrows();
        Self::new(data, vec![d])
    }

    /// Build from row-major entries.
    pub fn from_rows(d: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::Dimension(format!(
                "expected {} entries, got {}",
                d * d,
                entries.len()
            )));
        }
        Self::from_matrix(CMatrix::from_row_slice(d, d, entries))
    }

    pub fn identity(d: usize) -> Self {
        Self { data: CMatrix::identity(d, d), dims: vec![d] }
    }

    pub fn zeros(d: usize) -> Self {
        Self { data: CMatrix::zeros(d, d), dims: vec![d] }
    }

    pub fn diag(entries: &[f64]) -> Self {
        let d = entries.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(e, 0.0);
        }
        Self { data: m, dims: vec![d] }
    }

    /// |ket><bra|
    pub fn outer(ket: &Ket, bra: &Ket) -> Self {
        let m = ket * bra.adjoint();
        Self::from_matrix(m).expect("outer product is square")
    }

    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        Self::new(self.data, dims)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self { data: self.data.adjoint(), dims: self.dims.clone() }
    }

    pub fn transpose(&self) -> Self {
        Self { data: self.data.transpose(), dims: self.dims.clone() }
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    /// max |A - A†|
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut err: f64 = 0.0;
        for j in 0..d {
            for i in 0..=j {
                err = err.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Hermitian part (A + A†)/2.
    pub fn hermitian_part(&self) -> Self {
        let data = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        Self { data, dims: self.dims.clone() }
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        let data = &self.data * &other.data - &other.data * &self.data;
        Self { data, dims: self.dims.clone() }
    }

    pub fn anticommutator(&self, other: &Operator) -> Self {
        let data = &self.data * &other.data + &other.data * &self.data;
        Self { data, dims: self.dims.clone() }
    }

    /// Hilbert-Schmidt inner product tr(A† B).
    pub fn hs_inner(&self, other: &Operator) -> C64 {
        self.data.iter().zip(other.data.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    /// max |A - B| entrywise.
    pub fn max_diff(&self, other: &Operator) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { data: &self.data * c, dims: self.dims.clone() }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Rescale to unit Hilbert-Schmidt norm and rotate the global phase so the
    /// largest-modulus entry is real positive.
    pub fn normalized_phase_fixed(&self) -> Self {
        let n = self.hs_norm();
        if n == 0.0 {
            return self.clone();
        }
        let mut best = ZERO;
        for z in self.data.iter() {
            // ties resolved by first occurrence in column-major order
            if z.norm() > best.norm() * (1.0 + 1e-12) {
                best = *z;
            }
        }
        let phase = best.conj() / best.norm();
        self.scale(phase / n)
    }

    /// max |A - e^{iφ}B| minimized over the global phase φ.
    pub fn phase_insensitive_diff(&self, other: &Operator) -> f64 {
        let overlap = other.hs_inner(self);
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
        self.max_diff(&other.scale(phase))
    }

    pub fn expm(&self) -> Self {
        Self { data: matrix_exp(&self.data), dims: self.dims.clone() }
    }
}

impl Add<&Operator> for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator { data: &self.data + &rhs.data, dims: self.dims.clone() }
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        Operator { data: self.data + rhs.data, dims: self.dims }
    }
}

impl AddAssign<&Operator> for Operator {
    fn add_assign(&mut self, rhs: &Operator) {
        self.data += &rhs.data;
    }
}

impl Sub<&Operator> for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator { data: &self.data - &rhs.data, dims: self.dims.clone() }
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        Operator { data: self.data - rhs.data, dims: self.dims }
    }
}

impl Mul<&Operator> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator { data: &self.data * &rhs.data, dims: self.dims.clone() }
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        Operator { data: self.data * rhs.data, dims: self.dims }
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale_re(rhs)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale_re(-1.0)
    }
}

/// Qubit operators in the ordered basis (|g>, |e>).
pub mod pauli {
    use super::{Operator, C64};

    fn m(a: [[C64; 2]; 2]) -> Operator {
        Operator::from_rows(2, &[a[0][0], a[0][1], a[1][0], a[1][1]]).unwrap()
    }

    const O: C64 = C64::new(0.0, 0.0);
    const L: C64 = C64::new(1.0, 0.0);
    const J: C64 = C64::new(0.0, 1.0);

    pub fn sigma_x() -> Operator {
        m([[O, L], [L, O]])
    }
    /// Chosen so that σ± = (σx ± iσy)/2 in the (|g>, |e>) ordering.
    pub fn sigma_y() -> Operator {
        m([[O, J], [-J, O]])
    }
    /// diag(-1, +1): |g> has eigenvalue -1.
    pub fn sigma_z() -> Operator {
        m([[-L, O], [O, L]])
    }
    /// |e><g|
    pub fn sigma_plus() -> Operator {
        m([[O, O], [L, O]])
    }
    /// |g><e|
    pub fn sigma_minus() -> Operator {
        m([[O, L], [O, O]])
    }
    pub fn ground() -> Operator {
        m([[L, O], [O, O]])
    }
    pub fn excited() -> Operator {
        m([[O, O], [O, L]])
    }
}

/// Truncated harmonic-oscillator operators on `levels` Fock states.
pub mod mode {
    use super::{CMatrix, Operator, C64};

    pub fn annihilation(levels: usize) -> Operator {
        let mut a = CMatrix::zeros(levels, levels);
        for n in 1..levels {
            a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
        }
        Operator::from_matrix(a).unwrap()
    }

    pub fn creation(levels: usize) -> Operator {
        annihilation(levels).adjoint()
    }

    pub fn number(levels: usize) -> Operator {
        let d: Vec<f64> = (0..levels).map(|n| n as f64).collect();
        Operator::diag(&d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli::sigma_x(), pauli::sigma_y(), pauli::sigma_z());
        // [σx, σy] = 2iσz
        let c = x.commutator(&y);
        assert!(c.max_diff(&z.scale(C64::new(0.0, 2.0))) < 1e-15);
        let sp = pauli::sigma_plus();
        let sm = pauli::sigma_minus();
        // σ+σ- = |e><e|
        assert!((&sp * &sm).max_diff(&pauli::excited()) < 1e-15);
        assert!((&sp + &sm).max_diff(&x) < 1e-15);
        assert!(((&x + &y.scale(C64::new(0.0, 1.0))).scale_re(0.5)).max_diff(&sp) < 1e-15);
    }

    #[test]
    fn dims_must_multiply() {
        assert!(Operator::new(CMatrix::identity(4, 4), vec![2, 3]).is_err());
        assert!(Operator::new(CMatrix::zeros(2, 3), vec![2]).is_err());
        assert!(Operator::new(CMatrix::identity(6, 6), vec![2, 3]).is_ok());
    }

    #[test]
    fn phase_fixing_picks_largest_entry() {
        let a = Operator::from_rows(2, &[C64::new(0.0, 0.1), C64::new(0.0, -2.0), ZERO, ZERO])
            .unwrap();
        let f = a.normalized_phase_fixed();
        assert!((f.hs_norm() - 1.0).abs() < 1e-14);
        let top = f.get(0, 1);
        assert!(top.im.abs() < 1e-15 && top.re > 0.0);
        assert!(f.phase_insensitive_diff(&a.scale_re(1.0 / a.hs_norm())) < 1e-14);
    }

    #[test]
    fn mode_ladder() {
        let a = mode::annihilation(6);
        let n = mode::number(6);
        assert!((&a.adjoint() * &a).max_diff(&n) < 1e-14);
    }
}
