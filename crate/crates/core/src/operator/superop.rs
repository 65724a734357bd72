use nalgebra::DVector;

use super::{max_abs, matrix_exp, CMatrix, Operator, C64, ONE};
use crate::error::{Error, Result};

/// A linear map on d×d operators stored as a d²×d² matrix acting on
/// column-stacked vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    data: CMatrix,
    source_dim: usize,
}

impl Superoperator {
    pub fn new(data: CMatrix, source_dim: usize) -> Result<Self> {
        let n = source_dim * source_dim;
        if data.nrows() != n || data.ncols() != n {
            return Err(Error::Dimension(format!(
                "superoperator on {source_dim}x{source_dim} operators needs a {n}x{n} matrix, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { data, source_dim })
    }

    pub fn zeros(d: usize) -> Self {
        Self { data: CMatrix::zeros(d * d, d * d), source_dim: d }
    }

    pub fn identity(d: usize) -> Self {
        Self { data: CMatrix::identity(d * d, d * d), source_dim: d }
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn apply(&self, a: &Operator) -> Result<Operator> {
        if a.dim() != self.source_dim {
            return Err(Error::Dimension(format!(
                "superoperator acts on dimension {}, operator has {}",
                self.source_dim,
                a.dim()
            )));
        }
        let out = &self.data * vec(a);
        let op = unvec(&out)?;
        Operator::new(op.into_matrix(), a.dims().to_vec())
    }

    /// self ∘ other
    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        Superoperator { data: &self.data * &other.data, source_dim: self.source_dim }
    }

    pub fn scale(&self, c: C64) -> Superoperator {
        Superoperator { data: &self.data * c, source_dim: self.source_dim }
    }

    pub fn add(&self, other: &Superoperator) -> Superoperator {
        Superoperator { data: &self.data + &other.data, source_dim: self.source_dim }
    }

    pub fn sub(&self, other: &Superoperator) -> Superoperator {
        Superoperator { data: &self.data - &other.data, source_dim: self.source_dim }
    }

    /// Hilbert-Schmidt adjoint (the Heisenberg-picture map).
    pub fn adjoint(&self) -> Superoperator {
        Superoperator { data: self.data.adjoint(), source_dim: self.source_dim }
    }

    /// exp(t·self)
    pub fn exp(&self, t: f64) -> Superoperator {
        Superoperator {
            data: matrix_exp(&(&self.data * C64::new(t, 0.0))),
            source_dim: self.source_dim,
        }
    }

    /// max_j |Σ_i vec(I)_i* S_ij|, zero for trace-annihilating generators.
    pub fn trace_annihilation_error(&self) -> f64 {
        let d = self.source_dim;
        let mut err: f64 = 0.0;
        for col in 0..d * d {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..d {
                s += self.data[(k * d + k, col)];
            }
            err = err.max(s.norm());
        }
        err
    }

    /// max_j |Σ_i vec(I)_i* S_ij - vec(I)_j|, zero for trace-preserving maps.
    pub fn trace_preservation_error(&self) -> f64 {
        let d = self.source_dim;
        let mut err: f64 = 0.0;
        for col in 0..d * d {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..d {
                s += self.data[(k * d + k, col)];
            }
            let target = if col % (d + 1) == 0 { ONE } else { C64::new(0.0, 0.0) };
            err = err.max((s - target).norm());
        }
        err
    }

    /// Choi matrix Σ_ij Φ(|i><j|) ⊗ |i><j|, with the output factor first.
    pub fn choi(&self) -> Operator {
        let d = self.source_dim;
        let mut c = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                // Φ(|i><j|) is column (j d + i) of the matrix, unvec'd
                let col = j * d + i;
                for a in 0..d {
                    for b in 0..d {
                        c[(a * d + i, b * d + j)] = self.data[(b * d + a, col)];
                    }
                }
            }
        }
        Operator::new(c, vec![d, d]).expect("square by construction")
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    pub fn max_diff(&self, other: &Superoperator) -> f64 {
        max_abs(&(&self.data - &other.data))
    }
}

/// Kronecker product with concatenated factor dims.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let mut dims = a.dims().to_vec();
    dims.extend_from_slice(b.dims());
    Operator::new(a.matrix().kronecker(b.matrix()), dims).expect("kron dims consistent")
}

/// Column stacking: entry (a, b) lands at index b·d + a (zero based).
pub fn vec(a: &Operator) -> DVector<C64> {
    DVector::from_column_slice(a.matrix().as_slice())
}

pub fn unvec(v: &DVector<C64>) -> Result<Operator> {
    let n = v.len();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n || n == 0 {
        return Err(Error::Dimension(format!("length {n} is not a perfect square")));
    }
    Operator::from_matrix(CMatrix::from_column_slice(d, d, v.as_slice()))
}

/// X ↦ [H, X] as I⊗H - Hᵀ⊗I.
pub fn commutator_super(h: &Operator) -> Superoperator {
    let d = h.dim();
    let id = CMatrix::identity(d, d);
    let data = id.kronecker(h.matrix()) - h.matrix().transpose().kronecker(&id);
    Superoperator { data, source_dim: d }
}

/// X ↦ A X B as Bᵀ⊗A.
pub fn sandwich_super(a: &Operator, b: &Operator) -> Result<Superoperator> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "sandwich of {}x{} and {}x{} operators",
            a.dim(),
            a.dim(),
            b.dim(),
            b.dim()
        )));
    }
    Ok(Superoperator { data: b.matrix().transpose().kronecker(a.matrix()), source_dim: a.dim() })
}

/// X ↦ F X F† - ½{F†F, X}
pub fn dissipator_super(f: &Operator) -> Superoperator {
    let d = f.dim();
    let fd = f.adjoint();
    let ff = &fd * f;
    let id = Operator::identity(d);
    let jump = sandwich_super(f, &fd).expect("same dim");
    let left = sandwich_super(&ff, &id).expect("same dim");
    let right = sandwich_super(&id, &ff).expect("same dim");
    let half = C64::new(0.5, 0.0);
    Superoperator {
        data: jump.data - (left.data + right.data) * half,
        source_dim: d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{hermitian_eig, pauli, I};

    fn random_op(d: usize, seed: u64) -> Operator {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        Operator::from_matrix(CMatrix::from_fn(d, d, |_, _| C64::new(next(), next()))).unwrap()
    }

    #[test]
    fn vec_is_column_stacking() {
        let (a, b, c, d) = (
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
            C64::new(3.0, 0.0),
            C64::new(4.0, 0.0),
        );
        // [[a, c], [b, d]]
        let m = Operator::from_rows(2, &[a, c, b, d]).unwrap();
        let v = vec(&m);
        assert_eq!(v.as_slice(), &[a, b, c, d]);
        assert_eq!(unvec(&v).unwrap(), m);
        assert!(unvec(&DVector::zeros(5)).is_err());
    }

    #[test]
    fn kron_elementwise() {
        let x = pauli::sigma_x();
        let k = kron(&x, &x);
        for r in 0..4 {
            for c in 0..4 {
                let expect = x.get(r / 2, c / 2) * x.get(r % 2, c % 2);
                assert_eq!(k.get(r, c), expect);
            }
        }
        assert_eq!(k.dims(), &[2, 2]);
        let zi = kron(&pauli::sigma_z(), &Operator::identity(2));
        assert_eq!(zi.matrix().diagonal().iter().map(|z| z.re).collect::<Vec<_>>(), [-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn sandwich_matches_product() {
        let (a, x, b) = (random_op(3, 1), random_op(3, 2), random_op(3, 3));
        let s = sandwich_super(&a, &b).unwrap();
        let direct = &(&a * &x) * &b;
        assert!(s.apply(&x).unwrap().max_diff(&direct) < 1e-12);
        let lowered = sandwich_super(&pauli::sigma_minus(), &pauli::sigma_plus())
            .unwrap()
            .apply(&pauli::excited())
            .unwrap();
        assert!(lowered.max_diff(&pauli::ground()) < 1e-15);
    }

    #[test]
    fn commutator_super_spectrum() {
        let h = pauli::sigma_z().scale_re(0.5);
        let c = commutator_super(&h);
        let e = hermitian_eig(&Operator::from_matrix(c.matrix().clone()).unwrap()).unwrap();
        let expect = [-1.0, 0.0, 0.0, 1.0];
        for (v, w) in e.values.iter().zip(expect) {
            assert!((v - w).abs() < 1e-14);
        }
        let x = random_op(2, 9);
        assert!(c.apply(&x).unwrap().max_diff(&h.commutator(&x)) < 1e-14);
        assert!(commutator_super(&Operator::identity(3)).matrix().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn liouville_unitary_is_unitary() {
        let a = random_op(4, 5);
        let h = a.hermitian_part();
        let u = commutator_super(&h).scale(I).exp(0.7);
        let gram = u.matrix().adjoint() * u.matrix();
        assert!(max_abs(&(gram - CMatrix::identity(16, 16))) < 1e-10);
    }

    #[test]
    fn amplitude_damping_action() {
        let d = dissipator_super(&pauli::sigma_minus());
        let out = d.apply(&pauli::excited()).unwrap();
        assert!(out.max_diff(&(&pauli::ground() - &pauli::excited())) < 1e-15);
        assert!(d.trace_annihilation_error() < 1e-15);
    }

    #[test]
    fn choi_of_identity_is_maximally_entangled() {
        let c = Superoperator::identity(2).choi();
        // Σ |ii><jj|
        for r in 0..4 {
            for col in 0..4 {
                let expect = if r % 3 == 0 && col % 3 == 0 { 1.0 } else { 0.0 };
                assert_eq!(c.get(r, col).re, expect);
            }
        }
    }
}
