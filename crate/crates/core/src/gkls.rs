//! GKLS generators built from eigenoperators, their fixed points and the
//! instantaneous attractor of driven generators.

use nalgebra::{DMatrix, DVector};

use crate::eigenops::EigenoperatorSet;
use crate::error::{Error, Result};
use crate::operator::{
    commutator_super, dissipator_super, hermitian_eig_unchecked, matrix_exp,
    max_abs, sandwich_super, unvec, CMatrix, DensityMatrix, Operator, Superoperator, C64, I,
};

/// A jump operator F applied at `rate`, paired with F† at `reverse_rate`.
#[derive(Clone, Debug)]
pub struct Channel {
    pub jump: Operator,
    pub rate: f64,
    pub reverse_rate: f64,
}

#[derive(Clone, Debug, Default)]
pub enum Dephasing {
    #[default]
    None,
    /// Σ_j -λ_j [V_j, [V_j, ρ]] with Hermitian V_j and λ_j ≥ 0.
    Autonomous(Vec<(Operator, f64)>),
    /// Σ_ij χ_ij (W_i ρ W_j† - ½{W_j† W_i, ρ}) with χ positive semidefinite.
    Invariant { ops: Vec<Operator>, chi: CMatrix },
}

#[derive(Clone, Debug)]
pub struct DissipatorSpec {
    pub dim: usize,
    pub channels: Vec<Channel>,
    pub dephasing: Dephasing,
    pub lamb_shift: Option<Operator>,
}

impl DissipatorSpec {
    pub fn new(dim: usize) -> Self {
        Self { dim, channels: Vec::new(), dephasing: Dephasing::None, lamb_shift: None }
    }

    pub fn channel(mut self, jump: Operator, rate: f64, reverse_rate: f64) -> Self {
        self.channels.push(Channel { jump, rate, reverse_rate });
        self
    }

    /// Adds -λ[V,[V,·]]; replaces an invariant-operator block if one was set.
    pub fn dephase(mut self, v: Operator, lambda: f64) -> Self {
        match &mut self.dephasing {
            Dephasing::Autonomous(list) => list.push((v, lambda)),
            _ => self.dephasing = Dephasing::Autonomous(vec![(v, lambda)]),
        }
        self
    }

    pub fn invariant_dephasing(mut self, ops: Vec<Operator>, chi: CMatrix) -> Self {
        self.dephasing = Dephasing::Invariant { ops, chi };
        self
    }

    pub fn lamb_shift(mut self, h: Operator) -> Self {
        self.lamb_shift = Some(h);
        self
    }
}

fn check_rate(r: f64, what: &str) -> Result<()> {
    if !r.is_finite() {
        return Err(Error::Contract(format!("{what} {r} is not finite")));
    }
    if r < 0.0 {
        return Err(Error::Contract(format!("{what} {r} is negative (non-Markovian input)")));
    }
    Ok(())
}

fn check_dim(op: &Operator, d: usize) -> Result<()> {
    if op.dim() != d {
        return Err(Error::Dimension(format!("operator of dimension {} in a {d}-level spec", op.dim())));
    }
    Ok(())
}

/// Assemble the dissipator superoperator.
pub fn build_dissipator(spec: &DissipatorSpec) -> Result<Superoperator> {
    let d = spec.dim;
    let mut total = Superoperator::zeros(d);
    for ch in &spec.channels {
        check_dim(&ch.jump, d)?;
        check_rate(ch.rate, "rate")?;
        check_rate(ch.reverse_rate, "reverse rate")?;
        if ch.rate > 0.0 {
            total = total.add(&dissipator_super(&ch.jump).scale(C64::new(ch.rate, 0.0)));
        }
        if ch.reverse_rate > 0.0 {
            total = total.add(&dissipator_super(&ch.jump.adjoint()).scale(C64::new(ch.reverse_rate, 0.0)));
        }
    }
    match &spec.dephasing {
        Dephasing::None => {}
        Dephasing::Autonomous(list) => {
            for (v, lambda) in list {
                check_dim(v, d)?;
                check_rate(*lambda, "dephasing weight")?;
                if !v.is_hermitian(1e-12) {
                    return Err(Error::Contract("dephasing operator must be Hermitian".into()));
                }
                let c = commutator_super(v);
                total = total.sub(&c.compose(&c).scale(C64::new(*lambda, 0.0)));
            }
        }
        Dephasing::Invariant { ops, chi } => {
            let n = ops.len();
            if chi.nrows() != n || chi.ncols() != n {
                return Err(Error::Dimension(format!("χ must be {n}x{n}")));
            }
            let herm = max_abs(&(chi - chi.adjoint()));
            if herm > 1e-10 {
                return Err(Error::Contract(format!("χ not Hermitian ({herm:.3e})")));
            }
            if n > 0 {
                let min = hermitian_eig_unchecked(chi).values[0];
                if min < -1e-10 {
                    return Err(Error::Contract(format!(
                        "χ not positive semidefinite (eigenvalue {min:.3e})"
                    )));
                }
            }
            let id = Operator::identity(d);
            for (i, wi) in ops.iter().enumerate() {
                check_dim(wi, d)?;
                for (j, wj) in ops.iter().enumerate() {
                    let c = chi[(i, j)];
                    if c.norm() == 0.0 {
                        continue;
                    }
                    let wjd = wj.adjoint();
                    let prod = &wjd * wi;
                    let term = sandwich_super(wi, &wjd)?
                        .sub(&sandwich_super(&prod, &id)?.add(&sandwich_super(&id, &prod)?).scale(C64::new(0.5, 0.0)));
                    total = total.add(&term.scale(c));
                }
            }
        }
    }
    let scale = max_abs(total.matrix()).max(1.0);
    let err = total.trace_annihilation_error();
    if err > 1e-10 * scale {
        return Err(Error::Contract(format!("dissipator does not annihilate the trace ({err:.3e})")));
    }
    Ok(total)
}

/// Rate pairs (γ_nm, γ_mn) obeying γ_up = γ_down e^{-βω}.
///
/// `base[k]` is the downward rate of transition k. With ω_nm = ε_m - ε_n ≥ 0
/// the operator G_nm lowers the energy, so γ_nm = base and γ_mn = base e^{-βω};
/// for ω_nm < 0 the roles swap. β = ∞ gives vanishing upward rates.
pub fn detailed_balance_rates(freqs: &[f64], beta: f64, base: &[f64]) -> Result<Vec<(f64, f64)>> {
    if freqs.len() != base.len() {
        return Err(Error::Dimension("frequency and base-rate lists differ in length".into()));
    }
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::Domain(format!("inverse temperature {beta} must be ≥ 0")));
    }
    freqs
        .iter()
        .zip(base)
        .map(|(&w, &g)| {
            check_rate(g, "base rate")?;
            let up = if w == 0.0 { g } else { g * (-beta * w.abs()).exp() };
            Ok(if w >= 0.0 { (g, up) } else { (up, g) })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct AttractorResult {
    pub state: DensityMatrix,
    /// H̄ with state = e^{-H̄}/Z (absent on the zero-temperature branch).
    pub effective_hamiltonian: Option<Operator>,
    /// η or δ per channel, ln(rate / reverse rate).
    pub deltas: Vec<f64>,
    /// max |D[state]| (dissipator only) or |L[state]| for fixed points.
    pub residual: f64,
    /// max_k |[H̄, F_k] + δ_k F_k| (instantaneous attractor only).
    pub commutation_residual: Option<f64>,
    pub warnings: Vec<String>,
}

fn gibbs(hbar: &Operator) -> Result<DensityMatrix> {
    let eig = hermitian_eig_unchecked(hbar.matrix());
    let shift = eig.values[0];
    let unnorm = eig.reconstruct_with(|x| (-(x - shift)).exp());
    let z = unnorm.trace().re;
    let op = Operator::new(unnorm * C64::new(1.0 / z, 0.0), hbar.dims().to_vec())?;
    DensityMatrix::with_tolerance(op, 1e-10, 1e-10)
}

/// Stationary state from the smallest singular vector of a generator.
fn null_state(l: &Superoperator, dims: &[usize]) -> Result<DensityMatrix> {
    let svd = l.matrix().clone().svd(false, true);
    let vt = svd.v_t.expect("svd requested v_t");
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let v: DVector<C64> = vt.row(k).adjoint();
    let op = unvec(&v)?;
    let tr = op.trace();
    let op = op.scale(C64::new(1.0, 0.0) / tr).hermitian_part().with_dims(dims.to_vec())?;
    DensityMatrix::with_tolerance(op, 1e-8, 1e-8)
}

/// Level index n with P ≈ c·Π_n, for rank-one P.
fn match_projector(p: &Operator, projectors: &[Operator]) -> Option<usize> {
    let norm = p.trace().re;
    if norm <= 0.0 {
        return None;
    }
    let q = p.scale_re(1.0 / norm);
    projectors.iter().position(|pi| pi.max_diff(&q) < 1e-8)
}

/// Fixed point e^{-H̄}/Z of an eigenoperator-built generator.
///
/// Channels that are transitions between energy levels of `eigenset` are
/// turned into a potential h_j on the levels by a least-squares solve of
/// h_m - h_n = η_nm, which is exact whenever the η form a consistent
/// (detailed-balance) network. Other channels use H̄ = Σ (η/2)(F†F - FF†).
/// A vanishing rate selects the zero-temperature branch: the null vector of
/// the full generator, returned with a warning.
pub fn fixed_point(spec: &DissipatorSpec, eigenset: &EigenoperatorSet) -> Result<AttractorResult> {
    let d = spec.dim;
    let dissipator = build_dissipator(spec)?;
    let dims = spec
        .channels
        .first()
        .map(|c| c.jump.dims().to_vec())
        .unwrap_or_else(|| vec![d]);
    let mut hamiltonian = Operator::zeros(d);
    for (p, e) in eigenset.projectors.iter().zip(&eigenset.energies) {
        hamiltonian += &p.scale_re(*e);
    }
    if let Some(ls) = &spec.lamb_shift {
        hamiltonian += ls;
    }
    let generator = liouvillian(&hamiltonian, &dissipator)?;
    let mut warnings = Vec::new();

    let zero_rate = spec.channels.iter().any(|c| c.rate == 0.0 || c.reverse_rate == 0.0);
    if zero_rate {
        warnings.push("a channel has a vanishing rate: zero-temperature branch from the generator null space".into());
        let state = null_state(&generator, &dims)?;
        let residual = generator.apply(state.op())?.max_abs();
        return Ok(AttractorResult {
            state,
            effective_hamiltonian: None,
            deltas: spec.channels.iter().map(|c| (c.rate / c.reverse_rate).ln()).collect(),
            residual,
            commutation_residual: None,
            warnings,
        });
    }

    let etas: Vec<f64> = spec.channels.iter().map(|c| (c.rate / c.reverse_rate).ln()).collect();
    let levels: Option<Vec<(usize, usize)>> = if eigenset.projectors.is_empty() {
        None
    } else {
        spec.channels
            .iter()
            .map(|c| {
                let f = &c.jump;
                let n = match_projector(&(f * &f.adjoint()), &eigenset.projectors)?;
                let m = match_projector(&(&f.adjoint() * f), &eigenset.projectors)?;
                (n != m).then_some((n, m))
            })
            .collect()
    };

    let hbar = match levels {
        Some(edges) if !edges.is_empty() => {
            let nl = eigenset.projectors.len();
            let mut b = DMatrix::<f64>::zeros(edges.len(), nl);
            for (row, &(n, m)) in edges.iter().enumerate() {
                b[(row, m)] += 1.0;
                b[(row, n)] -= 1.0;
            }
            let rhs = DVector::from_column_slice(&etas);
            let pinv = b.clone().pseudo_inverse(1e-12).map_err(|e| Error::Contract(e.to_string()))?;
            let h = &pinv * &rhs;
            let mismatch = (&b * &h - &rhs).amax();
            if mismatch > 1e-9 {
                warnings.push(format!(
                    "rates violate detailed balance around a cycle (potential mismatch {mismatch:.3e})"
                ));
            }
            let mut touched = vec![false; nl];
            for &(n, m) in &edges {
                touched[n] = true;
                touched[m] = true;
            }
            if touched.iter().any(|t| !t) {
                warnings.push("some levels are not reached by any channel".into());
            }
            let mut hbar = Operator::zeros(d);
            for (j, p) in eigenset.projectors.iter().enumerate() {
                hbar += &p.scale_re(h[j]);
            }
            hbar
        }
        _ => {
            if !eigenset.projectors.is_empty() && !spec.channels.is_empty() {
                warnings.push("channels are not level transitions: summed channel potentials used".into());
            }
            let mut hbar = Operator::zeros(d);
            for (c, eta) in spec.channels.iter().zip(&etas) {
                let f = &c.jump;
                let term = &(&f.adjoint() * f) - &(f * &f.adjoint());
                hbar += &term.scale_re(eta / 2.0);
            }
            hbar
        }
    };
    let hbar = hbar.with_dims(dims.clone())?;
    let state = gibbs(&hbar)?;
    let residual = generator.apply(state.op())?.max_abs();
    Ok(AttractorResult {
        state,
        effective_hamiltonian: Some(hbar),
        deltas: etas,
        residual,
        commutation_residual: None,
        warnings,
    })
}

/// Instantaneous attractor of Σ_k Γ_k D[F_k] + Γ_{-k} D[F_k†].
///
/// Requires nilpotent, orthonormal jump operators. The attractor is
/// e^{-H̄}/Z with H̄ = Σ_k (δ_k/2)(F_k†F_k - F_kF_k†) and δ_k = ln(Γ_k/Γ_{-k}).
/// With a vanishing rate the null vector of the dissipator is returned instead.
pub fn instantaneous_attractor(channels: &[(Operator, f64, f64)]) -> Result<AttractorResult> {
    let first = channels
        .first()
        .ok_or_else(|| Error::Contract("at least one channel is required".into()))?;
    let d = first.0.dim();
    let dims = first.0.dims().to_vec();
    for (k, (f, _, _)) in channels.iter().enumerate() {
        check_dim(f, d)?;
        let sq = (f * f).max_abs();
        if sq > 1e-10 {
            return Err(Error::Contract(format!("jump operator {k} is not nilpotent: |F²| = {sq:.3e}")));
        }
        for (l, (g, _, _)) in channels.iter().enumerate() {
            let expect = if k == l { 1.0 } else { 0.0 };
            let ip = f.hs_inner(g);
            if (ip - C64::new(expect, 0.0)).norm() > 1e-10 {
                return Err(Error::Contract(format!("jump operators {k}, {l} not orthonormal")));
            }
        }
    }
    let mut spec = DissipatorSpec::new(d);
    for (f, g, gr) in channels {
        spec = spec.channel(f.clone(), *g, *gr);
    }
    let dissipator = build_dissipator(&spec)?;
    let deltas: Vec<f64> = channels.iter().map(|(_, g, gr)| (g / gr).ln()).collect();
    if channels.iter().any(|(_, g, gr)| *g == 0.0 || *gr == 0.0) {
        let state = null_state(&dissipator, &dims)?;
        let residual = dissipator.apply(state.op())?.max_abs();
        return Ok(AttractorResult {
            state,
            effective_hamiltonian: None,
            deltas,
            residual,
            commutation_residual: None,
            warnings: vec!["a rate vanishes: zero-temperature branch from the dissipator null space".into()],
        });
    }
    let mut hbar = Operator::zeros(d).with_dims(dims.clone())?;
    for ((f, _, _), delta) in channels.iter().zip(&deltas) {
        let term = &(&f.adjoint() * f) - &(f * &f.adjoint());
        hbar += &term.scale_re(delta / 2.0);
    }
    let mut comm: f64 = 0.0;
    for ((f, _, _), delta) in channels.iter().zip(&deltas) {
        comm = comm.max((hbar.commutator(f) + f.scale_re(*delta)).max_abs());
    }
    let state = gibbs(&hbar)?;
    let residual = dissipator.apply(state.op())?.max_abs();
    let mut warnings = Vec::new();
    if comm > 1e-10 {
        warnings.push(format!("[H̄, F] = -δF violated by {comm:.3e}"));
    }
    Ok(AttractorResult {
        state,
        effective_hamiltonian: Some(hbar),
        deltas,
        residual,
        commutation_residual: Some(comm),
        warnings,
    })
}

/// L = -i[H, ·] + D
pub fn liouvillian(h_eff: &Operator, dissipator: &Superoperator) -> Result<Superoperator> {
    if h_eff.dim() != dissipator.source_dim() {
        return Err(Error::Dimension("Hamiltonian and dissipator dimensions differ".into()));
    }
    let err = h_eff.hermiticity_error();
    if err > 1e-10 {
        return Err(Error::Contract(format!("effective Hamiltonian not Hermitian ({err:.3e})")));
    }
    Ok(commutator_super(h_eff).scale(-I).add(dissipator))
}

/// max |e^{Lt} U(s) - U(s) e^{Lt}| with U(s) the Liouville unitary of H_D.
pub fn check_time_translation(l: &Superoperator, h_d: &Operator, t: f64, s: f64) -> Result<f64> {
    if h_d.dim() != l.source_dim() {
        return Err(Error::Dimension("Hamiltonian and generator dimensions differ".into()));
    }
    let map = l.exp(t);
    let u = matrix_exp(&(commutator_super(h_d).into_matrix() * C64::new(0.0, -s)));
    Ok(max_abs(&(map.matrix() * &u - &u * map.matrix())))
}

/// Smallest eigenvalue of the Choi matrix of a map.
pub fn choi_min_eigenvalue(map: &Superoperator) -> f64 {
    hermitian_eig_unchecked(map.choi().matrix()).values[0]
}

/// Gibbs state e^{-βH}/Z.
pub fn gibbs_state(h: &Operator, beta: f64) -> Result<DensityMatrix> {
    gibbs(&h.scale_re(beta))
}
