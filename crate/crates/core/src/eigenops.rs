//! Eigenoperators of the free dynamics: static transition operators,
//! Floquet (monodromy) eigenoperators of periodic drives, and the single
//! harmonic frequency-domain kernel.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::integrate::{propagate_unitary, UnitaryOptions};
use crate::operator::{
    commutator_super, hermitian_eig, hermitian_eig_unchecked, matrix_exp, max_abs, unvec, CMatrix,
    Operator, Superoperator, C64, I, ZERO,
};
use crate::propagate::TimeGrid;

/// Which frequency a set stores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrequencyConvention {
    /// ω with [H, G] = -ωG, so that e^{-iHt} G e^{iHt} = e^{iωt} G.
    Bohr,
    /// λ with U†(t) P(t) U(t) = e^{iλt} P(0).
    Heisenberg,
}

#[derive(Clone, Debug)]
pub struct EigenoperatorSet {
    pub ops: Vec<Operator>,
    pub freqs: Vec<f64>,
    pub invariant_flags: Vec<bool>,
    /// Energy projectors (static case only).
    pub projectors: Vec<Operator>,
    pub convention: FrequencyConvention,
    /// (n, m) labels of G_nm = |ψ_n><ψ_m| in the static case.
    pub transitions: Vec<Option<(usize, usize)>>,
    /// Sorted eigenvalues of the static Hamiltonian.
    pub energies: Vec<f64>,
    /// Index groups whose members could not be told apart.
    pub degenerate_groups: Vec<Vec<usize>>,
    pub warnings: Vec<String>,
    /// Largest eigen-relation residual found while building the set.
    pub residual: f64,
}

impl EigenoperatorSet {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn non_invariant(&self) -> impl Iterator<Item = (&Operator, f64)> {
        self.ops
            .iter()
            .zip(&self.freqs)
            .zip(&self.invariant_flags)
            .filter(|(_, inv)| !**inv)
            .map(|((op, f), _)| (op, *f))
    }

    /// Numerical rank of the vec'd operators.
    pub fn span_rank(&self, tol: f64) -> usize {
        if self.ops.is_empty() {
            return 0;
        }
        let d = self.ops[0].dim();
        let cols: Vec<C64> = self.ops.iter().flat_map(|o| o.matrix().iter().copied()).collect();
        let m = DMatrix::from_column_slice(d * d, self.ops.len(), &cols);
        m.singular_values().iter().filter(|s| **s > tol).count()
    }

    /// Index of the operator equal to `target` up to phase, if any.
    pub fn find(&self, target: &Operator, tol: f64) -> Option<usize> {
        let t = target.normalized_phase_fixed();
        self.ops.iter().position(|o| o.phase_insensitive_diff(&t) <= tol)
    }
}

pub type HamiltonianFn = Arc<dyn Fn(f64) -> Operator + Send + Sync>;

/// A time-dependent Hamiltonian of fixed dimension, optionally periodic.
#[derive(Clone)]
pub struct DrivenGenerator {
    hamiltonian: HamiltonianFn,
    period: Option<f64>,
    dim: usize,
}

impl std::fmt::Debug for DrivenGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DrivenGenerator")
            .field("dim", &self.dim)
            .field("period", &self.period)
            .finish_non_exhaustive()
    }
}

impl DrivenGenerator {
    pub fn new(
        dim: usize,
        period: Option<f64>,
        h: impl Fn(f64) -> Operator + Send + Sync + 'static,
    ) -> Self {
        Self { hamiltonian: Arc::new(h), period, dim }
    }

    pub fn from_static(h: Operator, period: Option<f64>) -> Self {
        let dim = h.dim();
        Self::new(dim, period, move |_| h.clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    /// H(t), checked for shape and Hermiticity.
    pub fn hamiltonian(&self, t: f64) -> Result<Operator> {
        let h = (self.hamiltonian)(t);
        if h.dim() != self.dim {
            return Err(Error::Dimension(format!(
                "H({t}) has dimension {}, expected {}",
                h.dim(),
                self.dim
            )));
        }
        let err = h.hermiticity_error();
        if err > 1e-10 {
            return Err(Error::Contract(format!("H({t}) not Hermitian ({err:.3e})")));
        }
        Ok(h)
    }

    /// U(t, t0) at each of the ascending `times`.
    pub fn propagators(&self, t0: f64, times: &[f64]) -> Result<Vec<CMatrix>> {
        self.hamiltonian(t0)?;
        let h = &self.hamiltonian;
        propagate_unitary(|t| h(t).into_matrix(), self.dim, t0, times, UnitaryOptions::default())
    }
}

fn energy_scale(values: &[f64]) -> f64 {
    values.iter().fold(1.0f64, |a, v| a.max(v.abs()))
}

/// Transition operators G_nm = |ψ_n><ψ_m| with ω_nm = ε_m - ε_n, followed by
/// the projectors Π_j.
///
/// G_nm between degenerate levels has ω = 0 and is flagged invariant; such a
/// set is reported in `warnings`.
pub fn static_eigenoperators(h: &Operator) -> Result<EigenoperatorSet> {
    let eig = hermitian_eig(h)?;
    let d = h.dim();
    let scale = energy_scale(&eig.values);
    let tol = 1e-9 * scale;
    let kets: Vec<_> = (0..d).map(|k| eig.vector(k)).collect();
    let mut set = EigenoperatorSet {
        ops: Vec::with_capacity(d * d),
        freqs: Vec::with_capacity(d * d),
        invariant_flags: Vec::with_capacity(d * d),
        projectors: Vec::with_capacity(d),
        convention: FrequencyConvention::Bohr,
        transitions: Vec::with_capacity(d * d),
        energies: eig.values.clone(),
        degenerate_groups: Vec::new(),
        warnings: Vec::new(),
        residual: 0.0,
    };
    let probe_t = 1.0 / scale;
    let fwd = matrix_exp(&(h.matrix() * C64::new(0.0, -probe_t)));
    let back = fwd.adjoint();
    let mut degenerate_pairs = 0usize;
    for n in 0..d {
        for m in 0..d {
            if n == m {
                continue;
            }
            let g = Operator::outer(&kets[n], &kets[m]).with_dims(h.dims().to_vec())?;
            let w = eig.values[m] - eig.values[n];
            let invariant = w.abs() < tol;
            if invariant {
                degenerate_pairs += 1;
            }
            let r1 = (h.commutator(&g) + g.scale_re(w)).max_abs();
            let moved = Operator::from_matrix(&fwd * g.matrix() * &back)?;
            let r2 = moved.max_diff(&g.scale(C64::from_polar(1.0, w * probe_t)).with_dims(vec![d])?);
            set.residual = set.residual.max(r1 / scale).max(r2);
            set.ops.push(g);
            set.freqs.push(if invariant { 0.0 } else { w });
            set.invariant_flags.push(invariant);
            set.transitions.push(Some((n, m)));
        }
    }
    for j in 0..d {
        let p = Operator::outer(&kets[j], &kets[j]).with_dims(h.dims().to_vec())?;
        set.projectors.push(p.clone());
        set.ops.push(p);
        set.freqs.push(0.0);
        set.invariant_flags.push(true);
        set.transitions.push(None);
    }
    if degenerate_pairs > 0 {
        set.warnings.push(format!(
            "{degenerate_pairs} transition operators join degenerate levels and are invariant"
        ));
    }
    Ok(set)
}

/// Result of the Bohr-frequency degeneracy test.
#[derive(Clone, Debug)]
pub struct BohrCheck {
    pub nondegenerate: bool,
    /// Pairs of transitions (n, m), (k, l) with ω_nm = ω_kl.
    pub collisions: Vec<((usize, usize), (usize, usize))>,
}

/// Are all ω_nm (n ≠ m) distinct beyond 1e-9·scale?
pub fn bohr_nondegenerate(h: &Operator) -> Result<BohrCheck> {
    let eig = hermitian_eig(h)?;
    let d = h.dim();
    let tol = 1e-9 * energy_scale(&eig.values);
    let mut freqs: Vec<(f64, (usize, usize))> = Vec::with_capacity(d * d);
    for n in 0..d {
        for m in 0..d {
            if n != m {
                freqs.push((eig.values[m] - eig.values[n], (n, m)));
            }
        }
    }
    freqs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut collisions = Vec::new();
    let mut start = 0;
    while start < freqs.len() {
        let mut end = start + 1;
        while end < freqs.len() && freqs[end].0 - freqs[end - 1].0 < tol {
            end += 1;
        }
        for a in start..end {
            for b in a + 1..end {
                collisions.push((freqs[a].1, freqs[b].1));
            }
        }
        start = end;
    }
    Ok(BohrCheck { nondegenerate: collisions.is_empty(), collisions })
}

/// Liouville matrix of X ↦ i[H(t), X].
pub fn heisenberg_generator(gen: &DrivenGenerator, t: f64) -> Result<Superoperator> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("time {t} is not finite")));
    }
    Ok(commutator_super(&gen.hamiltonian(t)?).scale(I))
}

/// Floquet eigenoperators of a periodic drive.
#[derive(Clone, Debug)]
pub struct MonodromyResult {
    /// Eigenoperators P_k(0) with mean eigenfrequencies λ̄_k (Heisenberg convention).
    pub set: EigenoperatorSet,
    /// Monodromy phases θ_k ∈ (-π, π], U†(T) P_k U(T) = e^{iθ_k} P_k.
    pub thetas: Vec<f64>,
    /// |U†(T)U(T) - I|max
    pub unitarity_residual: f64,
    /// Heisenberg-picture one-period map X ↦ U†(T) X U(T).
    pub monodromy: Superoperator,
}

const MONODROMY_SAMPLES: usize = 64;
const CLUSTER_TOL: f64 = 1e-7;

/// Diagonalize the one-period Heisenberg map of a periodic drive.
///
/// The map X ↦ U†XU factorizes as Uᵀ⊗U†, so its eigenvectors are
/// |w_a><w_b| built from the Floquet vectors of U(T). Coinciding phases are
/// grouped; inside a group the trivial identity direction is split off and
/// the remainder is ordered by the mean Fourier harmonic of P(t) over one
/// period. The branch of λ̄ = (θ + 2πj)/T is chosen so that the harmonic
/// content of P(t) is centred on zero.
pub fn monodromy_eigenoperators(gen: &DrivenGenerator) -> Result<MonodromyResult> {
    let period = gen
        .period()
        .ok_or_else(|| Error::Contract("monodromy requires a period".into()))?;
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::Domain(format!("period {period} must be positive")));
    }
    let d = gen.dim();
    if d > 32 {
        return Err(Error::Contract(format!("dense monodromy limited to d ≤ 32, got {d}")));
    }
    let n = MONODROMY_SAMPLES;
    let times: Vec<f64> = (1..=n).map(|j| period * j as f64 / n as f64).collect();
    let mut us = vec![CMatrix::identity(d, d)];
    us.extend(gen.propagators(0.0, &times)?);
    let ut = us[n].clone();
    let unitarity_residual = max_abs(&(ut.adjoint() * &ut - CMatrix::identity(d, d)));
    if unitarity_residual > 1e-8 {
        return Err(Error::Integration(format!(
            "monodromy not unitary: residual {unitarity_residual:.3e}"
        )));
    }
    let monodromy = Superoperator::new(ut.transpose().kronecker(&ut.adjoint()), d)?;

    let (q, tri) = ut.clone().schur().unpack();
    let diag: Vec<C64> = (0..d).map(|a| tri[(a, a)] / tri[(a, a)].norm()).collect();

    // candidates |w_a><w_b| with U†XU = conj(u_a) u_b X
    let mut cands: Vec<(C64, CMatrix)> = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let x = q.column(a) * q.column(b).adjoint();
            cands.push((diag[a].conj() * diag[b], x));
        }
    }

    // union-find clusters on the unit circle
    let mut parent: Vec<usize> = (0..cands.len()).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..cands.len() {
        for j in i + 1..cands.len() {
            if (cands[i].0 - cands[j].0).norm() < CLUSTER_TOL {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[rj.max(ri)] = rj.min(ri);
                }
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; cands.len()];
    for i in 0..cands.len() {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[slot[r]].push(i);
    }

    let samples = &us[..n];
    let mut found: Vec<Found> = Vec::new();
    let mut warnings = Vec::new();
    for cluster in &clusters {
        let mean: C64 = cluster.iter().map(|&i| cands[i].0).sum::<C64>() / cluster.len() as f64;
        let theta = mean.arg();
        let basis: Vec<CMatrix> = cluster.iter().map(|&i| cands[i].1.clone()).collect();
        let resolved = resolve_cluster(basis, theta, samples);
        if let Some(group) = resolved.unresolved {
            warnings.push(format!(
                "{} monodromy eigenoperators share phase {theta:.6} and mean harmonic; subspace reported unresolved",
                group
            ));
        }
        let first = found.len();
        let count = resolved.ops.len();
        for (op, harmonic_center) in resolved.ops {
            let j = branch_shift(harmonic_center, theta, period);
            let lambda = (theta + 2.0 * std::f64::consts::PI * j) / period;
            found.push(Found { op, theta, lambda, group: None });
        }
        for (k, grp) in resolved.groups.iter().enumerate() {
            for &member in grp {
                found[first + member].group = Some((first, k));
            }
        }
        debug_assert_eq!(found.len(), first + count);
    }

    let identity = CMatrix::identity(d, d) * C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let is_identity = |m: &CMatrix| max_abs(&(m - &identity)) < 1e-10;
    found.iter_mut().for_each(|f| {
        f.op = Operator::from_matrix(f.op.clone())
            .expect("square")
            .normalized_phase_fixed()
            .into_matrix();
    });
    let invariant = |f: &Found| f.lambda.abs() * period < 1e-8;
    // non-invariants by descending λ̄, then identity, then other invariants
    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (&found[a], &found[b]);
        let key = |f: &Found| {
            if !invariant(f) {
                0
            } else if is_identity(&f.op) {
                1
            } else {
                2
            }
        };
        key(fa).cmp(&key(fb)).then(fb.lambda.total_cmp(&fa.lambda))
    });
    let mut position = vec![0usize; found.len()];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    let mut groups: std::collections::BTreeMap<(usize, usize), Vec<usize>> = Default::default();
    for (old, f) in found.iter().enumerate() {
        if let Some(key) = f.group {
            groups.entry(key).or_default().push(position[old]);
        }
    }

    let dims = gen.hamiltonian(0.0)?.dims().to_vec();
    let mut set = EigenoperatorSet {
        ops: Vec::with_capacity(found.len()),
        freqs: Vec::with_capacity(found.len()),
        invariant_flags: Vec::with_capacity(found.len()),
        projectors: Vec::new(),
        convention: FrequencyConvention::Heisenberg,
        transitions: vec![None; found.len()],
        energies: Vec::new(),
        degenerate_groups: groups
            .into_values()
            .map(|mut g| {
                g.sort();
                g
            })
            .collect(),
        warnings,
        residual: 0.0,
    };
    let mut thetas = Vec::with_capacity(found.len());
    for &i in &order {
        let f = &found[i];
        let inv = invariant(f);
        let op = Operator::new(f.op.clone(), dims.clone())?;
        let moved = ut.adjoint() * op.matrix() * &ut;
        let r = max_abs(&(moved - op.matrix() * C64::from_polar(1.0, f.theta)));
        set.residual = set.residual.max(r);
        set.ops.push(op);
        set.freqs.push(if inv { 0.0 } else { f.lambda });
        set.invariant_flags.push(inv);
        thetas.push(f.theta);
    }
    Ok(MonodromyResult { set, thetas, unitarity_residual, monodromy })
}

struct Found {
    op: CMatrix,
    theta: f64,
    lambda: f64,
    group: Option<(usize, usize)>,
}

struct Resolved {
    /// (operator, centre of its harmonic support)
    ops: Vec<(CMatrix, f64)>,
    /// Index groups (local to the cluster) left degenerate.
    groups: Vec<Vec<usize>>,
    unresolved: Option<usize>,
}

/// Fourier coefficients c_m of f(t) = e^{iθt/T} U(t) X U(t)† from uniform samples.
fn harmonics(x: &CMatrix, theta: f64, samples: &[CMatrix]) -> Vec<(i64, CMatrix)> {
    let n = samples.len();
    let moved: Vec<CMatrix> = samples
        .iter()
        .enumerate()
        .map(|(j, u)| u * x * u.adjoint() * C64::from_polar(1.0, theta * j as f64 / n as f64))
        .collect();
    let half = n as i64 / 2;
    (-half + 1..=half)
        .map(|m| {
            let mut c = CMatrix::zeros(x.nrows(), x.ncols());
            for (j, f) in moved.iter().enumerate() {
                let ph = C64::from_polar(
                    1.0 / n as f64,
                    -2.0 * std::f64::consts::PI * (m * j as i64) as f64 / n as f64,
                );
                c += f * ph;
            }
            (m, c)
        })
        .collect()
}

fn support_center(h: &[(i64, CMatrix)]) -> f64 {
    let weights: Vec<f64> = h.iter().map(|(_, c)| c.iter().map(|z| z.norm_sqr()).sum()).collect();
    let wmax = weights.iter().cloned().fold(0.0, f64::max);
    let support: Vec<i64> = h
        .iter()
        .zip(&weights)
        .filter(|(_, w)| **w > 1e-12 * wmax)
        .map(|((m, _), _)| *m)
        .collect();
    let lo = *support.iter().min().unwrap_or(&0);
    let hi = *support.iter().max().unwrap_or(&0);
    0.5 * (lo + hi) as f64
}

/// Integer j that recentres the harmonic support; ties go to the smaller |λ̄|.
fn branch_shift(center: f64, theta: f64, period: f64) -> f64 {
    let lo = (-center).floor();
    let hi = (-center).ceil();
    if lo == hi {
        return lo;
    }
    let pick = |j: f64| ((-center) - j).abs();
    let (dl, dh) = (pick(lo), pick(hi));
    if (dl - dh).abs() > 1e-9 {
        return if dl < dh { lo } else { hi };
    }
    let lam = |j: f64| ((theta + 2.0 * std::f64::consts::PI * j) / period).abs();
    if lam(lo) <= lam(hi) {
        lo
    } else {
        hi
    }
}

fn resolve_cluster(basis: Vec<CMatrix>, theta: f64, samples: &[CMatrix]) -> Resolved {
    let d = basis[0].nrows();
    if basis.len() == 1 {
        let h = harmonics(&basis[0], theta, samples);
        return Resolved {
            ops: vec![(basis[0].clone(), support_center(&h))],
            groups: Vec::new(),
            unresolved: None,
        };
    }
    let ident = CMatrix::identity(d, d) * C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let inner = |a: &CMatrix, b: &CMatrix| -> C64 { a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum() };
    let id_weight: f64 = basis.iter().map(|x| inner(&ident, x).norm_sqr()).sum();

    let mut head: Vec<CMatrix> = Vec::new();
    let mut rest = basis;
    if id_weight > 0.5 {
        // split off the identity and orthonormalize what remains
        let r = rest.len();
        let projected: Vec<C64> = rest
            .iter()
            .flat_map(|x| {
                let c = inner(&ident, x);
                (x - &ident * c).iter().copied().collect::<Vec<_>>()
            })
            .collect();
        let m = DMatrix::from_column_slice(d * d, r, &projected);
        let svd = m.svd(true, false);
        let u = svd.u.expect("svd requested u");
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
        idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        rest = idx
            .into_iter()
            .take(r - 1)
            .map(|k| CMatrix::from_column_slice(d, d, u.column(k).as_slice()))
            .collect();
        head.push(ident);
    }

    let hs: Vec<Vec<(i64, CMatrix)>> = rest.iter().map(|x| harmonics(x, theta, samples)).collect();
    let r = rest.len();
    let mut a = CMatrix::zeros(r, r);
    for i in 0..r {
        for k in 0..r {
            let mut s = ZERO;
            for ((m, ci), (_, ck)) in hs[i].iter().zip(&hs[k]) {
                s += inner(ci, ck) * *m as f64;
            }
            a[(i, k)] = s;
        }
    }
    let eig = hermitian_eig_unchecked(&a);
    let mut ops: Vec<(CMatrix, f64)> = head
        .into_iter()
        .map(|x| {
            let h = harmonics(&x, theta, samples);
            (x, support_center(&h))
        })
        .collect();
    let offset = ops.len();
    for k in 0..r {
        let mut y = CMatrix::zeros(d, d);
        for i in 0..r {
            y += &rest[i] * eig.vectors[(i, k)];
        }
        let h = harmonics(&y, theta, samples);
        ops.push((y, support_center(&h)));
    }
    let mut groups = Vec::new();
    let mut start = 0;
    while start < r {
        let mut end = start + 1;
        while end < r && (eig.values[end] - eig.values[end - 1]).abs() < 1e-6 {
            end += 1;
        }
        if end - start > 1 {
            groups.push((offset + start..offset + end).collect::<Vec<_>>());
        }
        start = end;
    }
    let unresolved = groups.iter().map(|g| g.len()).max();
    Resolved { ops, groups, unresolved }
}

/// Eigenpairs of the single-harmonic kernel I⊗H - Hᵀ⊗I - ω I⊗I.
#[derive(Clone, Debug)]
pub struct FrequencyEigenpairs {
    pub ops: Vec<Operator>,
    /// Kernel eigenvalues, equal to -λ_k(ω), ascending.
    pub values: Vec<f64>,
}

impl FrequencyEigenpairs {
    /// λ_k(ω) = -value_k
    pub fn lambdas(&self) -> Vec<f64> {
        self.values.iter().map(|v| -v).collect()
    }
}

pub fn frequency_eigenoperators(h: &Operator, omega: f64) -> Result<FrequencyEigenpairs> {
    let err = h.hermiticity_error();
    if err > 1e-10 {
        return Err(Error::Contract(format!("H not Hermitian ({err:.3e})")));
    }
    let d = h.dim();
    let k = commutator_super(h).into_matrix() - CMatrix::identity(d * d, d * d) * C64::new(omega, 0.0);
    let eig = hermitian_eig_unchecked(&k);
    let ops = (0..d * d)
        .map(|c| {
            let v = eig.vectors.column(c).into_owned();
            unvec(&v).and_then(|o| o.with_dims(h.dims().to_vec()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrequencyEigenpairs { ops, values: eig.values })
}

/// max over the grid of |U†(t) P(t) U(t) - e^{iλ(t-t0)} P(t0)|, with U
/// propagating from grid.t0.
pub fn verify_eigenoperator(
    p: impl Fn(f64) -> Operator,
    lambda: f64,
    gen: &DrivenGenerator,
    grid: &TimeGrid,
) -> Result<f64> {
    let times = grid.times();
    let us = gen.propagators(grid.t0, &times)?;
    let p0 = p(grid.t0);
    if p0.dim() != gen.dim() {
        return Err(Error::Dimension("operator and generator dimensions differ".into()));
    }
    let mut worst: f64 = 0.0;
    for (t, u) in times.iter().zip(&us) {
        let heis = u.adjoint() * p(*t).matrix() * u;
        let expect = p0.matrix() * C64::from_polar(1.0, lambda * (t - grid.t0));
        worst = worst.max(max_abs(&(heis - expect)));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{kron, pauli};
    use std::f64::consts::PI;

    #[test]
    fn qubit_transition_operators() {
        let w = 1.3;
        let set = static_eigenoperators(&pauli::sigma_z().scale_re(w / 2.0)).unwrap();
        let sm = set.find(&pauli::sigma_minus(), 1e-12).unwrap();
        let sp = set.find(&pauli::sigma_plus(), 1e-12).unwrap();
        assert!((set.freqs[sm] - w).abs() < 1e-12);
        assert!((set.freqs[sp] + w).abs() < 1e-12);
        assert_eq!(set.len(), 4);
        assert_eq!(set.span_rank(1e-8), 4);
        assert!(set.residual < 1e-12);
    }

    #[test]
    fn identity_is_fully_degenerate() {
        let set = static_eigenoperators(&Operator::identity(3)).unwrap();
        assert!(set.invariant_flags.iter().all(|&f| f));
        assert_eq!(set.non_invariant().count(), 0);
        assert!(!set.warnings.is_empty());
        assert_eq!(set.span_rank(1e-8), 9);
    }

    #[test]
    fn bohr_degeneracy() {
        assert!(bohr_nondegenerate(&pauli::sigma_z()).unwrap().nondegenerate);
        let z = pauli::sigma_z();
        let two = kron(&z, &Operator::identity(2)) + kron(&Operator::identity(2), &z);
        let check = bohr_nondegenerate(&two).unwrap();
        assert!(!check.nondegenerate);
        assert!(!check.collisions.is_empty());
    }

    #[test]
    fn heisenberg_generator_static() {
        let h = pauli::sigma_x().scale_re(0.3) + pauli::sigma_z();
        let gen = DrivenGenerator::from_static(h.clone(), None);
        let g = heisenberg_generator(&gen, 0.4).unwrap();
        assert!(g.max_diff(&commutator_super(&h).scale(I)) == 0.0);
        let out = g.apply(&Operator::identity(2)).unwrap();
        assert!(out.max_abs() < 1e-15);
    }

    #[test]
    fn monodromy_recovers_static_set() {
        let h = pauli::sigma_z().scale_re(0.5);
        let gen = DrivenGenerator::from_static(h.clone(), Some(2.0 * PI));
        let res = monodromy_eigenoperators(&gen).unwrap();
        let set = &res.set;
        let sp = set.find(&pauli::sigma_plus(), 1e-7).expect("σ+");
        let sm = set.find(&pauli::sigma_minus(), 1e-7).expect("σ-");
        // Heisenberg λ = -ω_Bohr
        assert!((set.freqs[sp] - 1.0).abs() < 1e-8);
        assert!((set.freqs[sm] + 1.0).abs() < 1e-8);
        assert!(set.invariant_flags[set.find(&Operator::identity(2), 1e-7).unwrap()]);
        assert!(set.invariant_flags[set.find(&pauli::sigma_z(), 1e-7).unwrap()]);
        assert_eq!(set.span_rank(1e-8), 4);
    }

    #[test]
    fn monodromy_with_incommensurate_period() {
        let h = pauli::sigma_z().scale_re(0.5) + pauli::sigma_x().scale_re(0.2);
        let stat = static_eigenoperators(&h).unwrap();
        let gen = DrivenGenerator::from_static(h, Some(2.3));
        let res = monodromy_eigenoperators(&gen).unwrap();
        for (op, w) in stat.non_invariant() {
            let k = res.set.find(op, 1e-7).expect("transition operator recovered");
            assert!((res.set.freqs[k] + w).abs() < 1e-7);
        }
    }

    #[test]
    fn zero_hamiltonian_all_invariant() {
        let gen = DrivenGenerator::from_static(Operator::zeros(2), Some(1.0));
        let res = monodromy_eigenoperators(&gen).unwrap();
        assert!(res.set.invariant_flags.iter().all(|&f| f));
        assert_eq!(res.set.span_rank(1e-8), 4);
    }

    #[test]
    fn frequency_kernel_qubit() {
        let (delta, w) = (0.8, 0.35);
        let fe = frequency_eigenoperators(&pauli::sigma_z().scale_re(delta / 2.0), w).unwrap();
        let expect = [-delta - w, -w, -w, delta - w];
        for (v, e) in fe.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
        let stat = frequency_eigenoperators(&pauli::sigma_z().scale_re(delta / 2.0), 0.0).unwrap();
        assert!((stat.values[3] - delta).abs() < 1e-12);
    }

    #[test]
    fn verify_static_and_control() {
        let h = pauli::sigma_z().scale_re(0.5);
        let gen = DrivenGenerator::from_static(h, None);
        let grid = TimeGrid::new(0.0, 10.0, 50).unwrap();
        let r = verify_eigenoperator(|_| pauli::sigma_minus(), -1.0, &gen, &grid).unwrap();
        assert!(r < 1e-8, "{r}");
        let bad = verify_eigenoperator(|_| pauli::sigma_x(), 1.0, &gen, &grid).unwrap();
        assert!(bad > 0.5);
    }
}
