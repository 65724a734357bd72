//! Jaynes–Cummings model: autonomous block dynamics, the reduced qubit state
//! by Kraus summation, the semi-classical Rabi limit and its eigenoperators.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;

use crate::bath::{jc_kinetic_coefficients, BathSpec, KineticCoefficients};
use crate::eigenops::DrivenGenerator;
use crate::error::{Error, Result};
use crate::gkls::{build_dissipator, instantaneous_attractor, AttractorResult, DissipatorSpec};
use crate::operator::{
    commutator_super, kron, ln_poisson_amplitude, mode, pauli, sandwich_super, CMatrix, DensityMatrix,
    Ket, Operator, Superoperator, C64, I, ONE, ZERO,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JCParams {
    pub omega_c: f64,
    pub omega_eg: f64,
    pub g: f64,
    pub alpha: C64,
}

impl JCParams {
    pub fn new(omega_c: f64, omega_eg: f64, g: f64, alpha: C64) -> Result<Self> {
        if !(omega_c.is_finite() && omega_c > 0.0) {
            return Err(Error::Domain(format!("ω_c = {omega_c} must be finite and > 0")));
        }
        if !(omega_eg.is_finite() && omega_eg > 0.0) {
            return Err(Error::Domain(format!("ω_eg = {omega_eg} must be finite and > 0")));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::Domain(format!("g = {g} must be finite and ≥ 0")));
        }
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::Domain("α must be finite".into()));
        }
        Ok(Self { omega_c, omega_eg, g, alpha })
    }

    /// ω_c = 1, Δ = 0 and g = 1/|α|, so that Ω = 2 for every real α > 0.
    pub fn resonant_unit_rabi(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Domain(format!("|α| = {alpha} must be > 0")));
        }
        Self::new(1.0, 1.0, 1.0 / alpha, C64::new(alpha, 0.0))
    }

    /// Δ = ω_eg - ω_c
    pub fn detuning(&self) -> f64 {
        self.omega_eg - self.omega_c
    }

    /// n̄ = |α|²
    pub fn mean_photons(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// Ω_n = √(Δ² + 4g²n)
    pub fn rabi_frequency_n(&self, n: f64) -> f64 {
        let d = self.detuning();
        (d * d + 4.0 * self.g * self.g * n).sqrt()
    }

    /// Ω = Ω_{n̄}
    pub fn rabi_frequency(&self) -> f64 {
        self.rabi_frequency_n(self.mean_photons())
    }

    /// Drive period 2π/ω_c.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega_c
    }
}

/// ω_c(a†a + ½) + (ω_eg/2)σ_z + g(σ_-a† + σ_+a) on qubit ⊗ Fock(0..=n_max).
pub fn jc_hamiltonian(p: &JCParams, n_max: usize) -> Result<Operator> {
    if n_max < 1 {
        return Err(Error::Domain("n_max must be ≥ 1".into()));
    }
    let levels = n_max + 1;
    let id_q = Operator::identity(2);
    let id_m = Operator::identity(levels);
    let a = mode::annihilation(levels);
    let ad = mode::creation(levels);
    let field = &mode::number(levels) + &id_m.scale_re(0.5);
    let h = kron(&id_q, &field).scale_re(p.omega_c)
        + kron(&pauli::sigma_z(), &id_m).scale_re(p.omega_eg / 2.0)
        + (kron(&pauli::sigma_minus(), &ad) + kron(&pauli::sigma_plus(), &a)).scale_re(p.g);
    Ok(h)
}

/// H^(n) on {|g,n>, |e,n-1>}: nω_c + diag(-Δ/2, Δ/2) + g√n σ_x.
pub fn jc_block_hamiltonian(n: usize, p: &JCParams) -> Operator {
    let e = n as f64 * p.omega_c;
    let d = p.detuning();
    let c = p.g * (n as f64).sqrt();
    Operator::from_rows(
        2,
        &[C64::new(e - d / 2.0, 0.0), C64::new(c, 0.0), C64::new(c, 0.0), C64::new(e + d / 2.0, 0.0)],
    )
    .expect("2x2")
}

/// Row-major entries of U^(n)(t) = e^{-inω_c t}(c_n I - i s_n (2H^(n) - 2nω_c)/Ω_n).
/// Valid for n = 0 in its (g, g) entry.
fn block_entries(n: u64, t: f64, p: &JCParams) -> [C64; 4] {
    let d = p.detuning();
    let omega = p.rabi_frequency_n(n as f64);
    let half = omega * t / 2.0;
    let c = half.cos();
    // s_n / Ω_n with its Ω → 0 limit t/2
    let s_over = if omega * t.abs() < 1e-8 { t / 2.0 } else { half.sin() / omega };
    let glob = C64::from_polar(1.0, -(n as f64) * p.omega_c * t);
    let off = -I * (2.0 * p.g * (n as f64).sqrt() * s_over);
    [
        glob * C64::new(c, d * s_over),
        glob * off,
        glob * off,
        glob * C64::new(c, -d * s_over),
    ]
}

/// Closed-form block propagator on {|g,n>, |e,n-1>}.
pub fn jc_block_propagator(n: usize, t: f64, p: &JCParams) -> Result<Operator> {
    if n < 1 {
        return Err(Error::Domain("block index n must be ≥ 1".into()));
    }
    Operator::from_rows(2, &block_entries(n as u64, t, p))
}

type M2 = [[C64; 2]; 2];

fn m2_mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn m2_adjoint(a: &M2) -> M2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn m2_from(op: &Operator) -> M2 {
    [[op.get(0, 0), op.get(0, 1)], [op.get(1, 0), op.get(1, 1)]]
}

fn m2_to_op(a: &M2) -> Operator {
    Operator::from_rows(2, &[a[0][0], a[0][1], a[1][0], a[1][1]]).expect("2x2")
}

/// Fock window and coherent amplitudes <n|α> used by the Kraus sum.
#[derive(Clone, Debug)]
struct KrausWindow {
    lo: u64,
    hi: u64,
    /// <n|α> for n in lo-1 ..= hi+1 (entry 0 is n = lo - 1, zero when lo = 0)
    amps: Vec<C64>,
}

impl KrausWindow {
    fn new(p: &JCParams) -> Self {
        let a = p.alpha.norm();
        let nbar = a * a;
        let lo = (nbar - 10.0 * a).floor().max(0.0) as u64;
        let hi = (nbar + 10.0 * a + 20.0).ceil() as u64;
        let phi = p.alpha.arg();
        let mut amps = Vec::with_capacity((hi - lo + 3) as usize);
        if lo == 0 {
            amps.push(ZERO);
        }
        let first = lo.saturating_sub(1);
        for n in first..=hi + 1 {
            let ln = ln_poisson_amplitude(a, n);
            amps.push(if ln == f64::NEG_INFINITY {
                ZERO
            } else {
                C64::from_polar(ln.exp(), n as f64 * phi)
            });
        }
        Self { lo, hi, amps }
    }

    fn amp(&self, n: i64) -> C64 {
        let idx = n - self.lo as i64 + 1;
        if idx < 0 {
            ZERO
        } else {
            self.amps[idx as usize]
        }
    }

    /// χ_m = <m| U(t) |α>, a map on the qubit (rows: output g, e).
    fn kraus(&self, m: u64, t: f64, p: &JCParams) -> M2 {
        let mi = m as i64;
        let bm = block_entries(m, t, p);
        let bm1 = block_entries(m + 1, t, p);
        [
            [self.amp(mi) * bm[0], self.amp(mi - 1) * bm[1]],
            [self.amp(mi + 1) * bm1[2], self.amp(mi) * bm1[3]],
        ]
    }
}

const KRAUS_COMPLETENESS: f64 = 1e-8;

/// Kraus operators of the reduced qubit dynamics on the truncated Fock window.
#[derive(Clone, Debug)]
pub struct KrausSet {
    pub ops: Vec<Operator>,
    /// Fock index of ops[0].
    pub first_index: usize,
    /// max |Σ χ†χ - I|
    pub completeness_deficit: f64,
}

pub fn jc_kraus_operators(p: &JCParams, t: f64) -> Result<KrausSet> {
    let w = KrausWindow::new(p);
    let mut sum = [[ZERO; 2]; 2];
    let mut ops = Vec::with_capacity((w.hi - w.lo + 1) as usize);
    for m in w.lo..=w.hi {
        let k = w.kraus(m, t, p);
        let kk = m2_mul(&m2_adjoint(&k), &k);
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += kk[i][j];
            }
        }
        ops.push(m2_to_op(&k));
    }
    let deficit = completeness_deficit(&sum);
    if deficit > KRAUS_COMPLETENESS {
        return Err(Error::Truncation { achieved: 1.0 - deficit, deficit });
    }
    Ok(KrausSet { ops, first_index: w.lo as usize, completeness_deficit: deficit })
}

fn completeness_deficit(sum: &M2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((sum[i][j] - target).norm());
        }
    }
    worst
}

fn reduce_with(w: &KrausWindow, rho: &M2, p: &JCParams, t: f64) -> Result<DensityMatrix> {
    let mut out = [[ZERO; 2]; 2];
    let mut sum = [[ZERO; 2]; 2];
    for m in w.lo..=w.hi {
        let k = w.kraus(m, t, p);
        let kd = m2_adjoint(&k);
        let term = m2_mul(&m2_mul(&k, rho), &kd);
        let kk = m2_mul(&kd, &k);
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += term[i][j];
                sum[i][j] += kk[i][j];
            }
        }
    }
    let deficit = completeness_deficit(&sum);
    if deficit > KRAUS_COMPLETENESS {
        return Err(Error::Truncation { achieved: 1.0 - deficit, deficit });
    }
    DensityMatrix::with_tolerance(m2_to_op(&out), KRAUS_COMPLETENESS, 1e-9)
}

fn check_qubit(rho: &DensityMatrix) -> Result<M2> {
    if rho.dim() != 2 {
        return Err(Error::Dimension(format!("qubit state expected, got dimension {}", rho.dim())));
    }
    Ok(m2_from(rho.op()))
}

/// Reduced qubit state Σ_m χ_m ρ χ_m† of the autonomous model started in ρ ⊗ |α><α|.
///
/// The sum runs over m in [n̄ - 10|α|, n̄ + 10|α| + 20] without renormalization.
pub fn jc_kraus_reduce(rho0: &DensityMatrix, p: &JCParams, t: f64) -> Result<DensityMatrix> {
    let rho = check_qubit(rho0)?;
    reduce_with(&KrausWindow::new(p), &rho, p, t)
}

/// [`jc_kraus_reduce`] at many times; times are processed in parallel, each
/// with a sequential sum over m, so results do not depend on thread count.
pub fn jc_kraus_reduce_series(rho0: &DensityMatrix, p: &JCParams, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    let rho = check_qubit(rho0)?;
    let w = KrausWindow::new(p);
    times.par_iter().map(|&t| reduce_with(&w, &rho, p, t)).collect()
}

/// (ω_eg/2)σ_z + g(α* e^{iω_c t} σ_- + α e^{-iω_c t} σ_+)
pub fn jc_semiclassical_hamiltonian(t: f64, p: &JCParams) -> Operator {
    let drive = p.alpha * C64::from_polar(p.g, -p.omega_c * t);
    Operator::from_rows(
        2,
        &[C64::new(-p.omega_eg / 2.0, 0.0), drive.conj(), drive, C64::new(p.omega_eg / 2.0, 0.0)],
    )
    .expect("2x2")
}

/// Rotating-frame Hamiltonian (Δ/2)σ_z + g(α σ_+ + α* σ_-).
pub fn jc_rotating_hamiltonian(p: &JCParams) -> Operator {
    jc_semiclassical_hamiltonian(0.0, p) - pauli::sigma_z().scale_re(p.omega_c / 2.0)
}

/// V(t) = e^{-iω_c σ_z t/2}, the frame change from rotating to lab frame.
pub fn jc_frame(t: f64, p: &JCParams) -> Operator {
    let h = p.omega_c * t / 2.0;
    Operator::from_rows(2, &[C64::from_polar(1.0, h), ZERO, ZERO, C64::from_polar(1.0, -h)]).expect("2x2")
}

fn rz(theta: f64) -> Operator {
    Operator::from_rows(2, &[C64::from_polar(1.0, theta / 2.0), ZERO, ZERO, C64::from_polar(1.0, -theta / 2.0)])
        .expect("2x2")
}

/// Closed-form propagator of the semi-classical Hamiltonian:
/// U(t) = V(t) R U_Ω(t) R† where R = R_z(-arg α) makes the drive real and
/// U_Ω(t) = cos(Ωt/2) I - i sin(Ωt/2) (Δσ_z + 2g|α|σ_x)/Ω.
pub fn jc_semiclassical_propagator(t: f64, p: &JCParams) -> Operator {
    let d = p.detuning();
    let omega = p.rabi_frequency();
    let half = omega * t / 2.0;
    let c = half.cos();
    let s_over = if omega * t.abs() < 1e-8 { t / 2.0 } else { half.sin() / omega };
    let off = -I * (2.0 * p.g * p.alpha.norm() * s_over);
    let core = Operator::from_rows(2, &[C64::new(c, d * s_over), off, off, C64::new(c, -d * s_over)]).expect("2x2");
    let r = rz(-p.alpha.arg());
    &jc_frame(t, p) * &(&(&r * &core) * &r.adjoint())
}

/// The Rabi drive as a periodic generator with period 2π/ω_c.
pub fn jc_semiclassical_generator(p: &JCParams) -> DrivenGenerator {
    let q = *p;
    DrivenGenerator::new(2, Some(p.period()), move |t| jc_semiclassical_hamiltonian(t, &q))
}

/// Analytic eigenoperators of the semi-classical Rabi dynamics.
///
/// Rotating-frame operators satisfy [H_r, F_±] = ±Ω F_± and [H_r, F_0] = 0;
/// the Schrödinger-picture versions are X(t) = V(t) X V(t)†, for which
/// U†(t) F_±(t) U(t) = e^{±iΩt} F_±(0).
#[derive(Clone, Debug)]
pub struct JcEigenoperators {
    params: JCParams,
    rabi: f64,
    f_plus: Operator,
    f_minus: Operator,
    f_zero: Operator,
    w: Operator,
}

impl JcEigenoperators {
    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    fn lab(&self, x: &Operator, t: f64) -> Operator {
        let v = jc_frame(t, &self.params);
        &(&v * x) * &v.adjoint()
    }

    pub fn f_plus(&self, t: f64) -> Operator {
        self.lab(&self.f_plus, t)
    }

    pub fn f_minus(&self, t: f64) -> Operator {
        self.lab(&self.f_minus, t)
    }

    /// Unnormalized constant of motion, V(t) H_r V(t)†.
    pub fn w(&self, t: f64) -> Operator {
        self.lab(&self.w, t)
    }

    /// F_0(t) = √2 W(t)/Ω, normalized to tr(F_0²) = 1.
    pub fn f0(&self, t: f64) -> Operator {
        self.lab(&self.f_zero, t)
    }

    /// Rotating-frame (F_+, F_-, F_0).
    pub fn rotating(&self) -> (&Operator, &Operator, &Operator) {
        (&self.f_plus, &self.f_minus, &self.f_zero)
    }
}

pub fn jc_eigenoperators(p: &JCParams) -> Result<JcEigenoperators> {
    let a = p.alpha;
    if a.norm() == 0.0 || p.g == 0.0 {
        return Err(Error::Degenerate("g|α| = 0: F_± normalization vanishes".into()));
    }
    let d = p.detuning();
    let omega = p.rabi_frequency();
    let norm = (2.0 * p.g * p.g * a.norm_sqr()).sqrt() / omega;
    let build = |sign: f64| {
        let den = d - sign * omega;
        let c_minus = a.conj() * (SQRT_2 * p.g / den) + (ONE / (a * (SQRT_2 * p.g))) * (sign * omega);
        let c_plus = a * (SQRT_2 * p.g / den);
        let z = 1.0 / SQRT_2;
        // σ_z/√2 contributes -z on |g>, +z on |e>
        Operator::from_rows(2, &[C64::new(-z, 0.0), c_minus, c_plus, C64::new(z, 0.0)])
            .expect("2x2")
            .scale_re(norm)
    };
    let w = jc_rotating_hamiltonian(p);
    Ok(JcEigenoperators {
        params: *p,
        rabi: omega,
        f_plus: build(1.0),
        f_minus: build(-1.0),
        f_zero: w.scale_re(SQRT_2 / omega),
        w,
    })
}

/// Dressed states of block n in the basis {|g,n>, |e,n-1>}.
#[derive(Clone, Debug)]
pub struct DressedStates {
    pub plus: Ket,
    pub minus: Ket,
    pub e_plus: f64,
    pub e_minus: f64,
    /// max over both states of |H^(n)ψ - Eψ|
    pub residual: f64,
}

/// |ψ_+> = sin(θ/2)|g,n> + cos(θ/2)|e,n-1>, |ψ_-> = -cos(θ/2)|g,n> + sin(θ/2)|e,n-1>
/// with tan θ = 2g√n/Δ and E_± = nω_c ± Ω_n/2.
pub fn jc_dressed_states(n: usize, p: &JCParams) -> Result<DressedStates> {
    if n < 1 {
        return Err(Error::Domain("block index n must be ≥ 1".into()));
    }
    let theta = (2.0 * p.g * (n as f64).sqrt()).atan2(p.detuning());
    let (s, c) = (theta / 2.0).sin_cos();
    let plus = Ket::from_vec(vec![C64::new(s, 0.0), C64::new(c, 0.0)]);
    let minus = Ket::from_vec(vec![C64::new(-c, 0.0), C64::new(s, 0.0)]);
    let base = n as f64 * p.omega_c;
    let half = p.rabi_frequency_n(n as f64) / 2.0;
    let h = jc_block_hamiltonian(n, p);
    let res = |v: &Ket, e: f64| (h.matrix() * v - v * C64::new(e, 0.0)).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let residual = res(&plus, base + half).max(res(&minus, base - half));
    Ok(DressedStates { plus, minus, e_plus: base + half, e_minus: base - half, residual })
}

/// exp(-φ(t)) with φ(t) = (2n̄g²/(Δ² + 4n̄g²))(gt)².
pub fn collapse_envelope(t: f64, p: &JCParams) -> f64 {
    let nbar = p.mean_photons();
    let d = p.detuning();
    let den = d * d + 4.0 * nbar * p.g * p.g;
    if den == 0.0 {
        return 1.0;
    }
    let gt = p.g * t;
    (-(2.0 * nbar * p.g * p.g / den) * gt * gt).exp()
}

fn check_touchard(j: u32, x: f64) -> Result<()> {
    if j > 12 {
        return Err(Error::Domain(format!("Touchard order {j} exceeds 12")));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("Touchard argument {x} must be finite and > 0")));
    }
    Ok(())
}

/// x^{-j} T_j(x) = E[(k/x)^j] for k ~ Poisson(x).
///
/// Weights are generated by the ratio recurrence outward from the mode and
/// normalized by their own sum; summation stops once a term falls below
/// 1e-18 of the partial sum.
pub fn touchard_scaled(j: u32, x: f64) -> Result<f64> {
    check_touchard(j, x)?;
    let mode = x.floor() as u64;
    let moment = |k: u64| (k as f64 / x).powi(j as i32);
    let mut num = moment(mode);
    let mut den = 1.0;
    let mut w = 1.0;
    let mut k = mode;
    loop {
        w *= x / (k + 1) as f64;
        k += 1;
        let term = w * moment(k);
        num += term;
        den += w;
        if term < 1e-18 * num && w < 1e-18 * den {
            break;
        }
    }
    let mut w = 1.0;
    let mut k = mode;
    while k > 0 {
        w *= k as f64 / x;
        k -= 1;
        let term = w * moment(k);
        num += term;
        den += w;
        if term < 1e-18 * num && w < 1e-18 * den {
            break;
        }
    }
    Ok(num / den)
}

/// T_j(x) = e^{-x} Σ_k k^j x^k / k!
pub fn touchard(j: u32, x: f64) -> Result<f64> {
    Ok(touchard_scaled(j, x)? * x.powi(j as i32))
}

/// x^j (1 + j(j-1)/(2x))
pub fn touchard_asymptotic(j: u32, x: f64) -> Result<f64> {
    check_touchard(j, x)?;
    let jf = j as f64;
    Ok(x.powi(j as i32) * (1.0 + jf * (jf - 1.0) / (2.0 * x)))
}

/// Rotating-frame dissipator of the driven qubit with kinetic coefficients:
/// γ_- D[F_-] + γ_+ D[F_+] + γ_0 D[F_0].
#[derive(Clone, Debug)]
pub struct JcDissipator {
    pub params: JCParams,
    pub coefficients: KineticCoefficients,
    pub eigenoperators: JcEigenoperators,
    pub spec: DissipatorSpec,
    pub superop: Superoperator,
}

impl JcDissipator {
    /// Lab-frame generator -i[H(t), ·] + V(t)-conjugated dissipator.
    pub fn lab_generator(&self, t: f64) -> Superoperator {
        let v = jc_frame(t, &self.params);
        let fwd = sandwich_super(&v, &v.adjoint()).expect("2x2");
        let back = sandwich_super(&v.adjoint(), &v).expect("2x2");
        let h = jc_semiclassical_hamiltonian(t, &self.params);
        commutator_super(&h).scale(-I).add(&fwd.compose(&self.superop).compose(&back))
    }

    /// Rotating-frame generator -i[H_r, ·] + D.
    pub fn rotating_generator(&self) -> Superoperator {
        commutator_super(&jc_rotating_hamiltonian(&self.params)).scale(-I).add(&self.superop)
    }

    /// Instantaneous attractor in the rotating frame. The residual is that of
    /// the full dissipator including the F_0 term.
    pub fn attractor(&self) -> Result<AttractorResult> {
        let k = &self.coefficients;
        let (_, fm, _) = self.eigenoperators.rotating();
        let mut res = instantaneous_attractor(&[(fm.clone(), k.gamma_minus, k.gamma_plus)])?;
        res.residual = self.superop.apply(res.state.op())?.max_abs();
        Ok(res)
    }
}

pub fn jc_dissipator(p: &JCParams, bath: &BathSpec) -> Result<JcDissipator> {
    let coefficients = jc_kinetic_coefficients(p, bath)?;
    let eigenoperators = jc_eigenoperators(p)?;
    let (_, fm, f0) = eigenoperators.rotating();
    let spec = DissipatorSpec::new(2)
        .channel(fm.clone(), coefficients.gamma_minus, coefficients.gamma_plus)
        .invariant_dephasing(vec![f0.clone()], CMatrix::from_element(1, 1, C64::new(coefficients.gamma0, 0.0)));
    let superop = build_dissipator(&spec)?;
    Ok(JcDissipator { params: *p, coefficients, eigenoperators, spec, superop })
}
