//! Bosonic bath models and the kinetic coefficients of the driven qubit.

use crate::error::{Error, Result};
use crate::jc::JCParams;

/// Spectral density J(ω) for ω ≥ 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralDensity {
    /// η ω e^{-ω/ω_cut}
    Ohmic { eta: f64, cutoff: f64 },
    /// η ω³ e^{-ω/ω_cut}, a three-dimensional field
    Cubic { eta: f64, cutoff: f64 },
    /// η on [0, ω_cut], zero above
    Flat { eta: f64, cutoff: f64 },
}

impl SpectralDensity {
    pub fn eval(&self, omega: f64) -> f64 {
        let w = omega.abs();
        match *self {
            SpectralDensity::Ohmic { eta, cutoff } => eta * w * (-w / cutoff).exp(),
            SpectralDensity::Cubic { eta, cutoff } => eta * w * w * w * (-w / cutoff).exp(),
            SpectralDensity::Flat { eta, cutoff } => {
                if w <= cutoff {
                    eta
                } else {
                    0.0
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (eta, cutoff) = match *self {
            SpectralDensity::Ohmic { eta, cutoff }
            | SpectralDensity::Cubic { eta, cutoff }
            | SpectralDensity::Flat { eta, cutoff } => (eta, cutoff),
        };
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::Domain(format!("coupling strength {eta} must be finite and ≥ 0")));
        }
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::Domain(format!("cutoff {cutoff} must be finite and > 0")));
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            SpectralDensity::Ohmic { .. } => "ohmic",
            SpectralDensity::Cubic { .. } => "cubic",
            SpectralDensity::Flat { .. } => "flat",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathSpec {
    /// k_B T in frequency units.
    pub temperature: f64,
    pub spectral_density: SpectralDensity,
}

impl BathSpec {
    pub fn new(temperature: f64, spectral_density: SpectralDensity) -> Result<Self> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::Domain(format!("temperature {temperature} must be finite and ≥ 0")));
        }
        spectral_density.validate()?;
        Ok(Self { temperature, spectral_density })
    }

    /// 1/T, infinite at T = 0.
    pub fn beta(&self) -> f64 {
        if self.temperature == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.temperature
        }
    }
}

/// N(ω, T) = 1/(e^{ω/T} - 1)
pub fn bose_einstein(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("occupation needs ω > 0, got {omega}")));
    }
    if temperature < 0.0 || temperature.is_nan() {
        return Err(Error::Domain(format!("temperature {temperature} must be ≥ 0")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// Real part of the one-sided bath correlation transform: J(ν)(N(ν)+1) for
/// emission (ν > 0), J(|ν|)N(|ν|) for absorption (ν < 0). The principal-value
/// part is not evaluated and the imaginary part is zero.
pub fn gamma_one_sided(nu: f64, bath: &BathSpec) -> f64 {
    let j = bath.spectral_density.eval(nu);
    if j == 0.0 {
        return 0.0;
    }
    if nu == 0.0 {
        // ν → 0 limit of J(ν)N(ν)
        return match bath.spectral_density {
            SpectralDensity::Ohmic { eta, .. } => eta * bath.temperature,
            SpectralDensity::Cubic { .. } => 0.0,
            SpectralDensity::Flat { .. } => {
                if bath.temperature > 0.0 {
                    f64::INFINITY
                } else {
                    j
                }
            }
        };
    }
    let n = bose_einstein(nu.abs(), bath.temperature).expect("ν ≠ 0 and T ≥ 0");
    if nu > 0.0 {
        j * (n + 1.0)
    } else {
        j * n
    }
}

/// Kinetic coefficients of the semi-classically driven qubit coupled through σ_x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KineticCoefficients {
    /// rate of D[F_0]
    pub gamma0: f64,
    /// rate of D[F_-]
    pub gamma_minus: f64,
    /// rate of D[F_+]
    pub gamma_plus: f64,
    /// weight of the ω_c + Ω side band
    pub s_plus: f64,
    /// weight of the ω_c - Ω side band
    pub s_minus: f64,
    /// weight of the carrier ω_c
    pub k0: f64,
    /// Ω = √(Δ² + 4g²|α|²)
    pub rabi: f64,
}

/// Side-band weights and rates from the eigenoperator decomposition of σ_x.
///
/// s_± = (Δ(Δ ± Ω) + 2g²|α|²)/(2Ω²), k_0 = 2g²|α|²/Ω², s_+ + s_- + k_0 = 1.
/// γ_- = s_+Γ(ω_c+Ω) + s_-Γ(Ω-ω_c), γ_+ = s_-Γ(ω_c-Ω) + s_+Γ(-ω_c-Ω),
/// γ_0 = k_0(Γ(ω_c) + Γ(-ω_c)).
pub fn jc_kinetic_coefficients(p: &JCParams, bath: &BathSpec) -> Result<KineticCoefficients> {
    let delta = p.detuning();
    let coupling = 2.0 * p.g * p.g * p.alpha.norm_sqr();
    let rabi = p.rabi_frequency();
    if rabi == 0.0 {
        return Err(Error::Degenerate("Ω = 0: no Rabi splitting".into()));
    }
    let o2 = rabi * rabi;
    let s_plus = ((delta * (delta + rabi) + coupling) / (2.0 * o2)).max(0.0);
    let s_minus = ((delta * (delta - rabi) + coupling) / (2.0 * o2)).max(0.0);
    let k0 = coupling / o2;
    let wc = p.omega_c;
    let gam = |nu: f64| gamma_one_sided(nu, bath);
    Ok(KineticCoefficients {
        gamma0: k0 * (gam(wc) + gam(-wc)),
        gamma_minus: s_plus * gam(wc + rabi) + s_minus * gam(rabi - wc),
        gamma_plus: s_minus * gam(wc - rabi) + s_plus * gam(-wc - rabi),
        s_plus,
        s_minus,
        k0,
        rabi,
    })
}
