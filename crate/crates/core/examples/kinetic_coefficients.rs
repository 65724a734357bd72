//! Kinetic coefficients γ_0, γ_± of the driven qubit over a detuning sweep.

use gkls::bath::{jc_kinetic_coefficients, BathSpec, SpectralDensity};
use gkls::jc::JCParams;
use gkls::operator::C64;

fn main() -> gkls::Result<()> {
    let bath = BathSpec::new(0.2, SpectralDensity::Ohmic { eta: 0.01, cutoff: 10.0 })?;
    println!("{:>6} {:>11} {:>11} {:>11} {:>8} {:>8}", "Δ", "γ0", "γ-", "γ+", "s+", "s-");
    for k in 0..=8 {
        let delta = -0.4 + 0.1 * k as f64;
        let p = JCParams::new(1.0, 1.0 + delta, 0.1, C64::new(2.0, 0.0))?;
        let c = jc_kinetic_coefficients(&p, &bath)?;
        println!(
            "{delta:>6.2} {:>11.4e} {:>11.4e} {:>11.4e} {:>8.4} {:>8.4}",
            c.gamma0, c.gamma_minus, c.gamma_plus, c.s_plus, c.s_minus
        );
    }
    Ok(())
}
