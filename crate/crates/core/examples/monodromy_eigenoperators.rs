//! Floquet eigenoperators of the driven qubit from the one-period
//! Heisenberg map, checked against the closed-form F_±.

use gkls::eigenops::{monodromy_eigenoperators, verify_eigenoperator};
use gkls::jc::{jc_eigenoperators, jc_semiclassical_generator, JCParams};
use gkls::operator::C64;
use gkls::propagate::TimeGrid;

fn main() -> gkls::Result<()> {
    let p = JCParams::new(1.0, 1.2, 0.1, C64::from_polar(2.0, 0.3))?;
    let gen = jc_semiclassical_generator(&p);
    let mono = monodromy_eigenoperators(&gen)?;
    println!("Ω = {:.12}", p.rabi_frequency());
    for (k, lambda) in mono.set.freqs.iter().enumerate() {
        println!("  λ_{k} = {lambda:+.12}  invariant: {}", mono.set.invariant_flags[k]);
    }
    let analytic = jc_eigenoperators(&p)?;
    let grid = TimeGrid::new(0.0, 10.0 * p.period(), 400)?;
    let rabi = p.rabi_frequency();
    let rp = verify_eigenoperator(|t| analytic.f_plus(t), rabi, &gen, &grid)?;
    let rm = verify_eigenoperator(|t| analytic.f_minus(t), -rabi, &gen, &grid)?;
    let rw = verify_eigenoperator(|t| analytic.w(t), 0.0, &gen, &grid)?;
    println!("residuals over 10 Rabi periods: F_+ {rp:.2e}, F_- {rm:.2e}, W {rw:.2e}");
    Ok(())
}
