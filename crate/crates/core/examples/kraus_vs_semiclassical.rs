//! Reduced qubit state from the Kraus sum over Fock blocks, compared with
//! the semi-classical propagator at a few times.

use gkls::jc::{jc_kraus_operators, jc_kraus_reduce, jc_semiclassical_propagator, JCParams};
use gkls::operator::{pauli, uhlmann_fidelity, DensityMatrix, Operator, C64};

fn main() -> gkls::Result<()> {
    let rho0 = DensityMatrix::new(pauli::ground())?;
    for alpha in [3.0, 30.0] {
        // g|α| fixed so both runs share the Rabi frequency
        let p = JCParams::new(1.0, 1.05, 0.1 / alpha, C64::new(alpha, 0.0))?;
        println!("|α| = {alpha}, Ω = {:.4}", p.rabi_frequency());
        for t in [0.0, 10.0, 25.0, 50.0] {
            let kraus = jc_kraus_operators(&p, t)?;
            let auto = jc_kraus_reduce(&rho0, &p, t)?;
            let u = jc_semiclassical_propagator(t, &p);
            let semi = DensityMatrix::new(Operator::from_matrix(u.matrix() * rho0.op().matrix() * u.matrix().adjoint())?)?;
            println!(
                "  t = {t:>5}: {} Kraus ops, deficit {:.1e}, F = {:.8}",
                kraus.ops.len(),
                kraus.completeness_deficit,
                uhlmann_fidelity(&auto, &semi)?
            );
        }
    }
    Ok(())
}
