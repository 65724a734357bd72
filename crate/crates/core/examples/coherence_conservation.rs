//! Coherence in the eigenbasis of the full Hamiltonian stays constant under
//! a strictly energy-conserving exchange; coherence in the bare basis does not.

use gkls::operator::{coherence_rel_entropy, hermitian_eig, kron, mode, pauli, partial_trace, DensityMatrix, Ket, Operator, C64};

fn main() -> gkls::Result<()> {
    let levels = 4;
    let id_q = Operator::identity(2);
    let id_m = Operator::identity(levels);
    let h0 = &kron(&pauli::sigma_z().scale_re(0.5), &id_m) + &kron(&id_q, &mode::number(levels));
    // exchange coupling commutes with the bare energies
    let hi = &kron(&pauli::sigma_plus(), &mode::annihilation(levels)) + &kron(&pauli::sigma_minus(), &mode::creation(levels));
    let hi = hi.scale_re(0.3);
    println!("|[H_I, H_0]| = {:.1e}", hi.commutator(&h0).max_abs());

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = Ket::zeros(2 * levels);
    psi[1] = C64::new(s, 0.0);
    psi[levels + 2] = C64::new(s, 0.0);
    let rho0 = DensityMatrix::from_ket(&psi)?;
    let h = &h0 + &hi;
    let energy = hermitian_eig(&h)?.vectors;
    let bare = hermitian_eig(&h0)?.vectors;
    for t in [0.0, 1.0, 3.0, 7.0] {
        let u = h.scale(C64::new(0.0, -t)).expm();
        let rho = DensityMatrix::new(Operator::from_matrix(u.matrix() * rho0.op().matrix() * u.matrix().adjoint())?)?;
        let qubit = partial_trace(&rho.clone().with_dims(vec![2, levels])?, 0)?;
        println!(
            "t = {t}: C_energy = {:.10}, C_bare = {:.6}, qubit purity {:.6}",
            coherence_rel_entropy(&rho, &energy)?,
            coherence_rel_entropy(&rho, &bare)?,
            qubit.purity()
        );
    }
    Ok(())
}
