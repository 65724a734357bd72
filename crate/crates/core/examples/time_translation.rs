//! Covariance of a dynamical map with the free evolution: eigenoperator
//! jumps commute with it, a σ_x jump under H = σ_z does not.

use gkls::gkls::{build_dissipator, check_time_translation, liouvillian, DissipatorSpec};
use gkls::operator::pauli;

fn main() -> gkls::Result<()> {
    let h = pauli::sigma_z();
    let good = DissipatorSpec::new(2).channel(pauli::sigma_minus(), 0.4, 0.1);
    let bad = DissipatorSpec::new(2).channel(pauli::sigma_x(), 0.4, 0.0);
    for (name, spec) in [("σ_- channel", good), ("σ_x channel", bad)] {
        let l = liouvillian(&h, &build_dissipator(&spec)?)?;
        let worst = [0.3, 1.0, 2.5]
            .iter()
            .map(|&s| check_time_translation(&l, &h, 1.0, s))
            .collect::<gkls::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("{name}: max |[Λ_t, U_s]| = {worst:.3e}");
    }
    Ok(())
}
