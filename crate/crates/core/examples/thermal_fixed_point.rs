//! A three-level system coupled through its Bohr eigenoperators with
//! detailed-balance rates relaxes to the Gibbs state.

use gkls::eigenops::static_eigenoperators;
use gkls::gkls::{build_dissipator, detailed_balance_rates, fixed_point, gibbs_state, liouvillian, DissipatorSpec};
use gkls::operator::{DensityMatrix, Operator, C64};
use gkls::propagate::{evolve_static, TimeGrid};

fn main() -> gkls::Result<()> {
    let h = Operator::from_rows(
        3,
        &[0.0, 0.2, 0.0, 0.2, 1.0, 0.3, 0.0, 0.3, 2.5].map(|x| C64::new(x, 0.0)),
    )?;
    let beta = 1.5;
    let set = static_eigenoperators(&h)?;
    let mut freqs = Vec::new();
    let mut ops = Vec::new();
    for (k, t) in set.transitions.iter().enumerate() {
        if matches!(t, Some((n, m)) if n < m) {
            freqs.push(set.freqs[k]);
            ops.push(set.ops[k].clone());
        }
    }
    let rates = detailed_balance_rates(&freqs, beta, &vec![0.2; freqs.len()])?;
    let mut spec = DissipatorSpec::new(3);
    for (op, (r, rr)) in ops.into_iter().zip(rates) {
        spec = spec.channel(op, r, rr);
    }
    let fp = fixed_point(&spec, &set)?;
    let gibbs = gibbs_state(&h, beta)?;
    println!("|ρ_fp - Gibbs| = {:.2e}, generator residual {:.2e}", fp.state.op().max_diff(gibbs.op()), fp.residual);

    let l = liouvillian(&h, &build_dissipator(&spec)?)?;
    let traj = evolve_static(&l, &DensityMatrix::maximally_mixed(3), &TimeGrid::new(0.0, 60.0, 6)?)?;
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        println!("t = {t:>5}: distance to Gibbs {:.3e}", rho.op().max_diff(gibbs.op()));
    }
    Ok(())
}
