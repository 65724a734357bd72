//! Autonomous Jaynes-Cummings qubit against the semi-classical Rabi drive,
//! with the Rabi frequency held at Ω = 2 while |α| grows.

use gkls::experiments::{convergence_series, fixed_rabi_params};
use gkls::operator::{DensityMatrix, Ket, C64};
use gkls::propagate::TimeGrid;

fn main() -> gkls::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityMatrix::from_ket(&Ket::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)]))?;
    let grid = TimeGrid::new(0.0, 20.0, 2000)?;
    println!("{:>6} {:>10} {:>12}", "|α|", "g", "min F");
    for alpha in [5.0, 10.0, 25.0, 50.0, 100.0] {
        let p = fixed_rabi_params(alpha, 1.0, 0.0, 2.0)?;
        let series = convergence_series(&p, &plus, &grid)?;
        println!("{alpha:>6} {:>10.5} {:>12.8}", p.g, series.min_fidelity());
    }
    Ok(())
}
