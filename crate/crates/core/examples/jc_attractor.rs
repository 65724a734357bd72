//! Instantaneous attractor of the driven qubit in a thermal bath, across
//! detuning and temperature.

use gkls::bath::{BathSpec, SpectralDensity};
use gkls::experiments::bloch;
use gkls::jc::{jc_dissipator, JCParams};
use gkls::operator::C64;

fn main() -> gkls::Result<()> {
    let sd = SpectralDensity::Ohmic { eta: 0.01, cutoff: 10.0 };
    println!("{:>6} {:>5} {:>9} {:>9} {:>9} {:>10}", "Δ", "T", "x", "y", "z", "residual");
    for delta in [-0.2, 0.0, 0.2] {
        for temp in [0.0, 0.3, 3.0] {
            let p = JCParams::new(1.0, 1.0 + delta, 0.05, C64::new(2.0, 0.0))?;
            let diss = jc_dissipator(&p, &BathSpec::new(temp, sd)?)?;
            let att = diss.attractor()?;
            let [x, y, z] = bloch(&att.state);
            println!("{delta:>6} {temp:>5} {x:>9.5} {y:>9.5} {z:>9.5} {:>10.2e}", att.residual);
        }
    }
    Ok(())
}
