//! Dressed states of the Jaynes-Cummings blocks and the collapse envelope.

use gkls::jc::{collapse_envelope, jc_dressed_states, JCParams};
use gkls::operator::C64;

fn main() -> gkls::Result<()> {
    let p = JCParams::new(1.0, 1.1, 0.05, C64::new(4.0, 0.0))?;
    for n in [1, 4, 16, 64] {
        let d = jc_dressed_states(n, &p)?;
        println!(
            "n = {n:>3}: E+ = {:.6}, E- = {:.6}, splitting {:.6}, residual {:.1e}",
            d.e_plus,
            d.e_minus,
            d.e_plus - d.e_minus,
            d.residual
        );
    }
    for t in [0.0, 5.0, 10.0, 20.0, 40.0] {
        println!("envelope({t}) = {:.6}", collapse_envelope(t, &p));
    }
    Ok(())
}
