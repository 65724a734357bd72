//! Scaled Touchard polynomials against their large-x expansion.

use gkls::experiments::{log_log_slope, touchard_table};

fn main() -> gkls::Result<()> {
    let xs = [1e2, 1e3, 1e4, 1e5];
    let rows = touchard_table(&[2, 3, 4, 6], &xs)?;
    for r in &rows {
        println!("j = {} x = {:>8.0e}: x^-j T_j = {:.12}  residual {:.3e}", r.order, r.x, r.scaled, r.residual);
    }
    for j in [3, 4, 6] {
        let res: Vec<f64> = rows.iter().filter(|r| r.order == j).map(|r| r.residual.abs()).collect();
        println!("j = {j}: log-log slope {:.4}", log_log_slope(&xs, &res).unwrap_or(f64::NAN));
    }
    Ok(())
}
