//! Transverse magnetization of the Ising chain from quadrature and from the
//! elliptic-integral closed form, with the logarithmic slope at h = 1.

use xychain::contraction::{magnetization, mz_ising_closed_form};
use xychain::params::ModelParams;

fn main() -> xychain::error::Result<()> {
    println!("{:>6} {:>20} {:>20} {:>9}", "h", "quadrature", "closed form", "diff");
    for h in [0.1, 0.5, 0.9, 0.99, 1.01, 1.1, 2.0, 3.0] {
        let q = magnetization(&ModelParams::ground_state(1.0, h)?)?;
        let c = mz_ising_closed_form(h)?;
        println!("{h:6.2} {q:20.15} {c:20.15} {:9.1e}", (q - c).abs());
    }

    println!("\nslope (Mz(1+2e) - Mz(1+e)) / e near the transition:");
    for eps in [1e-2, 1e-3, 1e-4] {
        let slope = (mz_ising_closed_form(1.0 + 2.0 * eps)? - mz_ising_closed_form(1.0 + eps)?) / eps;
        println!("  e = {eps:.0e}  slope = {slope:.6}");
    }
    Ok(())
}
