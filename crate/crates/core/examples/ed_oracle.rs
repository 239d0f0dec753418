//! Exact diagonalization of periodic rings of 8 to 14 spins converging to the
//! infinite-chain correlators.

use xychain::density::Pauli::*;
use xychain::oracle::{correlator, ground_state, reduced_density, FiniteChain};
use xychain::params::ModelParams;
use xychain::twosite::{assemble_two_site, two_site_tensor};

fn main() -> xychain::error::Result<()> {
    let (gamma, h) = (0.5, 0.5);
    let exact = two_site_tensor(2, &ModelParams::ground_state(gamma, h)?)?;
    println!("infinite chain: xx(R=2) = {:+.10}  zz(R=2) = {:+.10}", exact.txx, exact.tzz);
    for n in [8, 10, 12, 14] {
        let g = ground_state(&FiniteChain::new(n, gamma, h)?)?;
        let xx = correlator(&g.state, &[(0, X), (2, X)])?;
        let zz = correlator(&g.state, &[(0, Z), (2, Z)])?;
        println!(
            "n = {n:2}  E0/n = {:+.8}  xx = {xx:+.10} ({:.1e})  zz = {zz:+.10} ({:.1e})",
            g.energy / n as f64,
            (xx - exact.txx).abs(),
            (zz - exact.tzz).abs()
        );
    }

    let g = ground_state(&FiniteChain::new(12, gamma, h)?)?;
    let rho = reduced_density(&g.state, &[0, 2])?;
    println!(
        "\nn = 12 two-site density matrix, largest entry difference: {:.2e}",
        rho.max_abs_diff(&assemble_two_site(&exact)?)
    );
    Ok(())
}
