//! The Mermin optimizer on a GHZ state, a product state and a noisy GHZ
//! state, working directly from the density matrix.

use nalgebra::DVector;
use xychain::density::{DensityMatrix, C64};
use xychain::threesite::{mermin_optimize, CorrelationCube};

fn main() -> xychain::error::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut ghz = DVector::from_element(8, C64::new(0.0, 0.0));
    ghz[0] = C64::new(s, 0.0);
    ghz[7] = C64::new(s, 0.0);
    let ghz = DensityMatrix::pure(&ghz)?;

    let mut up = DVector::from_element(8, C64::new(0.0, 0.0));
    up[0] = C64::new(1.0, 0.0);
    let product = DensityMatrix::pure(&up)?;

    let mixed = DensityMatrix::maximally_mixed(3);
    for (name, rho) in [("GHZ", ghz.clone()), ("product", product)] {
        let opt = mermin_optimize(&CorrelationCube::from_density(&rho)?)?;
        println!("{name:>10}: max Mermin = {:.8}", opt.value);
    }
    for p in [0.25, 0.5, 0.75] {
        let m = ghz.matrix() * C64::new(p, 0.0) + mixed.matrix() * C64::new(1.0 - p, 0.0);
        let opt = mermin_optimize(&CorrelationCube::from_density(&DensityMatrix::new(m)?)?)?;
        println!("GHZ p={p:.2}: max Mermin = {:.8}  (4p = {:.2})", opt.value, 4.0 * p);
    }
    Ok(())
}
