//! Mermin nonlocality of three neighbouring spins across the transition at
//! γ = 0.5: optimizer value, analytic bounds, the two-angle reduction and the
//! block entropy.

use xychain::contraction::ContractionTable;
use xychain::params::ModelParams;
use xychain::threesite::{
    block_entropy_from_g0, mermin_lower_bound, mermin_max, mermin_max_block11, mermin_upper_bound,
    three_site_tensor_from_table,
};

fn main() -> xychain::error::Result<()> {
    println!("{:>5} {:>10} {:>10} {:>10} {:>10} {:>8}", "h", "lower", "max", "block11", "upper", "S_vN");
    for k in 0..=30 {
        let h = 0.1 * k as f64;
        let table = ContractionTable::new(&ModelParams::ground_state(0.5, h)?, 2)?;
        let t = three_site_tensor_from_table(1, 1, &table)?;
        println!(
            "{h:5.2} {:10.6} {:10.6} {:10.6} {:10.6} {:8.5}",
            mermin_lower_bound(&t),
            mermin_max(&t)?,
            mermin_max_block11(&t)?,
            mermin_upper_bound(&t),
            block_entropy_from_g0(table.g(0)),
        );
    }
    Ok(())
}
