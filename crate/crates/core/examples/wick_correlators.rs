//! Multi-spin correlators by Wick's theorem: the Pfaffian of Majorana
//! contractions against the determinant formulas, with and without the
//! Jordan–Wigner string.

use xychain::contraction::ContractionTable;
use xychain::density::Pauli::*;
use xychain::params::ModelParams;
use xychain::threesite::three_site_tensor_from_table;
use xychain::wick::{contraction_determinant, wick_expectation};

fn main() -> xychain::error::Result<()> {
    let table = ContractionTable::new(&ModelParams::ground_state(0.5, 0.7)?, 6)?;
    let t = three_site_tensor_from_table(1, 2, &table)?;
    for (name, det, ops) in [
        ("xxz", t.txxz, [(0, X), (1, X), (3, Z)]),
        ("xzx", t.txzx, [(0, X), (1, Z), (3, X)]),
        ("zxx", t.tzxx, [(0, Z), (1, X), (3, X)]),
        ("zzz", t.tzzz, [(0, Z), (1, Z), (3, Z)]),
    ] {
        let w = wick_expectation(&ops, &table)?;
        println!("{name}(1,2): determinant {det:+.12}  pfaffian {w:+.12}");
    }

    // With the Jordan–Wigner string in between, σx … σx collapses to a
    // single contraction; without it, to a Toeplitz determinant.
    let r = 6i64;
    let mut string = vec![(0, X)];
    string.extend((1..r).map(|j| (j, Z)));
    string.push((r, X));
    println!(
        "\nstring ⟨x z z z z z x⟩: pfaffian {:+.12}  -G(-{r}) {:+.12}",
        wick_expectation(&string, &table)?,
        -table.g(-r)
    );
    let rows: Vec<i64> = (0..r).collect();
    let cols: Vec<i64> = (1..=r).collect();
    println!(
        "xx(R = {r}):            pfaffian {:+.12}  toeplitz {:+.12}",
        wick_expectation(&[(0, X), (r, X)], &table)?,
        contraction_determinant(&rows, &cols, |k| table.g(k))
    );
    Ok(())
}
