//! Complete elliptic integrals via the arithmetic–geometric mean.
//!
//! Both functions take the modulus `k` (not the parameter `m = k²`).

use std::f64::consts::FRAC_PI_2;

const MAX_ITER: usize = 64;

/// Complete elliptic integral of the first kind, `K(k)`, for `0 <= k < 1`.
pub fn ellipk(k: f64) -> f64 {
    complete(k).0
}

/// Complete elliptic integral of the second kind, `E(k)`, for `0 <= k <= 1`.
pub fn ellipe(k: f64) -> f64 {
    if (k.abs() - 1.0).abs() == 0.0 {
        return 1.0;
    }
    complete(k).1
}

fn complete(k: f64) -> (f64, f64) {
    let mut a = 1.0f64;
    let mut b = (1.0 - k * k).sqrt();
    let mut c = k;
    let mut pow2 = 0.5;
    let mut sum = pow2 * c * c;
    for _ in 0..MAX_ITER {
        if c.abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        pow2 *= 2.0;
        sum += pow2 * c * c;
    }
    let kk = FRAC_PI_2 / a;
    (kk, kk * (1.0 - sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_modulus() {
        assert!((ellipk(0.0) - FRAC_PI_2).abs() < 1e-15);
        assert!((ellipe(0.0) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn tabulated_values() {
        // m = k² = 0.5
        let k = 0.5f64.sqrt();
        assert!((ellipk(k) - 1.854_074_677_301_372).abs() < 1e-14);
        assert!((ellipe(k) - 1.350_643_881_047_675_5).abs() < 1e-14);
        // m = 0.9
        let k = 0.9f64.sqrt();
        assert!((ellipk(k) - 2.578_092_113_348_173).abs() < 1e-13);
        assert!((ellipe(k) - 1.104_774_732_704_073).abs() < 1e-13);
    }

    #[test]
    fn legendre_relation() {
        // E K' + E' K − K K' = π/2
        for &k in &[0.1, 0.4, 0.7, 0.95] {
            let kp = (1.0f64 - k * k).sqrt();
            let lhs = ellipe(k) * ellipk(kp) + ellipe(kp) * ellipk(k) - ellipk(k) * ellipk(kp);
            assert!((lhs - PI / 2.0).abs() < 1e-13, "k = {k}: {lhs}");
        }
    }

    #[test]
    fn logarithmic_growth_near_one() {
        // K(k) ≈ ln(4 / k') as k → 1
        let kp = 1e-4f64;
        let k = (1.0 - kp * kp).sqrt();
        assert!((ellipk(k) - (4.0 / kp).ln()).abs() < 1e-6);
    }
}
