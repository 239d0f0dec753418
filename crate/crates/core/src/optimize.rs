//! Derivative-free local search (Nelder–Mead) and a multi-start driver.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex along each coordinate.
    pub initial_step: f64,
    /// Stop once the spread of objective values across the simplex is
    /// below this.
    pub ftol: f64,
    /// ... and the simplex diameter is below this.
    pub xtol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            initial_step: 0.5,
            ftol: 1e-9,
            xtol: 1e-7,
            max_evals: 4000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from `x0` with the standard reflection /
/// expansion / contraction / shrink moves.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &NelderMeadOptions) -> LocalMinimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evals = n + 1;

    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];
    let mut converged = false;

    loop {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let spread = values[worst] - values[best];
        let diameter = simplex
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.ftol && diameter <= opts.xtol {
            converged = true;
            break;
        }
        if evals >= opts.max_evals {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        // reflection
        for k in 0..n {
            trial[k] = centroid[k] + (centroid[k] - simplex[worst][k]);
        }
        let fr = f(&trial);
        evals += 1;

        if fr < values[best] {
            // expansion
            for k in 0..n {
                trial2[k] = centroid[k] + 2.0 * (centroid[k] - simplex[worst][k]);
            }
            let fe = f(&trial2);
            evals += 1;
            if fe < fr {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = fe;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second_worst] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = fr;
            continue;
        }

        // contraction, outside if the reflection helped at all
        let outside = fr < values[worst];
        for k in 0..n {
            trial2[k] = if outside {
                centroid[k] + 0.5 * (trial[k] - centroid[k])
            } else {
                centroid[k] + 0.5 * (simplex[worst][k] - centroid[k])
            };
        }
        let fc = f(&trial2);
        evals += 1;
        let reference = if outside { fr } else { values[worst] };
        if fc < reference {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = fc;
            continue;
        }

        // shrink toward the best vertex
        let anchor = simplex[best].clone();
        for &i in &order[1..] {
            for k in 0..n {
                simplex[i][k] = anchor[k] + 0.5 * (simplex[i][k] - anchor[k]);
            }
            values[i] = f(&simplex[i]);
            evals += 1;
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap();
    LocalMinimum {
        x: simplex[best].clone(),
        value: values[best],
        evals,
        converged,
    }
}

/// Deterministic generator for start points.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly distributed point on the unit sphere as `(θ, φ)`.
pub fn random_sphere_angles<R: Rng>(rng: &mut R) -> (f64, f64) {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (z.acos(), phi)
}

/// Unit vector from polar angle `theta` and azimuth `phi`.
#[inline]
pub fn unit_vector(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Spherical angles of a nonzero vector.
pub fn angles_of(v: [f64; 3]) -> (f64, f64) {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    ((v[2] / r).clamp(-1.0, 1.0).acos(), v[1].atan2(v[0]))
}

#[inline]
pub fn normalize(v: [f64; 3]) -> Option<[f64; 3]> {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if r > 0.0 {
        Some([v[0] / r, v[1] / r, v[2] / r])
    } else {
        None
    }
}

#[inline]
pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
