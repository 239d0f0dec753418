//! Lowest eigenpair of a real symmetric operator by restarted Lanczos with
//! full reorthogonalization.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::optimize::seeded_rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Converged when `‖A x − λ x‖ ≤ tolerance · max(1, |λ|)`.
    pub tolerance: f64,
    /// Krylov dimension per cycle.
    pub krylov: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tolerance: 1e-11,
            krylov: 120,
            max_restarts: 30,
            seed: 0x1A2C,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lowest eigenpair of the `dim`-dimensional operator `matvec(x, y): y = A x`.
pub fn lowest_eigenpair<F>(dim: usize, matvec: F, opts: &LanczosOptions) -> Result<Eigenpair>
where
    F: Fn(&[f64], &mut [f64]),
{
    if dim == 0 {
        return Err(Error::SolverFailure("empty operator".into()));
    }
    let mut rng = seeded_rng(opts.seed);
    let mut start: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut scratch = vec![0.0; dim];
    let mut last_residual = f64::INFINITY;

    for _ in 0..=opts.max_restarts {
        let s = norm(&start);
        start.iter_mut().for_each(|v| *v /= s);
        let m = opts.krylov.min(dim);
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);

        for j in 0..m {
            matvec(&basis[j], &mut scratch);
            let a = dot(&basis[j], &scratch);
            alpha.push(a);
            // Two passes of Gram–Schmidt against the whole basis.
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &scratch);
                    axpy(-c, v, &mut scratch);
                }
            }
            let b = norm(&scratch);
            if j + 1 == m || b <= 1e-14 * a.abs().max(1.0) {
                beta.push(b);
                break;
            }
            beta.push(b);
            basis.push(scratch.iter().map(|v| v / b).collect());
        }

        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imin, &value) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty tridiagonal");
        let coeffs = eig.eigenvectors.column(imin);
        let mut vector = vec![0.0; dim];
        for (c, v) in coeffs.iter().zip(&basis) {
            axpy(*c, v, &mut vector);
        }
        let nv = norm(&vector);
        vector.iter_mut().for_each(|v| *v /= nv);

        // True residual, not the Lanczos estimate.
        matvec(&vector, &mut scratch);
        axpy(-value, &vector, &mut scratch);
        let residual = norm(&scratch);
        last_residual = residual;
        if residual <= opts.tolerance * value.abs().max(1.0) {
            return Ok(Eigenpair {
                value,
                vector,
                residual,
            });
        }
        start = vector;
    }
    Err(Error::SolverFailure(format!(
        "Lanczos did not converge after {} restarts (residual {last_residual:e})",
        opts.max_restarts
    )))
}

/// Lowest eigenpair of a dense symmetric matrix.
pub fn lowest_eigenpair_dense(m: DMatrix<f64>) -> Result<Eigenpair> {
    if m.nrows() == 0 {
        return Err(Error::SolverFailure("empty operator".into()));
    }
    let eig = SymmetricEigen::new(m.clone());
    let (imin, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty matrix");
    let v = eig.eigenvectors.column(imin).into_owned();
    let residual = (&m * &v - &v * value).norm();
    Ok(Eigenpair {
        value,
        vector: v.iter().copied().collect(),
        residual,
    })
}
