//! Dense few-qubit density matrices and Pauli-string algebra.
//!
//! Basis ordering: qubit 0 is the most significant bit and `|0⟩` is the
//! `σ_z = +1` state.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Entrywise tolerance for hermiticity and unit trace.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Most negative eigenvalue accepted as numerical slack.
pub const POSITIVITY_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const XYZ: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> DMatrix<C64> {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let entries = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        DMatrix::from_row_slice(2, 2, &entries)
    }

    pub fn label(self) -> char {
        match self {
            Pauli::I => 'i',
            Pauli::X => 'x',
            Pauli::Y => 'y',
            Pauli::Z => 'z',
        }
    }

    /// Action on a computational basis bit: returns the flipped bit and the
    /// amplitude, `σ|b⟩ = amp |b'⟩`.
    #[inline]
    pub fn apply_bit(self, bit: u8) -> (u8, C64) {
        match (self, bit) {
            (Pauli::I, b) => (b, C64::new(1.0, 0.0)),
            (Pauli::X, b) => (b ^ 1, C64::new(1.0, 0.0)),
            (Pauli::Y, 0) => (1, C64::new(0.0, 1.0)),
            (Pauli::Y, _) => (0, C64::new(0.0, -1.0)),
            (Pauli::Z, 0) => (0, C64::new(1.0, 0.0)),
            (Pauli::Z, _) => (1, C64::new(-1.0, 0.0)),
        }
    }
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Tensor product `σ_{u_0} ⊗ σ_{u_1} ⊗ ...`.
pub fn pauli_string(ops: &[Pauli]) -> DMatrix<C64> {
    ops.iter()
        .fold(DMatrix::from_element(1, 1, C64::new(1.0, 0.0)), |acc, p| {
            kron(&acc, &p.matrix())
        })
}

/// Real unit vector dotted into the Pauli vector: `n·σ`.
pub fn spin_along(n: [f64; 3]) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(2, 2);
    for (p, c) in Pauli::XYZ.iter().zip(n) {
        m += p.matrix() * C64::new(c, 0.0);
    }
    m
}

/// Hermitian, unit-trace, positive semidefinite matrix on 1–3 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim || !matches!(dim, 2 | 4 | 8) {
            return Err(Error::InvalidParameter(format!(
                "density matrix must be 2x2, 4x4 or 8x8, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let asym = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "matrix is not Hermitian (deviation {asym:e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > HERMITIAN_TOLERANCE || tr.im.abs() > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidParameter(format!("trace is {tr}, expected 1")));
        }
        let rho = DensityMatrix { m };
        let min = rho.eigenvalues()[0];
        if min < -POSITIVITY_SLACK {
            return Err(Error::PositivityError { min_eigenvalue: min });
        }
        Ok(rho)
    }

    /// `ρ = 2^{-n} [ 𝕀 + Σ T_{u} σ_{u_0} ⊗ ... ⊗ σ_{u_{n-1}} ]` for the listed
    /// Pauli strings (identity string excluded).
    pub fn from_correlations<'a, I>(qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [Pauli], f64)>,
    {
        let dim = 1usize << qubits;
        let mut m = DMatrix::<C64>::identity(dim, dim);
        for (ops, value) in terms {
            if ops.len() != qubits {
                return Err(Error::InvalidParameter(format!(
                    "Pauli string of length {} on {qubits} qubits",
                    ops.len()
                )));
            }
            if value != 0.0 && ops.iter().any(|&p| p != Pauli::I) {
                m += pauli_string(ops) * C64::new(value, 0.0);
            }
        }
        m /= C64::new(dim as f64, 0.0);
        // Symmetrize away roundoff.
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        DensityMatrix::new(m)
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        DensityMatrix {
            m: DMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0),
        }
    }

    /// `|ψ⟩⟨ψ|` for a state vector (normalized here).
    pub fn pure(state: &DVector<C64>) -> Result<Self> {
        let norm = state.norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let psi = state / C64::new(norm, 0.0);
        DensityMatrix::new(&psi * psi.adjoint())
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// `Tr(ρ σ_{u_0} ⊗ ...)`.
    pub fn expectation(&self, ops: &[Pauli]) -> f64 {
        assert_eq!(ops.len(), self.qubits(), "Pauli string length mismatch");
        // Tr(ρ P) = Σ_b ⟨b|ρ P|b⟩ with P a signed permutation.
        let n = ops.len();
        let mut acc = C64::new(0.0, 0.0);
        for col in 0..self.dim() {
            let mut row = 0usize;
            let mut amp = C64::new(1.0, 0.0);
            for (q, op) in ops.iter().enumerate() {
                let shift = n - 1 - q;
                let bit = ((col >> shift) & 1) as u8;
                let (nb, a) = op.apply_bit(bit);
                amp *= a;
                row |= (nb as usize) << shift;
            }
            // (P)_{row,col} = amp, so Tr(ρP) = Σ ρ_{col,row} amp
            acc += self.m[(col, row)] * amp;
        }
        acc.re
    }

    /// Expectation of an arbitrary Hermitian operator.
    pub fn expectation_of(&self, op: &DMatrix<C64>) -> f64 {
        (&self.m * op).trace().re
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.m.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.m - &other.m).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Von Neumann entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.log2())
            .sum()
    }
}
