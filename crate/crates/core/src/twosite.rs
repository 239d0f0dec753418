//! Two-spin reduced states: assembly, Bell-basis decomposition, maximal CHSH
//! value and concurrence.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::contraction::ContractionTable;
use crate::density::{DensityMatrix, Pauli, C64};
use crate::error::{Error, Result};
use crate::optimize::{
    dot, nelder_mead, normalize, random_sphere_angles, seeded_rng, unit_vector, NelderMeadOptions,
};
use crate::params::ModelParams;
use crate::wick::contraction_determinant;

/// Slack allowed on `|T| <= 1` for correlators coming out of quadrature.
const COMPONENT_SLACK: f64 = 1e-9;

/// Correlators `⟨σ^u_0 σ^v_R⟩` of an XY two-spin state, plus the on-site
/// magnetization `sz = ⟨σ^z⟩` needed to reproduce the full matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoSiteTensor {
    pub r: usize,
    pub txx: f64,
    pub tyy: f64,
    pub tzz: f64,
    /// `⟨σ^x σ^y⟩ = ⟨σ^y σ^x⟩`.
    pub txy: f64,
    #[serde(default)]
    pub sz: f64,
}

impl TwoSiteTensor {
    pub fn new(r: usize, txx: f64, tyy: f64, tzz: f64, txy: f64) -> Result<Self> {
        let t = TwoSiteTensor {
            r,
            txx,
            tyy,
            tzz,
            txy,
            sz: 0.0,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn with_sz(self, sz: f64) -> Result<Self> {
        let t = TwoSiteTensor { sz, ..self };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::InvalidParameter("separation R must be >= 1".into()));
        }
        for (name, v) in [
            ("txx", self.txx),
            ("tyy", self.tyy),
            ("tzz", self.tzz),
            ("txy", self.txy),
            ("sz", self.sz),
        ] {
            if !(v.abs() <= 1.0 + COMPONENT_SLACK) {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside [-1, 1]")));
            }
        }
        Ok(())
    }

    /// The 3×3 correlation matrix `T_{uv}`.
    pub fn correlation_matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.txx, self.txy, 0.0],
            [self.txy, self.tyy, 0.0],
            [0.0, 0.0, self.tzz],
        ]
    }
}

/// Two-site tensor at separation `r`.
pub fn two_site_tensor(r: usize, params: &ModelParams) -> Result<TwoSiteTensor> {
    if r == 0 {
        return Err(Error::InvalidParameter("separation R must be >= 1".into()));
    }
    if r > 1 && !params.equilibrium() {
        return Err(Error::UnsupportedConfiguration(format!(
            "R = {r} with a quench: only nearest neighbours are available out of equilibrium"
        )));
    }
    let table = ContractionTable::new(params, r)?;
    two_site_tensor_from_table(r, &table)
}

/// Same as [`two_site_tensor`] with contractions taken from `table`
/// (which must reach `r`).
pub fn two_site_tensor_from_table(r: usize, table: &ContractionTable) -> Result<TwoSiteTensor> {
    if r == 0 || r > table.rmax() {
        return Err(Error::InvalidParameter(format!(
            "R = {r} outside the contraction table (radius {})",
            table.rmax()
        )));
    }
    let g = |k: i64| table.g(k);
    let ri = r as i64;
    let t = if r == 1 {
        TwoSiteTensor {
            r,
            txx: g(-1),
            tyy: g(1),
            tzz: g(0) * g(0) - g(1) * g(-1) - table.s(1) * table.s(-1),
            txy: -table.s(1),
            sz: g(0),
        }
    } else {
        if !table.params.equilibrium() {
            return Err(Error::UnsupportedConfiguration(format!(
                "R = {r} with a quench: only nearest neighbours are available out of equilibrium"
            )));
        }
        let lower: Vec<i64> = (0..ri).collect();
        let upper: Vec<i64> = (1..=ri).collect();
        TwoSiteTensor {
            r,
            txx: contraction_determinant(&lower, &upper, g),
            tyy: contraction_determinant(&upper, &lower, g),
            tzz: g(0) * g(0) - g(ri) * g(-ri),
            txy: 0.0,
            sz: g(0),
        }
    };
    t.validate()?;
    Ok(t)
}

/// `ρ = ¼[𝕀 + sz(σz⊗𝕀 + 𝕀⊗σz) + Σ T_uv σu⊗σv]`.
pub fn assemble_two_site(t: &TwoSiteTensor) -> Result<DensityMatrix> {
    t.validate()?;
    use Pauli::*;
    let terms: [(&[Pauli], f64); 7] = [
        (&[X, X], t.txx),
        (&[Y, Y], t.tyy),
        (&[Z, Z], t.tzz),
        (&[X, Y], t.txy),
        (&[Y, X], t.txy),
        (&[Z, I], t.sz),
        (&[I, Z], t.sz),
    ];
    DensityMatrix::from_correlations(2, terms)
}

/// Bell basis `Φ⁺, Φ⁻, Ψ⁺, Ψ⁻` as columns.
pub fn bell_basis() -> DMatrix<C64> {
    let s = 1.0 / SQRT_2;
    #[rustfmt::skip]
    let cols = [
        s, 0.0, 0.0, s,
        s, 0.0, 0.0, -s,
        0.0, s, s, 0.0,
        0.0, s, -s, 0.0,
    ];
    DMatrix::from_column_slice(4, 4, &cols).map(|v| C64::new(v, 0.0))
}

/// Entries of ρ in the Bell basis that enter `Tr(ρ B_CHSH)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellDecomposition {
    pub diag: [f64; 4],
    pub i12: f64,
    pub i13: f64,
    pub i24: f64,
    pub i34: f64,
    pub r14: f64,
    pub r23: f64,
}

impl BellDecomposition {
    /// The part ρ_∥ of the state, written in the Bell basis.
    pub fn parallel_part(&self) -> DMatrix<C64> {
        let mut m = DMatrix::<C64>::zeros(4, 4);
        for k in 0..4 {
            m[(k, k)] = C64::new(self.diag[k], 0.0);
        }
        let mut put = |i: usize, j: usize, z: C64| {
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        };
        put(0, 1, C64::new(0.0, self.i12));
        put(0, 2, C64::new(0.0, self.i13));
        put(1, 3, C64::new(0.0, self.i24));
        put(2, 3, C64::new(0.0, self.i34));
        put(0, 3, C64::new(self.r14, 0.0));
        put(1, 2, C64::new(self.r23, 0.0));
        m
    }

    /// Bell-diagonal weights in decreasing order.
    pub fn sorted_diag(&self) -> [f64; 4] {
        let mut d = self.diag;
        d.sort_by(|a, b| b.total_cmp(a));
        d
    }
}

pub fn bell_decompose(rho: &DensityMatrix) -> Result<BellDecomposition> {
    if rho.dim() != 4 {
        return Err(Error::InvalidParameter(format!(
            "Bell decomposition needs a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let u = bell_basis();
    let b = u.adjoint() * rho.matrix() * &u;
    Ok(BellDecomposition {
        diag: [b[(0, 0)].re, b[(1, 1)].re, b[(2, 2)].re, b[(3, 3)].re],
        i12: b[(0, 1)].im,
        i13: b[(0, 2)].im,
        i24: b[(1, 3)].im,
        i34: b[(2, 3)].im,
        r14: b[(0, 3)].re,
        r23: b[(1, 2)].re,
    })
}

/// Maximal `Tr(ρ B_CHSH)` over all measurement directions:
/// `2√(μ₁ + μ₂)` with `μ₁ ≥ μ₂` the two largest eigenvalues of `TᵀT`.
pub fn chsh_max(t: &TwoSiteTensor) -> f64 {
    // xy block [[txx, txy], [txy, tyy]] and the decoupled tzz
    let mean = 0.5 * (t.txx + t.tyy);
    let rad = (0.25 * (t.txx - t.tyy).powi(2) + t.txy * t.txy).sqrt();
    let mut mu = [(mean + rad).powi(2), (mean - rad).powi(2), t.tzz * t.tzz];
    mu.sort_by(|a, b| b.total_cmp(a));
    2.0 * (mu[0] + mu[1]).sqrt()
}

/// `2√2 √((ρ₁₁−ρ₄₄)² + (ρ₂₂−ρ₃₃)² + 4(ρᴵ₁₂)²)` with the Bell diagonal sorted
/// in decreasing order. Equal to [`chsh_max`] whenever `txy = 0` or `tzz²`
/// is the smallest squared principal correlation.
pub fn chsh_max_bell_form(d: &BellDecomposition) -> f64 {
    let p = d.sorted_diag();
    2.0 * SQRT_2 * ((p[0] - p[3]).powi(2) + (p[1] - p[2]).powi(2) + 4.0 * d.i12 * d.i12).sqrt()
}

/// Measurement directions achieving a CHSH value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshOptimum {
    pub value: f64,
    pub a1: [f64; 3],
    pub a2: [f64; 3],
    pub b1: [f64; 3],
    pub b2: [f64; 3],
}

pub const CHSH_STARTS: usize = 64;
const CHSH_SEED: u64 = 0xC45A;

fn apply(t: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [dot(t[0], v), dot(t[1], v), dot(t[2], v)]
}

fn apply_t(t: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    let col = |k: usize| [t[0][k], t[1][k], t[2][k]];
    [dot(col(0), v), dot(col(1), v), dot(col(2), v)]
}

fn add(a: [f64; 3], b: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

fn chsh_value(t: &[[f64; 3]; 3], a1: [f64; 3], a2: [f64; 3], b1: [f64; 3], b2: [f64; 3]) -> f64 {
    dot(a1, apply(t, add(b1, b2, 1.0))) + dot(a2, apply(t, add(b1, b2, -1.0)))
}

/// Block-coordinate ascent: each direction in turn is set to its optimal
/// value given the other three.
fn polish(t: &[[f64; 3]; 3], mut o: ChshOptimum) -> ChshOptimum {
    for _ in 0..500 {
        let before = o.value;
        if let Some(v) = normalize(apply(t, add(o.b1, o.b2, 1.0))) {
            o.a1 = v;
        }
        if let Some(v) = normalize(apply(t, add(o.b1, o.b2, -1.0))) {
            o.a2 = v;
        }
        if let Some(v) = normalize(apply_t(t, add(o.a1, o.a2, 1.0))) {
            o.b1 = v;
        }
        if let Some(v) = normalize(apply_t(t, add(o.a1, o.a2, -1.0))) {
            o.b2 = v;
        }
        o.value = chsh_value(t, o.a1, o.a2, o.b1, o.b2);
        if (o.value - before).abs() <= 1e-15 * o.value.abs().max(1.0) {
            break;
        }
    }
    o
}

/// Numerical maximization of `Tr(ρ B_CHSH)` with
/// `B_CHSH = a₁σ⊗(b₁+b₂)σ + a₂σ⊗(b₁−b₂)σ`.
pub fn chsh_optimize(rho: &DensityMatrix) -> Result<ChshOptimum> {
    if rho.dim() != 4 {
        return Err(Error::InvalidParameter(format!(
            "CHSH needs a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let mut t = [[0.0; 3]; 3];
    for (i, &u) in Pauli::XYZ.iter().enumerate() {
        for (j, &v) in Pauli::XYZ.iter().enumerate() {
            t[i][j] = rho.expectation(&[u, v]);
        }
    }
    let vectors = |x: &[f64]| {
        [
            unit_vector(x[0], x[1]),
            unit_vector(x[2], x[3]),
            unit_vector(x[4], x[5]),
            unit_vector(x[6], x[7]),
        ]
    };
    let objective = |x: &[f64]| {
        let [a1, a2, b1, b2] = vectors(x);
        -chsh_value(&t, a1, a2, b1, b2)
    };
    let opts = NelderMeadOptions {
        ftol: 1e-12,
        xtol: 1e-8,
        max_evals: 3000,
        ..Default::default()
    };
    let mut rng = seeded_rng(CHSH_SEED);
    let mut best: Option<ChshOptimum> = None;
    let mut converged = 0;
    for _ in 0..CHSH_STARTS {
        let mut x0 = [0.0; 8];
        for k in 0..4 {
            let (th, ph) = random_sphere_angles(&mut rng);
            x0[2 * k] = th;
            x0[2 * k + 1] = ph;
        }
        let local = nelder_mead(objective, &x0, &opts);
        if local.converged {
            converged += 1;
        }
        let [a1, a2, b1, b2] = vectors(&local.x);
        let candidate = polish(
            &t,
            ChshOptimum {
                value: -local.value,
                a1,
                a2,
                b1,
                b2,
            },
        );
        if best.map_or(true, |b| candidate.value > b.value) {
            best = Some(candidate);
        }
    }
    if converged == 0 {
        return Err(Error::OptimizerStall { starts: CHSH_STARTS });
    }
    Ok(best.expect("at least one start"))
}

/// Best CHSH value found by [`chsh_optimize`].
pub fn chsh_max_bruteforce(rho: &DensityMatrix) -> Result<f64> {
    chsh_optimize(rho).map(|o| o.value)
}

/// Wootters concurrence `max(0, λ₁−λ₂−λ₃−λ₄)`, `λᵢ` the decreasing square
/// roots of the eigenvalues of `√ρ ρ̃ √ρ`, `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::InvalidParameter(format!(
            "concurrence needs a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    let yy = crate::density::pauli_string(&[Pauli::Y, Pauli::Y]);
    let tilde = &yy * m.map(|z| z.conj()) * &yy;
    let eig = m.clone().symmetric_eigen();
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0)));
    let sqrt_rho = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.adjoint();
    let prod = &sqrt_rho * tilde * &sqrt_rho;
    let prod = (&prod + prod.adjoint()) * C64::new(0.5, 0.0);
    let mut l: Vec<f64> = prod
        .symmetric_eigenvalues()
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}
