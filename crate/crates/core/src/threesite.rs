//! Three-spin correlators, reduced states and the Mermin nonlocality measure.
//!
//! Sites sit at `0`, `a` and `a + b`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::contraction::{magnetization, ContractionTable};
use crate::density::{DensityMatrix, Pauli};
use crate::error::{Error, Result};
use crate::optimize::{
    angles_of, nelder_mead, normalize, random_sphere_angles, seeded_rng, unit_vector, LocalMinimum,
    NelderMeadOptions,
};
use crate::params::ModelParams;
use crate::wick::{contraction_determinant, wick_expectation_with};

const COMPONENT_SLACK: f64 = 1e-9;

/// The four correlators that enter the Mermin operator for real (x–z plane)
/// settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeSiteTensor {
    pub a: usize,
    pub b: usize,
    pub txxz: f64,
    pub txzx: f64,
    pub tzxx: f64,
    pub tzzz: f64,
}

impl ThreeSiteTensor {
    pub fn new(a: usize, b: usize, txxz: f64, txzx: f64, tzxx: f64, tzzz: f64) -> Result<Self> {
        let t = ThreeSiteTensor {
            a,
            b,
            txxz,
            txzx,
            tzxx,
            tzzz,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a == 0 || self.b == 0 {
            return Err(Error::InvalidParameter("separations a, b must be >= 1".into()));
        }
        for (name, v) in [
            ("txxz", self.txxz),
            ("txzx", self.txzx),
            ("tzxx", self.tzxx),
            ("tzzz", self.tzzz),
        ] {
            if !(v.abs() <= 1.0 + COMPONENT_SLACK) {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside [-1, 1]")));
            }
        }
        Ok(())
    }

    /// Reads the four components out of a full correlator set.
    pub fn from_correlators(set: &CorrelatorSet) -> Result<Self> {
        use Pauli::*;
        ThreeSiteTensor::new(
            set.a,
            set.b,
            set.get(X, X, Z),
            set.get(X, Z, X),
            set.get(Z, X, X),
            set.get(Z, Z, Z),
        )
    }
}

fn det_xxz(a: i64, b: i64, g: &impl Fn(i64) -> f64) -> f64 {
    let mut rows: Vec<i64> = (0..a).collect();
    let mut cols: Vec<i64> = (1..=a).collect();
    rows.push(a + b);
    cols.push(a + b);
    contraction_determinant(&rows, &cols, g)
}

fn det_xzx(a: i64, b: i64, g: &impl Fn(i64) -> f64) -> f64 {
    let rows: Vec<i64> = (0..a + b).filter(|&p| p != a).collect();
    let cols: Vec<i64> = (1..=a + b).filter(|&q| q != a).collect();
    -contraction_determinant(&rows, &cols, g)
}

fn det_zzz(a: i64, b: i64, g: &impl Fn(i64) -> f64) -> f64 {
    let idx = [0, a, a + b];
    contraction_determinant(&idx, &idx, g)
}

/// Mermin-relevant three-site correlators in the equilibrium state.
pub fn three_site_tensor(a: usize, b: usize, params: &ModelParams) -> Result<ThreeSiteTensor> {
    params.require_equilibrium("three-site correlators")?;
    let table = ContractionTable::new(params, a + b)?;
    three_site_tensor_from_table(a, b, &table)
}

/// As [`three_site_tensor`], reusing a contraction table of radius `>= a + b`.
pub fn three_site_tensor_from_table(a: usize, b: usize, table: &ContractionTable) -> Result<ThreeSiteTensor> {
    table.params.require_equilibrium("three-site correlators")?;
    if a == 0 || b == 0 {
        return Err(Error::InvalidParameter("separations a, b must be >= 1".into()));
    }
    if a + b > table.rmax() {
        return Err(Error::InvalidParameter(format!(
            "configuration ({a}, {b}) needs contractions up to {} but the table reaches {}",
            a + b,
            table.rmax()
        )));
    }
    let g = |r: i64| table.g(r);
    let (ai, bi) = (a as i64, b as i64);
    ThreeSiteTensor::new(
        a,
        b,
        det_xxz(ai, bi, &g),
        det_xzx(ai, bi, &g),
        det_xxz(bi, ai, &g),
        det_zzz(ai, bi, &g),
    )
}

/// All 64 expectations `⟨σ^u_0 σ^v_a σ^w_{a+b}⟩`, `u, v, w ∈ {I, X, Y, Z}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    pub a: usize,
    pub b: usize,
    values: Vec<f64>,
}

impl CorrelatorSet {
    pub fn from_fn<F: FnMut(Pauli, Pauli, Pauli) -> f64>(a: usize, b: usize, mut f: F) -> Self {
        let mut values = Vec::with_capacity(64);
        for u in Pauli::ALL {
            for v in Pauli::ALL {
                for w in Pauli::ALL {
                    values.push(if (u, v, w) == (Pauli::I, Pauli::I, Pauli::I) {
                        1.0
                    } else {
                        f(u, v, w)
                    });
                }
            }
        }
        CorrelatorSet { a, b, values }
    }

    pub fn get(&self, u: Pauli, v: Pauli, w: Pauli) -> f64 {
        self.values[16 * u as usize + 4 * v as usize + w as usize]
    }

    fn set(&mut self, u: Pauli, v: Pauli, w: Pauli, x: f64) {
        self.values[16 * u as usize + 4 * v as usize + w as usize] = x;
    }
}

/// Every three-site correlator by Wick contraction of the equilibrium
/// state.
pub fn correlator_set(a: usize, b: usize, params: &ModelParams) -> Result<CorrelatorSet> {
    params.require_equilibrium("three-site correlators")?;
    let table = ContractionTable::new(params, a + b)?;
    correlator_set_from_table(a, b, &table)
}

pub fn correlator_set_from_table(a: usize, b: usize, table: &ContractionTable) -> Result<CorrelatorSet> {
    table.params.require_equilibrium("three-site correlators")?;
    if a == 0 || b == 0 || a + b > table.rmax() {
        return Err(Error::InvalidParameter(format!(
            "configuration ({a}, {b}) does not fit a table of radius {}",
            table.rmax()
        )));
    }
    let sites = [0i64, a as i64, (a + b) as i64];
    let mut err = None;
    let set = CorrelatorSet::from_fn(a, b, |u, v, w| {
        let ops = [(sites[0], u), (sites[1], v), (sites[2], w)];
        wick_expectation_with(&ops, |r| table.g(r)).unwrap_or_else(|e| {
            err = Some(e);
            f64::NAN
        })
    });
    match err {
        Some(e) => Err(e),
        None => Ok(set),
    }
}

/// `ρ = ⅛[𝕀 + Σ T_uvw σu⊗σv⊗σw]` with the Mermin-relevant entries taken
/// from `tensor` and every other entry from `set`.
pub fn assemble_three_site(tensor: &ThreeSiteTensor, set: &CorrelatorSet) -> Result<DensityMatrix> {
    tensor.validate()?;
    if (tensor.a, tensor.b) != (set.a, set.b) {
        return Err(Error::InvalidParameter(format!(
            "tensor configuration ({}, {}) does not match correlator set ({}, {})",
            tensor.a, tensor.b, set.a, set.b
        )));
    }
    use Pauli::*;
    let mut full = set.clone();
    full.set(X, X, Z, tensor.txxz);
    full.set(X, Z, X, tensor.txzx);
    full.set(Z, X, X, tensor.tzxx);
    full.set(Z, Z, Z, tensor.tzzz);
    let mut strings = Vec::with_capacity(63);
    for u in Pauli::ALL {
        for v in Pauli::ALL {
            for w in Pauli::ALL {
                if (u, v, w) != (I, I, I) {
                    strings.push(([u, v, w], full.get(u, v, w)));
                }
            }
        }
    }
    DensityMatrix::from_correlations(3, strings.iter().map(|(s, x)| (&s[..], *x)))
}

/// Twelve angles `(θ, φ)` for `a₁, a₂, a₃, b₁, b₂, b₃` in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MerminSettings {
    pub angles: [f64; 12],
}

impl MerminSettings {
    pub fn from_vectors(v: [[f64; 3]; 6]) -> Self {
        let mut angles = [0.0; 12];
        for (k, vk) in v.iter().enumerate() {
            let (t, p) = angles_of(*vk);
            angles[2 * k] = t;
            angles[2 * k + 1] = p;
        }
        MerminSettings { angles }
    }

    /// `[a₁, a₂, a₃, b₁, b₂, b₃]`.
    pub fn vectors(&self) -> [[f64; 3]; 6] {
        vectors_of(&self.angles)
    }
}

fn vectors_of(x: &[f64]) -> [[f64; 3]; 6] {
    std::array::from_fn(|k| unit_vector(x[2 * k], x[2 * k + 1]))
}

/// Anything with three-spin correlations `⟨(u·σ)⊗(v·σ)⊗(w·σ)⟩`.
pub trait MerminObservable {
    fn correlation(&self, u: [f64; 3], v: [f64; 3], w: [f64; 3]) -> f64;

    /// Gradient of [`correlation`](Self::correlation) with respect to the
    /// vector in position `slot`, the other two being `p` and `q` in order.
    fn partial(&self, slot: usize, p: [f64; 3], q: [f64; 3]) -> [f64; 3];
}

impl MerminObservable for ThreeSiteTensor {
    fn correlation(&self, u: [f64; 3], v: [f64; 3], w: [f64; 3]) -> f64 {
        self.tzzz * u[2] * v[2] * w[2]
            + self.txxz * u[0] * v[0] * w[2]
            + self.txzx * u[0] * v[2] * w[0]
            + self.tzxx * u[2] * v[0] * w[0]
    }

    fn partial(&self, slot: usize, p: [f64; 3], q: [f64; 3]) -> [f64; 3] {
        // Each slot sees T_{s,·,·} contracted with the other two vectors.
        let (zz, xz, zx, xx) = (p[2] * q[2], p[0] * q[2], p[2] * q[0], p[0] * q[0]);
        match slot {
            0 => [self.txxz * xz + self.txzx * zx, 0.0, self.tzzz * zz + self.tzxx * xx],
            1 => [self.txxz * xz + self.tzxx * zx, 0.0, self.tzzz * zz + self.txzx * xx],
            _ => [self.txzx * xz + self.tzxx * zx, 0.0, self.tzzz * zz + self.txxz * xx],
        }
    }
}

/// `C_ijk = ⟨σ_i σ_j σ_k⟩` for `i, j, k ∈ {x, y, z}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCube(pub [[[f64; 3]; 3]; 3]);

impl CorrelationCube {
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 8 {
            return Err(Error::InvalidParameter(format!(
                "three-qubit state expected, got dimension {}",
                rho.dim()
            )));
        }
        let mut c = [[[0.0; 3]; 3]; 3];
        for (i, &u) in Pauli::XYZ.iter().enumerate() {
            for (j, &v) in Pauli::XYZ.iter().enumerate() {
                for (k, &w) in Pauli::XYZ.iter().enumerate() {
                    c[i][j][k] = rho.expectation(&[u, v, w]);
                }
            }
        }
        Ok(CorrelationCube(c))
    }
}

impl MerminObservable for CorrelationCube {
    fn correlation(&self, u: [f64; 3], v: [f64; 3], w: [f64; 3]) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    s += self.0[i][j][k] * u[i] * v[j] * w[k];
                }
            }
        }
        s
    }

    fn partial(&self, slot: usize, p: [f64; 3], q: [f64; 3]) -> [f64; 3] {
        let mut g = [0.0; 3];
        for (s, gs) in g.iter_mut().enumerate() {
            for j in 0..3 {
                for k in 0..3 {
                    let c = match slot {
                        0 => self.0[s][j][k],
                        1 => self.0[j][s][k],
                        _ => self.0[j][k][s],
                    };
                    *gs += c * p[j] * q[k];
                }
            }
        }
        g
    }
}

fn mermin_value<O: MerminObservable + ?Sized>(o: &O, v: &[[f64; 3]; 6]) -> f64 {
    let [a1, a2, a3, b1, b2, b3] = *v;
    o.correlation(a1, a2, a3) - o.correlation(a1, b2, b3) - o.correlation(b1, a2, b3) - o.correlation(b1, b2, a3)
}

/// `Tr(ρ B_Mermin)` with
/// `B_Mermin = B_{a₁a₂a₃} − B_{a₁b₂b₃} − B_{b₁a₂b₃} − B_{b₁b₂a₃}`.
pub fn mermin_expectation<O: MerminObservable + ?Sized>(o: &O, s: &MerminSettings) -> f64 {
    mermin_value(o, &s.vectors())
}

/// Full-matrix variant of [`mermin_expectation`].
pub fn mermin_expectation_density(rho: &DensityMatrix, s: &MerminSettings) -> Result<f64> {
    Ok(mermin_expectation(&CorrelationCube::from_density(rho)?, s))
}

/// Gradient of the Mermin value with respect to setting `k` of
/// `[a₁, a₂, a₃, b₁, b₂, b₃]`.
fn mermin_gradient<O: MerminObservable + ?Sized>(o: &O, v: &[[f64; 3]; 6], k: usize) -> [f64; 3] {
    let [a1, a2, a3, b1, b2, b3] = *v;
    let sub = |x: [f64; 3], y: [f64; 3]| [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    let neg_sum = |x: [f64; 3], y: [f64; 3]| [-x[0] - y[0], -x[1] - y[1], -x[2] - y[2]];
    match k {
        0 => sub(o.partial(0, a2, a3), o.partial(0, b2, b3)),
        1 => sub(o.partial(1, a1, a3), o.partial(1, b1, b3)),
        2 => sub(o.partial(2, a1, a2), o.partial(2, b1, b2)),
        3 => neg_sum(o.partial(0, a2, b3), o.partial(0, b2, a3)),
        4 => neg_sum(o.partial(1, a1, b3), o.partial(1, b1, a3)),
        _ => neg_sum(o.partial(2, a1, b2), o.partial(2, b1, a2)),
    }
}

const POLISH_SWEEPS: usize = 20_000;

/// Block-coordinate ascent. The Mermin value is linear in each setting, so
/// each step replaces one vector by its normalized gradient. Returns the
/// polished vectors, value and whether a fixed point was reached.
fn polish<O: MerminObservable + ?Sized>(o: &O, mut v: [[f64; 3]; 6]) -> ([[f64; 3]; 6], f64, bool) {
    let mut value = mermin_value(o, &v);
    for _ in 0..POLISH_SWEEPS {
        let before = value;
        for k in 0..6 {
            if let Some(g) = normalize(mermin_gradient(o, &v, k)) {
                v[k] = g;
            }
        }
        value = mermin_value(o, &v);
        if (value - before).abs() <= 4.0 * f64::EPSILON * value.abs().max(1.0) {
            return (v, value, true);
        }
    }
    (v, value, false)
}

pub const MERMIN_RANDOM_STARTS: usize = 128;
pub const MERMIN_PLANAR_STARTS: usize = 16;
const MERMIN_SEED: u64 = 0x3E41;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MerminOptimum {
    pub value: f64,
    pub settings: MerminSettings,
    /// Starts whose local search converged.
    pub converged_starts: usize,
}

/// Multi-start maximization of the Mermin value over all twelve angles:
/// random starts on the sphere plus starts confined to the x–z plane, each
/// refined by Nelder–Mead and then by exact coordinate ascent.
pub fn mermin_optimize<O: MerminObservable + ?Sized>(o: &O) -> Result<MerminOptimum> {
    let objective = |x: &[f64]| -mermin_value(o, &vectors_of(x));
    let opts = NelderMeadOptions {
        initial_step: 0.4,
        ftol: 1e-9,
        xtol: 1e-6,
        max_evals: 1500,
    };
    let mut rng = seeded_rng(MERMIN_SEED);
    let total = MERMIN_RANDOM_STARTS + MERMIN_PLANAR_STARTS;
    let mut best: Option<([[f64; 3]; 6], f64)> = None;
    let mut converged = 0;
    for start in 0..total {
        let mut x0 = [0.0; 12];
        for k in 0..6 {
            let (th, ph) = if start < MERMIN_RANDOM_STARTS {
                random_sphere_angles(&mut rng)
            } else {
                use rand::Rng;
                (rng.gen_range(0.0..TAU), 0.0)
            };
            x0[2 * k] = th;
            x0[2 * k + 1] = ph;
        }
        let LocalMinimum {
            x, converged: nm_ok, ..
        } = nelder_mead(objective, &x0, &opts);
        let (v, value, fixed) = polish(o, vectors_of(&x));
        if nm_ok || fixed {
            converged += 1;
        }
        if best.map_or(true, |(_, b)| value > b) {
            best = Some((v, value));
        }
    }
    if converged == 0 {
        return Err(Error::OptimizerStall { starts: total });
    }
    let (v, value) = best.expect("at least one start");
    Ok(MerminOptimum {
        value,
        settings: MerminSettings::from_vectors(v),
        converged_starts: converged,
    })
}

/// `max Tr(ρ B_Mermin)` for an XY three-site tensor.
pub fn mermin_max(t: &ThreeSiteTensor) -> Result<f64> {
    t.validate()?;
    mermin_optimize(t).map(|o| o.value)
}

/// The two-angle reduction for `a = b = 1`, with settings restricted to
/// `a₃ = −a₁, b₁ = a₂, b₂ = −a₁, b₃ = −a₂` in the x–z plane:
/// `z₂(z₂² − 3z₁²) T_zzz + (z₂(x₂² − x₁²) − 2 z₁x₁x₂)(T_zxx + T_xzx + T_xxz)`.
pub fn mermin_block11_objective(t: &ThreeSiteTensor, theta1: f64, theta2: f64) -> f64 {
    let (x1, z1) = theta1.sin_cos();
    let (x2, z2) = theta2.sin_cos();
    z2 * (z2 * z2 - 3.0 * z1 * z1) * t.tzzz + (z2 * (x2 * x2 - x1 * x1) - 2.0 * z1 * x1 * x2) * (t.tzxx + t.txzx + t.txxz)
}

const BLOCK11_GRID: usize = 256;

/// Maximum of [`mermin_block11_objective`] by a dense grid followed by local
/// refinement of the best cells.
pub fn mermin_max_block11(t: &ThreeSiteTensor) -> Result<f64> {
    t.validate()?;
    if (t.a, t.b) != (1, 1) {
        return Err(Error::UnsupportedConfiguration(format!(
            "two-angle reduction holds for a = b = 1, got ({}, {})",
            t.a, t.b
        )));
    }
    let step = TAU / BLOCK11_GRID as f64;
    let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity(BLOCK11_GRID * BLOCK11_GRID);
    for i in 0..BLOCK11_GRID {
        for j in 0..BLOCK11_GRID {
            let (t1, t2) = (i as f64 * step, j as f64 * step);
            cells.push((mermin_block11_objective(t, t1, t2), t1, t2));
        }
    }
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let opts = NelderMeadOptions {
        initial_step: step,
        ftol: 1e-15,
        xtol: 1e-10,
        max_evals: 2000,
    };
    let mut best = f64::NEG_INFINITY;
    for &(_, t1, t2) in cells.iter().take(8) {
        let r = nelder_mead(|x| -mermin_block11_objective(t, x[0], x[1]), &[t1, t2], &opts);
        best = best.max(-r.value);
    }
    Ok(best)
}

/// Closed-form maximum over `θ` of
/// `2cos²θ T_zzz + 2sinθcosθ (T_zxx + T_xxz) − 2sin²θ T_xzx`.
pub fn mermin_lower_bound(t: &ThreeSiteTensor) -> f64 {
    let (a, b, c) = (t.tzzz, t.txzx, t.txxz + t.tzxx);
    (a - b) + ((a + b).powi(2) + c * c).sqrt()
}

/// `2√(T_zzz² + T_zxx² + T_xzx² + T_xxz²)`.
pub fn mermin_upper_bound(t: &ThreeSiteTensor) -> f64 {
    2.0 * (t.tzzz.powi(2) + t.tzxx.powi(2) + t.txzx.powi(2) + t.txxz.powi(2)).sqrt()
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

/// Sum of single-site entropies of a three-site block, `3·H₂((1 + G₀)/2)`.
pub fn block_entropy(params: &ModelParams) -> Result<f64> {
    params.require_equilibrium("block entropy")?;
    let g0 = 2.0 * magnetization(params)?;
    Ok(block_entropy_from_g0(g0))
}

pub fn block_entropy_from_g0(g0: f64) -> f64 {
    3.0 * binary_entropy((0.5 * (1.0 + g0)).clamp(0.0, 1.0))
}

/// The settings `{a₃ = −a₁, b₁ = a₂, b₂ = −a₁, b₃ = −a₂}` for two x–z-plane
/// directions.
pub fn block11_settings(theta1: f64, theta2: f64) -> MerminSettings {
    let a1 = unit_vector(theta1, 0.0);
    let a2 = unit_vector(theta2, 0.0);
    let neg = |v: [f64; 3]| [-v[0], -v[1], -v[2]];
    MerminSettings::from_vectors([a1, a2, neg(a1), a2, neg(a1), neg(a2)])
}
