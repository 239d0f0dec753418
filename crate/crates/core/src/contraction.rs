//! Fermionic two-point contractions `G_R` and `S_R` of the XY chain.
//!
//! After the Jordan–Wigner mapping every spin correlator is a Pfaffian (in
//! equilibrium a determinant) of these contractions. They are given as
//! integrals over the Brillouin half-zone `φ ∈ [0, π]` of the dispersion
//!
//! ```text
//! Λ(h) = sqrt(γ² sin²φ + (h − cos φ)²)
//! ```
//!
//! For a quench `h0 → hf` the integrands pick up `cos(2Λ(hf)t)` and
//! `sin(2Λ(hf)t)` factors; the equilibrium case takes a separate, reduced
//! branch.

use std::f64::consts::PI;

use crate::elliptic::{ellipe, ellipk};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::quadrature::{integrate_many, QuadratureConfig};

/// Single-particle dispersion `Λ(h)` at momentum `phi`.
pub fn dispersion(h: f64, phi: f64, gamma: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    (gamma * gamma * s * s + (h - c) * (h - c)).sqrt()
}

/// A contraction at site offset `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction {
    pub r: i64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Equilibrium,
    Quench,
    /// Quench with the oscillating `cos(2Λt)` terms dropped: the `t → ∞`
    /// dephased limit.
    Stationary,
}

/// Momenta at which the integrands have a kink: zeros of Λ inside `(0, π)`.
/// These only occur in the isotropic case.
fn breakpoints(params: &ModelParams) -> Vec<f64> {
    let mut pts = Vec::new();
    if params.gamma == 0.0 {
        for h in [params.h0, params.hf] {
            if h > 0.0 && h < 1.0 {
                pts.push(h.acos());
            } else if h == 0.0 {
                pts.push(0.5 * PI);
            }
        }
    }
    pts
}

/// `G_R` integrand (without the `1/π`) for a single momentum.
#[inline]
fn g_integrand(params: &ModelParams, mode: Mode, phi: f64, r: i64) -> f64 {
    let gamma = params.gamma;
    let (s, c) = phi.sin_cos();
    let (sr, cr) = (r as f64 * phi).sin_cos();
    let lambda0 = dispersion(params.h0, phi, gamma);
    let w0 = params.beta.thermal_weight(lambda0);
    if w0 == 0.0 {
        return 0.0;
    }
    if mode == Mode::Equilibrium {
        let h = params.h0;
        return w0 * (gamma * s * sr - (c - h) * cr);
    }

    let (h0, hf) = (params.h0, params.hf);
    let lambdaf = dispersion(hf, phi, gamma);
    let lf2 = lambdaf * lambdaf;
    if lf2 == 0.0 {
        return 0.0;
    }
    let osc = match mode {
        Mode::Quench => (2.0 * lambdaf * params.t).cos(),
        _ => 0.0,
    };
    let g2s2 = gamma * gamma * s * s;
    let common = g2s2 + (h0 - c) * (hf - c);
    let first = gamma * s * sr * (common - (h0 - hf) * (hf - c) * osc);
    let second = cr * (common * (c - hf) - (h0 - hf) * g2s2 * osc);
    w0 * (first - second) / lf2
}

#[inline]
fn s_integrand(params: &ModelParams, phi: f64, r: i64) -> f64 {
    let gamma = params.gamma;
    let s = phi.sin();
    let sr = (r as f64 * phi).sin();
    let lambda0 = dispersion(params.h0, phi, gamma);
    let lambdaf = dispersion(params.hf, phi, gamma);
    if lambdaf == 0.0 {
        return 0.0;
    }
    let w0 = params.beta.thermal_weight(lambda0);
    gamma * (params.h0 - params.hf) * sr * s * (2.0 * lambdaf * params.t).sin() * w0 / lambdaf
}

/// `G_R` for all `|R| <= rmax` and `S_R` for `1 <= |R| <= rmax`, evaluated
/// on a shared quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionTable {
    pub params: ModelParams,
    rmax: usize,
    g: Vec<f64>,
    s: Vec<f64>,
    /// Summed quadrature error estimate.
    pub error: f64,
}

impl ContractionTable {
    pub fn new(params: &ModelParams, rmax: usize) -> Result<Self> {
        Self::with_config(params, rmax, QuadratureConfig::default())
    }

    pub fn with_config(params: &ModelParams, rmax: usize, config: QuadratureConfig) -> Result<Self> {
        params.validate()?;
        let mode = if params.equilibrium() {
            Mode::Equilibrium
        } else {
            Mode::Quench
        };
        Self::build(params, rmax, mode, config)
    }

    /// The `t → ∞` limit of a quench: oscillating terms average to zero, so
    /// `S_R = 0` and `G_R` keeps only its non-oscillating part.
    pub fn stationary(params: &ModelParams, rmax: usize, config: QuadratureConfig) -> Result<Self> {
        params.validate()?;
        let mode = if params.equilibrium() {
            Mode::Equilibrium
        } else {
            Mode::Stationary
        };
        Self::build(params, rmax, mode, config)
    }

    fn build(params: &ModelParams, rmax: usize, mode: Mode, config: QuadratureConfig) -> Result<Self> {
        let n_g = 2 * rmax + 1;
        let with_s = mode == Mode::Quench && params.t > 0.0;
        let n_s = if with_s { rmax } else { 0 };
        let p = *params;
        let rm = rmax as i64;
        let integrand = |phi: f64, out: &mut [f64]| {
            for (k, r) in (-rm..=rm).enumerate() {
                out[k] = g_integrand(&p, mode, phi, r);
            }
            for r in 1..=n_s as i64 {
                out[n_g + r as usize - 1] = s_integrand(&p, phi, r);
            }
        };
        let est = integrate_many(n_g + n_s, integrand, 0.0, PI, &breakpoints(params), config)?;
        let g = est.value[..n_g].iter().map(|v| v / PI).collect();
        let mut s = vec![0.0; 2 * rmax + 1];
        for r in 1..=n_s {
            let v = est.value[n_g + r - 1] / PI;
            s[rmax + r] = v;
            // sin(Rφ) is odd in R
            s[rmax - r] = -v;
        }
        Ok(ContractionTable {
            params: *params,
            rmax,
            g,
            s,
            error: est.error / PI,
        })
    }

    pub fn rmax(&self) -> usize {
        self.rmax
    }

    /// `G_r`. Panics if `|r|` exceeds the table range.
    pub fn g(&self, r: i64) -> f64 {
        self.g[self.index(r)]
    }

    /// `S_r`. Panics if `|r|` exceeds the table range.
    pub fn s(&self, r: i64) -> f64 {
        self.s[self.index(r)]
    }

    fn index(&self, r: i64) -> usize {
        let i = r + self.rmax as i64;
        assert!(
            (0..=2 * self.rmax as i64).contains(&i),
            "offset {r} outside contraction table of radius {}",
            self.rmax
        );
        i as usize
    }
}

/// `G_R` by adaptive quadrature at the default absolute tolerance.
pub fn g_correlator(r: i64, params: &ModelParams) -> Result<Contraction> {
    g_correlator_with(r, params, QuadratureConfig::default())
}

pub fn g_correlator_with(r: i64, params: &ModelParams, config: QuadratureConfig) -> Result<Contraction> {
    params.validate()?;
    let mode = if params.equilibrium() {
        Mode::Equilibrium
    } else {
        Mode::Quench
    };
    let p = *params;
    let est = integrate_many(
        1,
        |phi, out| out[0] = g_integrand(&p, mode, phi, r),
        0.0,
        PI,
        &breakpoints(params),
        config,
    )?;
    Ok(Contraction {
        r,
        value: est.value[0] / PI,
    })
}

/// `S_R`; identically zero in equilibrium and at `t = 0`.
pub fn s_correlator(r: i64, params: &ModelParams) -> Result<Contraction> {
    s_correlator_with(r, params, QuadratureConfig::default())
}

pub fn s_correlator_with(r: i64, params: &ModelParams, config: QuadratureConfig) -> Result<Contraction> {
    params.validate()?;
    if params.equilibrium() || params.t == 0.0 || r == 0 {
        return Ok(Contraction { r, value: 0.0 });
    }
    let p = *params;
    let est = integrate_many(
        1,
        |phi, out| out[0] = s_integrand(&p, phi, r),
        0.0,
        PI,
        &breakpoints(params),
        config,
    )?;
    Ok(Contraction {
        r,
        value: est.value[0] / PI,
    })
}

/// Transverse magnetization per site, `M_z = G_0 / 2`.
pub fn magnetization(params: &ModelParams) -> Result<f64> {
    Ok(0.5 * g_correlator(0, params)?.value)
}

/// Ising (`γ = 1`) ground-state magnetization in terms of complete elliptic
/// integrals of modulus `k = 2√h / (h + 1)`.
pub fn mz_ising_closed_form(h: f64) -> Result<f64> {
    let domain = |reason: &str| Error::DomainError {
        function: "mz_ising_closed_form",
        reason: reason.to_string(),
    };
    if !h.is_finite() || h < 0.0 {
        return Err(domain("field must be finite and non-negative"));
    }
    if h == 0.0 {
        return Err(domain("h = 0 divides by zero"));
    }
    if h == 1.0 {
        return Err(domain("K diverges at the critical field h = 1"));
    }
    let k = 2.0 * h.sqrt() / (h + 1.0);
    Ok(((h - 1.0) / h * ellipk(k) + (h + 1.0) / h * ellipe(k)) / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Beta;

    #[test]
    fn dispersion_examples() {
        assert_eq!(dispersion(1.0, 0.0, 0.5), 0.0);
        assert!((dispersion(0.0, PI / 2.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((dispersion(2.0, PI, 0.5) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn g0_vanishes_for_ising_at_zero_field() {
        let p = ModelParams::ground_state(1.0, 0.0).unwrap();
        assert!(g_correlator(0, &p).unwrap().value.abs() < 1e-12);
        assert!(magnetization(&p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn polarized_limit() {
        let p = ModelParams::ground_state(1.0, 1e4).unwrap();
        assert!((g_correlator(0, &p).unwrap().value - 1.0).abs() < 1e-6);
        let p = ModelParams::ground_state(0.5, 1e4).unwrap();
        assert!((magnetization(&p).unwrap() - 0.5).abs() < 1e-6);
        assert!((mz_ising_closed_form(1e4).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn ising_zero_field_nearest_neighbour() {
        // γ = 1, h = 0: G_R = −δ_{R,−1}
        let p = ModelParams::ground_state(1.0, 0.0).unwrap();
        let t = ContractionTable::new(&p, 3).unwrap();
        for r in -3..=3 {
            let expect = if r == -1 { -1.0 } else { 0.0 };
            assert!((t.g(r) - expect).abs() < 1e-12, "G_{r} = {}", t.g(r));
        }
    }

    #[test]
    fn s_vanishes_in_equilibrium_and_at_t0() {
        let p = ModelParams::new(0.3, 0.7, 0.7, Beta::Infinite, 5.0).unwrap();
        assert_eq!(s_correlator(1, &p).unwrap().value, 0.0);
        let p = ModelParams::quench(0.5, 0.5, 0.0, 0.0).unwrap();
        assert_eq!(s_correlator(1, &p).unwrap().value, 0.0);
        let p = ModelParams::quench(0.5, 0.5, 0.0, 1.0).unwrap();
        assert!(s_correlator(1, &p).unwrap().value.abs() > 1e-3);
    }

    #[test]
    fn table_matches_single_evaluations() {
        let p = ModelParams::quench(0.5, 0.5, 0.0, 1.3).unwrap();
        let t = ContractionTable::new(&p, 2).unwrap();
        for r in -2..=2 {
            assert!((t.g(r) - g_correlator(r, &p).unwrap().value).abs() < 1e-10);
            assert!((t.s(r) - s_correlator(r, &p).unwrap().value).abs() < 1e-10);
        }
    }

    #[test]
    fn quench_at_t0_is_initial_equilibrium() {
        let q = ModelParams::quench(0.5, 0.5, 0.0, 0.0).unwrap();
        let e = q.initial_equilibrium();
        for r in -2..=2 {
            let a = g_correlator(r, &q).unwrap().value;
            let b = g_correlator(r, &e).unwrap().value;
            assert!((a - b).abs() < 1e-10, "r = {r}: {a} vs {b}");
        }
    }

    #[test]
    fn isotropic_chain_is_split_at_fermi_point() {
        // γ = 0, h < 1: occupied band up to φ* = arccos h.
        // G_0 = (1/π)∫ sign(h − cos φ) dφ = 1 − 2φ*/π
        for &h in &[0.0, 0.3, 0.8] {
            let p = ModelParams::ground_state(0.0, h).unwrap();
            let g0 = g_correlator(0, &p).unwrap().value;
            assert!((g0 - (1.0 - 2.0 * h.acos() / PI)).abs() < 1e-12, "h = {h}");
        }
    }

    #[test]
    fn closed_form_domain_errors() {
        assert!(matches!(mz_ising_closed_form(0.0), Err(Error::DomainError { .. })));
        assert!(matches!(mz_ising_closed_form(1.0), Err(Error::DomainError { .. })));
        assert!(mz_ising_closed_form(-1.0).is_err());
    }

    #[test]
    fn finite_temperature_reduces_order() {
        let cold = ModelParams::ground_state(1.0, 0.5).unwrap();
        let warm = ModelParams::new(1.0, 0.5, 0.5, Beta::Finite(1.0), 0.0).unwrap();
        let m_cold = magnetization(&cold).unwrap();
        let m_warm = magnetization(&warm).unwrap();
        assert!(m_warm < m_cold && m_warm > 0.0);
        let very_cold = ModelParams::new(1.0, 0.5, 0.5, Beta::Finite(1e4), 0.0).unwrap();
        assert!((magnetization(&very_cold).unwrap() - m_cold).abs() < 1e-10);
    }
}
