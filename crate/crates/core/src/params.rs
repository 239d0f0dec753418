//! Model parameters of the anisotropic XY chain
//!
//! ```text
//! H = Σ_j [ (1+γ) S^x_j S^x_{j+1} + (1−γ) S^y_j S^y_{j+1} ] − h Σ_j S^z_j ,   S = σ/2
//! ```
//!
//! A quench switches the field from `h0` to `hf` at `t = 0`; equilibrium is
//! the special case `hf == h0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest time for which the oscillatory integrands are resolved reliably.
pub const MAX_SUPPORTED_TIME: f64 = 100.0;

/// Inverse temperature. `Infinite` is the ground state (T = 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    /// `tanh(β Λ / 2)`. At T = 0 this is 1 for Λ > 0 and 0 for Λ = 0.
    pub fn thermal_factor(self, lambda: f64) -> f64 {
        match self {
            Beta::Infinite => {
                if lambda > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Beta::Finite(beta) => (0.5 * beta * lambda).tanh(),
        }
    }

    /// `tanh(β Λ / 2) / Λ`, continued to `β / 2` at Λ = 0 for finite β.
    pub fn thermal_weight(self, lambda: f64) -> f64 {
        match self {
            Beta::Infinite => {
                if lambda > 0.0 {
                    1.0 / lambda
                } else {
                    0.0
                }
            }
            Beta::Finite(beta) => {
                let x = 0.5 * beta * lambda;
                if x.abs() < 1e-8 {
                    0.5 * beta
                } else {
                    x.tanh() / lambda
                }
            }
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Beta::Infinite)
    }
}

impl Default for Beta {
    fn default() -> Self {
        Beta::Infinite
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub gamma: f64,
    pub h0: f64,
    pub hf: f64,
    pub beta: Beta,
    pub t: f64,
}

impl ModelParams {
    /// Validated constructor.
    pub fn new(gamma: f64, h0: f64, hf: f64, beta: Beta, t: f64) -> Result<Self> {
        let p = ModelParams {
            gamma,
            h0,
            hf,
            beta,
            t,
        };
        p.validate()?;
        Ok(p)
    }

    /// Ground state of the chain at field `h`.
    pub fn ground_state(gamma: f64, h: f64) -> Result<Self> {
        Self::new(gamma, h, h, Beta::Infinite, 0.0)
    }

    /// Zero-temperature quench `h0 → hf`, observed at time `t`.
    pub fn quench(gamma: f64, h0: f64, hf: f64, t: f64) -> Result<Self> {
        Self::new(gamma, h0, hf, Beta::Infinite, t)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidParameter(what));
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad(format!("gamma = {} not in [0, 1]", self.gamma));
        }
        if !(self.h0 >= 0.0 && self.h0.is_finite()) {
            return bad(format!("h0 = {} must be finite and >= 0", self.h0));
        }
        if !(self.hf >= 0.0 && self.hf.is_finite()) {
            return bad(format!("hf = {} must be finite and >= 0", self.hf));
        }
        if let Beta::Finite(b) = self.beta {
            if !(b > 0.0 && b.is_finite()) {
                return bad(format!("beta = {b} must be positive"));
            }
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return bad(format!("t = {} must be finite and >= 0", self.t));
        }
        if self.t > MAX_SUPPORTED_TIME {
            return bad(format!(
                "t = {} exceeds the supported horizon {MAX_SUPPORTED_TIME}",
                self.t
            ));
        }
        Ok(())
    }

    pub fn equilibrium(&self) -> bool {
        self.hf == self.h0
    }

    pub fn with_time(self, t: f64) -> Self {
        ModelParams { t, ..self }
    }

    /// Equilibrium parameters at the post-quench field.
    pub fn final_equilibrium(self) -> Self {
        ModelParams {
            h0: self.hf,
            t: 0.0,
            ..self
        }
    }

    /// Equilibrium parameters at the pre-quench field.
    pub fn initial_equilibrium(self) -> Self {
        ModelParams {
            hf: self.h0,
            t: 0.0,
            ..self
        }
    }

    pub(crate) fn require_equilibrium(&self, what: &str) -> Result<()> {
        if self.equilibrium() {
            Ok(())
        } else {
            Err(Error::UnsupportedConfiguration(format!(
                "{what} requires equilibrium parameters (h0 = {}, hf = {})",
                self.h0, self.hf
            )))
        }
    }
}
