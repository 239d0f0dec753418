//! Exact diagonalization of finite periodic chains, used to check the
//! thermodynamic-limit formulas.

mod chain;
pub mod lanczos;

pub use chain::{
    correlator, evolve_quench, ground_state, reduced_density, ChainState, FiniteChain, GroundState,
    Parity, DEGENERACY_WINDOW, MAX_QUENCH_SITES, MAX_SITES, MIN_SITES,
};
