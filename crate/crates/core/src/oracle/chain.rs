//! Periodic XY chain of `n` spins,
//! `H = Σ_j [(1+γ) S^x_j S^x_{j+1} + (1−γ) S^y_j S^y_{j+1}] − h Σ_j S^z_j`,
//! `S = σ/2`, in the computational basis (site 0 is the most significant
//! bit, bit value 0 is `σ^z = +1`).

use nalgebra::{DMatrix, DVector};

use super::lanczos::{lowest_eigenpair, lowest_eigenpair_dense, LanczosOptions};
use crate::density::{DensityMatrix, Pauli, C64};
use crate::error::{Error, Result};

pub const MIN_SITES: usize = 2;
pub const MAX_SITES: usize = 14;
/// Largest chain for which quench dynamics are computed by full
/// diagonalization.
pub const MAX_QUENCH_SITES: usize = 10;
/// Sector dimension up to which the dense eigensolver is used.
const DENSE_LIMIT: usize = 256;
/// Sector ground energies closer than this are treated as one degenerate
/// doublet.
pub const DEGENERACY_WINDOW: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteChain {
    pub n: usize,
    pub gamma: f64,
    pub h: f64,
}

/// Spin-flip parity `Π_j σ^z_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn of(state: usize) -> Parity {
        if state.count_ones() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

struct Sector {
    states: Vec<usize>,
    /// Position of each full-space state in `states` (or `usize::MAX`).
    index: Vec<usize>,
}

impl FiniteChain {
    pub fn new(n: usize, gamma: f64, h: f64) -> Result<Self> {
        if !(MIN_SITES..=MAX_SITES).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "chain length {n} outside [{MIN_SITES}, {MAX_SITES}]"
            )));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!("gamma = {gamma} not in [0, 1]")));
        }
        if !h.is_finite() {
            return Err(Error::InvalidParameter(format!("h = {h} must be finite")));
        }
        Ok(FiniteChain { n, gamma, h })
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    fn bonds(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.n;
        (0..n).map(move |j| {
            let k = (j + 1) % n;
            (1 << (n - 1 - j)) | (1 << (n - 1 - k))
        })
    }

    fn diagonal(&self, state: usize) -> f64 {
        let down = state.count_ones() as f64;
        -0.5 * self.h * (self.n as f64 - 2.0 * down)
    }

    /// Amplitude of `⟨s ⊕ mask| H |s⟩` for a bond mask.
    fn flip_amplitude(&self, state: usize, mask: usize) -> f64 {
        let aligned = (state & mask).count_ones() != 1;
        if aligned {
            0.5 * self.gamma
        } else {
            0.5
        }
    }

    fn sector(&self, p: Parity) -> Sector {
        let states: Vec<usize> = (0..self.dim()).filter(|&s| Parity::of(s) == p).collect();
        let mut index = vec![usize::MAX; self.dim()];
        for (i, &s) in states.iter().enumerate() {
            index[s] = i;
        }
        Sector { states, index }
    }

    fn sector_matvec(&self, sector: &Sector, masks: &[usize], x: &[f64], y: &mut [f64]) {
        for (i, &s) in sector.states.iter().enumerate() {
            let mut acc = self.diagonal(s) * x[i];
            for &m in masks {
                let t = s ^ m;
                // H is symmetric, so gather instead of scatter.
                acc += self.flip_amplitude(t, m) * x[sector.index[t]];
            }
            y[i] = acc;
        }
    }

    fn sector_dense(&self, sector: &Sector, masks: &[usize]) -> DMatrix<f64> {
        let d = sector.states.len();
        let mut m = DMatrix::zeros(d, d);
        for (i, &s) in sector.states.iter().enumerate() {
            m[(i, i)] += self.diagonal(s);
            for &mask in masks {
                let t = s ^ mask;
                m[(sector.index[t], i)] += self.flip_amplitude(s, mask);
            }
        }
        m
    }

    /// Dense Hamiltonian on the full Hilbert space.
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let masks: Vec<usize> = self.bonds().collect();
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for s in 0..self.dim() {
            m[(s, s)] += self.diagonal(s);
            for &mask in &masks {
                m[(s ^ mask, s)] += self.flip_amplitude(s, mask);
            }
        }
        m
    }

    fn embed(&self, sector: &Sector, v: &[f64]) -> DVector<C64> {
        let mut full = DVector::from_element(self.dim(), C64::new(0.0, 0.0));
        for (&s, &a) in sector.states.iter().zip(v) {
            full[s] = C64::new(a, 0.0);
        }
        full
    }

    fn sector_ground(&self, p: Parity) -> Result<(f64, DVector<C64>)> {
        let sector = self.sector(p);
        let masks: Vec<usize> = self.bonds().collect();
        let pair = if sector.states.len() <= DENSE_LIMIT {
            lowest_eigenpair_dense(self.sector_dense(&sector, &masks))?
        } else {
            lowest_eigenpair(
                sector.states.len(),
                |x, y| self.sector_matvec(&sector, &masks, x, y),
                &LanczosOptions::default(),
            )?
        };
        Ok((pair.value, self.embed(&sector, &pair.vector)))
    }
}

/// Statistical mixture `Σ w_k |ψ_k⟩⟨ψ_k|` of chain states.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub n: usize,
    pub parts: Vec<(f64, DVector<C64>)>,
}

impl ChainState {
    pub fn pure(n: usize, psi: DVector<C64>) -> Result<Self> {
        if psi.len() != 1 << n {
            return Err(Error::InvalidParameter(format!(
                "state of length {} on {n} sites",
                psi.len()
            )));
        }
        let norm = psi.norm();
        Ok(ChainState {
            n,
            parts: vec![(1.0, psi / C64::new(norm, 0.0))],
        })
    }

    /// The dominant pure component.
    pub fn vector(&self) -> &DVector<C64> {
        &self
            .parts
            .iter()
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .expect("nonempty state")
            .1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    /// Lowest energies in the even and odd parity sectors.
    pub sector_energies: [f64; 2],
    pub state: ChainState,
}

/// Ground state. Both parity sectors are diagonalized; when their lowest
/// energies lie within [`DEGENERACY_WINDOW`] (the ordered phase, where the
/// splitting vanishes exponentially with `n`), the equal mixture of the two
/// sector ground states is returned.
pub fn ground_state(chain: &FiniteChain) -> Result<GroundState> {
    let (ee, ve) = chain.sector_ground(Parity::Even)?;
    let (eo, vo) = chain.sector_ground(Parity::Odd)?;
    let parts = if (ee - eo).abs() < DEGENERACY_WINDOW {
        vec![(0.5, ve), (0.5, vo)]
    } else if ee <= eo {
        vec![(1.0, ve)]
    } else {
        vec![(1.0, vo)]
    };
    Ok(GroundState {
        energy: ee.min(eo),
        sector_energies: [ee, eo],
        state: ChainState { n: chain.n, parts },
    })
}

fn check_sites(n: usize, sites: &[usize]) -> Result<()> {
    for (i, &s) in sites.iter().enumerate() {
        if s >= n {
            return Err(Error::InvalidParameter(format!("site {s} outside a chain of {n}")));
        }
        if sites[..i].contains(&s) {
            return Err(Error::InvalidParameter(format!("site {s} listed twice")));
        }
    }
    Ok(())
}

/// `⟨Π σ^{u}_{j}⟩` for a list of `(site, Pauli)` factors on distinct sites.
pub fn correlator(state: &ChainState, ops: &[(usize, Pauli)]) -> Result<f64> {
    let sites: Vec<usize> = ops.iter().map(|o| o.0).collect();
    check_sites(state.n, &sites)?;
    let n = state.n;
    let mut total = 0.0;
    for (w, psi) in &state.parts {
        let mut acc = C64::new(0.0, 0.0);
        for s in 0..psi.len() {
            let a = psi[s];
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            let mut t = s;
            let mut amp = C64::new(1.0, 0.0);
            for &(site, p) in ops {
                let shift = n - 1 - site;
                let (nb, f) = p.apply_bit(((s >> shift) & 1) as u8);
                amp *= f;
                t = (t & !(1 << shift)) | ((nb as usize) << shift);
            }
            acc += psi[t].conj() * amp * a;
        }
        total += w * acc.re;
    }
    Ok(total)
}

/// Reduced density matrix on `sites` (qubit order as listed).
pub fn reduced_density(state: &ChainState, sites: &[usize]) -> Result<DensityMatrix> {
    check_sites(state.n, &sites)?;
    if !(1..=3).contains(&sites.len()) {
        return Err(Error::InvalidParameter(format!(
            "reduced states on 1 to 3 sites, got {}",
            sites.len()
        )));
    }
    let n = state.n;
    let k = sites.len();
    let dk = 1 << k;
    let shifts: Vec<usize> = sites.iter().map(|&s| n - 1 - s).collect();
    let site_mask: usize = shifts.iter().map(|&s| 1 << s).sum();
    // Full-space offset of each local configuration.
    let local: Vec<usize> = (0..dk)
        .map(|a| {
            (0..k)
                .filter(|&q| (a >> (k - 1 - q)) & 1 == 1)
                .map(|q| 1 << shifts[q])
                .sum()
        })
        .collect();
    let mut rho = DMatrix::<C64>::zeros(dk, dk);
    let mut amps = vec![C64::new(0.0, 0.0); dk];
    for (w, psi) in &state.parts {
        for env in 0..(1usize << n) {
            if env & site_mask != 0 {
                continue;
            }
            for a in 0..dk {
                amps[a] = psi[env | local[a]];
            }
            for a in 0..dk {
                if amps[a] == C64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..dk {
                    rho[(a, b)] += amps[a] * amps[b].conj() * *w;
                }
            }
        }
    }
    let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix::new(rho)
}

/// States after the quench `h0 → chain.h` at each of `times`. The initial
/// state is the ground state at `h0`; each parity component is propagated
/// with the spectral decomposition of the final Hamiltonian.
pub fn evolve_quench(chain: &FiniteChain, h0: f64, times: &[f64]) -> Result<Vec<ChainState>> {
    if chain.n > MAX_QUENCH_SITES {
        return Err(Error::UnsupportedConfiguration(format!(
            "quench dynamics limited to n <= {MAX_QUENCH_SITES}, got {}",
            chain.n
        )));
    }
    let initial = ground_state(&FiniteChain::new(chain.n, chain.gamma, h0)?)?;
    let masks: Vec<usize> = chain.bonds().collect();
    let mut propagators = Vec::new();
    for p in [Parity::Even, Parity::Odd] {
        let sector = chain.sector(p);
        let eig = chain.sector_dense(&sector, &masks).symmetric_eigen();
        propagators.push((sector, eig));
    }
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let mut parts = Vec::new();
        for (w, psi) in &initial.state.parts {
            let mut evolved = DVector::from_element(chain.dim(), C64::new(0.0, 0.0));
            for (sector, eig) in &propagators {
                let local: DVector<C64> =
                    DVector::from_iterator(sector.states.len(), sector.states.iter().map(|&s| psi[s]));
                if local.norm() == 0.0 {
                    continue;
                }
                let v = eig.eigenvectors.map(|x| C64::new(x, 0.0));
                let mut coeff = v.transpose() * &local;
                for (c, &e) in coeff.iter_mut().zip(eig.eigenvalues.iter()) {
                    *c *= C64::from_polar(1.0, -e * t);
                }
                let back = &v * coeff;
                for (&s, a) in sector.states.iter().zip(back.iter()) {
                    evolved[s] = *a;
                }
            }
            parts.push((*w, evolved));
        }
        out.push(ChainState { n: chain.n, parts });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_site_xx_energy() {
        // The periodic pair carries the bond twice: H = σxσx/2 + σyσy/2.
        let g = ground_state(&FiniteChain::new(2, 0.0, 0.0).unwrap()).unwrap();
        assert!((g.energy + 1.0).abs() < 1e-14);
    }

    #[test]
    fn sector_operator_matches_dense_hamiltonian() {
        let c = FiniteChain::new(6, 0.3, 0.7).unwrap();
        let h = c.hamiltonian();
        assert!((&h - h.transpose()).amax() < 1e-15);
        let dense_min = h.symmetric_eigenvalues().min();
        let g = ground_state(&c).unwrap();
        assert!((g.energy - dense_min).abs() < 1e-12);
    }

    #[test]
    fn lanczos_path_matches_dense_path() {
        // n = 10 sectors have dimension 512 and go through Lanczos.
        let c = FiniteChain::new(10, 0.5, 0.8).unwrap();
        let g = ground_state(&c).unwrap();
        let dense_min = c.hamiltonian().symmetric_eigenvalues().min();
        assert!((g.energy - dense_min).abs() < 1e-10);
    }

    #[test]
    fn polarized_for_strong_isotropic_field() {
        let g = ground_state(&FiniteChain::new(4, 0.0, 3.0).unwrap()).unwrap();
        let psi = g.state.vector();
        assert!((psi[0].norm() - 1.0).abs() < 1e-10);
        assert!((correlator(&g.state, &[(2, Pauli::Z)]).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bell_pair_correlator() {
        let s = 1.0 / 2f64.sqrt();
        let psi = DVector::from_vec(vec![s, 0.0, 0.0, s]).map(|x| C64::new(x, 0.0));
        let st = ChainState::pure(2, psi).unwrap();
        assert!((correlator(&st, &[(0, Pauli::X), (1, Pauli::X)]).unwrap() - 1.0).abs() < 1e-15);
        let rho = reduced_density(&st, &[0, 1]).unwrap();
        assert!((rho.expectation(&[Pauli::Y, Pauli::Y]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduced_density_agrees_with_correlators() {
        let g = ground_state(&FiniteChain::new(8, 0.5, 0.5).unwrap()).unwrap();
        let sites = [5, 1, 2];
        let rho = reduced_density(&g.state, &sites).unwrap();
        for u in Pauli::ALL {
            for v in Pauli::ALL {
                for w in Pauli::ALL {
                    let direct = correlator(&g.state, &[(5, u), (1, v), (2, w)]).unwrap();
                    assert!((rho.expectation(&[u, v, w]) - direct).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn translation_invariance() {
        let g = ground_state(&FiniteChain::new(8, 0.7, 1.3).unwrap()).unwrap();
        let a = correlator(&g.state, &[(0, Pauli::X), (2, Pauli::Z), (3, Pauli::X)]).unwrap();
        let b = correlator(&g.state, &[(1, Pauli::X), (3, Pauli::Z), (4, Pauli::X)]).unwrap();
        let c = correlator(&g.state, &[(6, Pauli::X), (0, Pauli::Z), (1, Pauli::X)]).unwrap();
        assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-10);
    }

    #[test]
    fn quench_preserves_norm_and_energy() {
        let c = FiniteChain::new(6, 0.5, 0.0).unwrap();
        let states = evolve_quench(&c, 0.5, &[0.0, 1.0, 5.0]).unwrap();
        let h = c.hamiltonian().map(|x| C64::new(x, 0.0));
        let energy = |st: &ChainState| -> f64 {
            st.parts
                .iter()
                .map(|(w, p)| w * (p.adjoint() * &h * p)[(0, 0)].re)
                .sum()
        };
        let e0 = energy(&states[0]);
        for st in &states {
            for (_, p) in &st.parts {
                assert!((p.norm() - 1.0).abs() < 1e-12);
            }
            assert!((energy(st) - e0).abs() < 1e-10);
        }
        assert!(evolve_quench(&FiniteChain::new(12, 0.5, 0.0).unwrap(), 0.5, &[1.0]).is_err());
    }

    #[test]
    fn rejects_bad_chains() {
        assert!(FiniteChain::new(1, 0.5, 0.5).is_err());
        assert!(FiniteChain::new(15, 0.5, 0.5).is_err());
        assert!(FiniteChain::new(4, 1.5, 0.5).is_err());
        let g = ground_state(&FiniteChain::new(4, 0.5, 0.5).unwrap()).unwrap();
        assert!(correlator(&g.state, &[(0, Pauli::Z), (0, Pauli::Z)]).is_err());
        assert!(reduced_density(&g.state, &[0, 4]).is_err());
    }
}
