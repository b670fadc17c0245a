//! The chain-mapped continuum model laid out as a one-dimensional lattice.
//!
//! Site order is `[d₂,N … d₂,₁, (q₁q₂), d₁,₁ … d₁,N]`: chain 2 reversed so its
//! head touches the spins, then one merged site holding both qubits
//! (dimension 4, index `2·s₁ + s₂`), then chain 1. Both qubits couple to both
//! chain heads, so with the qubits merged every term of the Hamiltonian acts
//! on at most two neighbouring sites.
//!
//! Energies are taken in the frame rotating with `ω_q1` times the conserved
//! charge `n_q1 + n_q2 + Σ n_{1,j} - Σ n_{2,j}`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::bath::{chain_map, discretize, thermofield, ChainBath, SpectralDensity};
use crate::error::{Error, Result};
use crate::linalg::{self, dagger, kron, C64};
use crate::pulse::PulseShape;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumModelParams {
    pub omega_q1: f64,
    pub omega_q2: f64,
    pub pulse: PulseShape,
    pub spectral: SpectralDensity,
    pub temperature: f64,
    /// Frequency step of the linear discretization.
    pub delta: f64,
    /// Sites kept per chain.
    pub n_chain: usize,
}

impl ContinuumModelParams {
    /// Pulse shape used for the continuum runs when none is given.
    pub const DEFAULT_PULSE: PulseShape = PulseShape {
        amplitude: 1.5,
        delay: 2.0,
        width: 2.0,
    };

    /// Qubit splitting used when none is given.
    pub const DEFAULT_OMEGA_Q: f64 = 1.75;

    /// `δ = 0.01`, `ω_c = 2`, 50 sites per chain.
    pub fn full_scale(temperature: f64) -> Self {
        ContinuumModelParams {
            omega_q1: Self::DEFAULT_OMEGA_Q,
            omega_q2: Self::DEFAULT_OMEGA_Q,
            pulse: Self::DEFAULT_PULSE,
            spectral: SpectralDensity::sqrt(2.0),
            temperature,
            delta: 0.01,
            n_chain: 50,
        }
    }

    /// `δ = 0.05`, 20 sites per chain.
    pub fn ci_scale(temperature: f64) -> Self {
        ContinuumModelParams {
            delta: 0.05,
            n_chain: 20,
            ..Self::full_scale(temperature)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pulse.validate()?;
        self.spectral.validate()?;
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(Error::invalid("temperature", "must be >= 0"));
        }
        if !(self.omega_q1.is_finite() && self.omega_q2.is_finite()) {
            return Err(Error::invalid(
                "omega_q1",
                "qubit splittings must be finite",
            ));
        }
        if self.n_chain == 0 {
            return Err(Error::invalid("n_chain", "must be >= 1"));
        }
        Ok(())
    }

    /// Discretize, thermofield-double and chain-map the bath.
    pub fn build_chain(&self) -> Result<ChainBath> {
        self.validate()?;
        let star = discretize(&self.spectral, self.delta)?;
        let doubled = thermofield(&star, self.temperature)?;
        chain_map(&doubled, self.n_chain)
    }
}

impl Default for ContinuumModelParams {
    fn default() -> Self {
        Self::ci_scale(0.0)
    }
}

/// Which part of the lattice a site belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteRole {
    /// Chain site `j` (0 = head) of family 1 or 2.
    Chain {
        family: usize,
        j: usize,
    },
    Spins,
}

#[derive(Debug, Clone)]
pub struct Lattice {
    n1: usize,
    n2: usize,
    d_loc: usize,
    frame: f64,
    omega_q: [f64; 2],
    alpha1: Vec<f64>,
    beta1: Vec<f64>,
    alpha2: Vec<f64>,
    beta2: Vec<f64>,
}

pub const SPIN_DIM: usize = 4;

/// Merged-qubit operators (index `2·s₁ + s₂`).
pub fn spin_lowering(which: usize) -> Array2<C64> {
    let eye = linalg::identity(2);
    if which == 1 {
        kron(&linalg::sigma_minus(), &eye)
    } else {
        kron(&eye, &linalg::sigma_minus())
    }
}

/// Excited-state projector of qubit `which` on the merged site.
pub fn spin_population(which: usize) -> Array2<C64> {
    let l = spin_lowering(which);
    dagger(&l).dot(&l)
}

impl Lattice {
    pub fn new(params: &ContinuumModelParams, chain: &ChainBath, d_loc: usize) -> Result<Self> {
        params.validate()?;
        if d_loc < 2 {
            return Err(Error::invalid("d_loc", "must be >= 2"));
        }
        let p = &chain.provenance;
        if p.temperature != params.temperature
            || p.delta != params.delta
            || p.n_chain != params.n_chain
            || p.spectral != params.spectral
        {
            return Err(Error::invalid(
                "chain",
                "chain bath provenance does not match the model parameters",
            ));
        }
        if chain.chain1.is_empty() {
            return Err(Error::invalid(
                "chain",
                "chain 1 is empty; the qubits are decoupled",
            ));
        }
        Ok(Lattice {
            n1: chain.chain1.len(),
            n2: chain.chain2.len(),
            d_loc,
            frame: params.omega_q1,
            omega_q: [params.omega_q1, params.omega_q2],
            alpha1: chain.chain1.alpha.clone(),
            beta1: chain.chain1.beta.clone(),
            alpha2: chain.chain2.alpha.clone(),
            beta2: chain.chain2.beta.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.n1 + self.n2 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spin_site(&self) -> usize {
        self.n2
    }

    pub fn d_loc(&self) -> usize {
        self.d_loc
    }

    pub fn chain_lengths(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn role(&self, site: usize) -> SiteRole {
        if site < self.n2 {
            SiteRole::Chain {
                family: 2,
                j: self.n2 - 1 - site,
            }
        } else if site == self.n2 {
            SiteRole::Spins
        } else {
            SiteRole::Chain {
                family: 1,
                j: site - self.n2 - 1,
            }
        }
    }

    pub fn chain_site(&self, family: usize, j: usize) -> usize {
        if family == 1 {
            self.n2 + 1 + j
        } else {
            self.n2 - 1 - j
        }
    }

    pub fn site_dims(&self) -> Vec<usize> {
        (0..self.len())
            .map(|s| match self.role(s) {
                SiteRole::Spins => SPIN_DIM,
                SiteRole::Chain { .. } => self.d_loc,
            })
            .collect()
    }

    /// Local levels of the initial state: vacuum everywhere, `q₁` excited.
    pub fn initial_levels(&self) -> Vec<usize> {
        (0..self.len())
            .map(|s| match self.role(s) {
                SiteRole::Spins => 2,
                SiteRole::Chain { .. } => 0,
            })
            .collect()
    }

    /// Contribution of one site to the conserved charge (−1 for chain 2).
    pub fn charge_sign(&self, site: usize) -> f64 {
        match self.role(site) {
            SiteRole::Chain { family: 2, .. } => -1.0,
            _ => 1.0,
        }
    }

    /// Charge of each local basis state.
    pub fn local_charges(&self, site: usize) -> Vec<i64> {
        match self.role(site) {
            SiteRole::Spins => vec![0, 1, 1, 2],
            SiteRole::Chain { family, .. } => {
                let sign = if family == 2 { -1 } else { 1 };
                (0..self.d_loc as i64).map(|n| sign * n).collect()
            }
        }
    }

    /// Operator counting the excitations on a site.
    pub fn number_operator(&self, site: usize) -> Array2<C64> {
        match self.role(site) {
            SiteRole::Spins => spin_population(1) + spin_population(2),
            SiteRole::Chain { .. } => linalg::number(self.d_loc),
        }
    }

    fn local_term(&self, site: usize) -> Array2<C64> {
        match self.role(site) {
            SiteRole::Spins => {
                spin_population(1).mapv(|z| z * (self.omega_q[0] - self.frame))
                    + spin_population(2).mapv(|z| z * (self.omega_q[1] - self.frame))
            }
            SiteRole::Chain { family: 1, j } => {
                linalg::number(self.d_loc).mapv(|z| z * (self.alpha1[j] - self.frame))
            }
            SiteRole::Chain { j, .. } => {
                linalg::number(self.d_loc).mapv(|z| z * (self.alpha2[j] + self.frame))
            }
        }
    }

    /// True for the two bonds touching the qubits.
    pub fn is_driven(&self, bond: usize) -> bool {
        bond + 1 == self.n2 || bond == self.n2
    }

    pub fn bonds(&self) -> usize {
        self.len() - 1
    }

    /// Two-site Hamiltonian of bond `(b, b+1)` at pulse amplitudes
    /// `(Ω_P, Ω_S)`. Each site's on-site energy is attached to the bond on
    /// its right, the last site's to the final bond.
    pub fn bond_hamiltonian(&self, bond: usize, wp: f64, ws: f64) -> Array2<C64> {
        assert!(bond + 1 < self.len());
        let dims = self.site_dims();
        let (dl, dr) = (dims[bond], dims[bond + 1]);
        let eye_l = linalg::identity(dl);
        let eye_r = linalg::identity(dr);
        let mut h = kron(&self.local_term(bond), &eye_r);
        if bond + 2 == self.len() {
            h = h + kron(&eye_l, &self.local_term(bond + 1));
        }
        let a = linalg::annihilation(self.d_loc);
        let ad = dagger(&a);
        let pair = |x: Array2<C64>| &x + &dagger(&x);
        let coupling = match (self.role(bond), self.role(bond + 1)) {
            (SiteRole::Chain { family: 2, j }, SiteRole::Chain { .. }) => {
                // left site is further from the head
                pair(kron(&ad, &a)).mapv(|z| z * self.beta2[j])
            }
            (SiteRole::Chain { .. }, SiteRole::Spins) => {
                // β₂,₁ (σ⁻ d₂ + h.c.) for each qubit
                let s1 = kron(&a, &spin_lowering(1)).mapv(|z| z * wp);
                let s2 = kron(&a, &spin_lowering(2)).mapv(|z| z * ws);
                pair(s1 + s2).mapv(|z| z * self.beta2[0])
            }
            (SiteRole::Spins, SiteRole::Chain { .. }) => {
                // β₁,₁ (σ⁻ d₁† + h.c.) for each qubit
                let s1 = kron(&spin_lowering(1), &ad).mapv(|z| z * wp);
                let s2 = kron(&spin_lowering(2), &ad).mapv(|z| z * ws);
                pair(s1 + s2).mapv(|z| z * self.beta1[0])
            }
            (SiteRole::Chain { family: 1, j }, SiteRole::Chain { .. }) => {
                pair(kron(&ad, &a)).mapv(|z| z * self.beta1[j + 1])
            }
            _ => unreachable!("lattice order violated"),
        };
        h + coupling
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice(t: f64) -> Lattice {
        let mut p = ContinuumModelParams::ci_scale(t);
        p.n_chain = 4;
        let chain = p.build_chain().unwrap();
        Lattice::new(&p, &chain, 3).unwrap()
    }

    #[test]
    fn layout_at_finite_temperature() {
        let l = lattice(0.5);
        assert_eq!(l.len(), 9);
        assert_eq!(l.spin_site(), 4);
        assert_eq!(l.role(0), SiteRole::Chain { family: 2, j: 3 });
        assert_eq!(l.role(3), SiteRole::Chain { family: 2, j: 0 });
        assert_eq!(l.role(5), SiteRole::Chain { family: 1, j: 0 });
        assert_eq!(l.chain_site(2, 0), 3);
        assert_eq!(l.chain_site(1, 3), 8);
        assert_eq!(l.site_dims(), vec![3, 3, 3, 3, 4, 3, 3, 3, 3]);
        assert_eq!(l.initial_levels()[4], 2);
        assert!(l.is_driven(3) && l.is_driven(4) && !l.is_driven(5));
    }

    #[test]
    fn zero_temperature_drops_second_chain() {
        let l = lattice(0.0);
        assert_eq!(l.len(), 5);
        assert_eq!(l.spin_site(), 0);
        assert!(l.is_driven(0));
    }

    #[test]
    fn bond_terms_are_hermitian() {
        let l = lattice(0.5);
        for b in 0..l.bonds() {
            let h = l.bond_hamiltonian(b, 0.7, 1.3);
            assert!(linalg::hermiticity_defect(&h) == 0.0);
        }
    }

    #[test]
    fn rejects_mismatched_chain() {
        let p = ContinuumModelParams::ci_scale(0.5);
        let chain = ContinuumModelParams::ci_scale(0.4).build_chain().unwrap();
        assert!(Lattice::new(&p, &chain, 3).is_err());
        let chain = p.build_chain().unwrap();
        assert!(Lattice::new(&p, &chain, 1).is_err());
    }
}
