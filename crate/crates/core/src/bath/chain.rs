//! Star-to-chain mapping by Lanczos tridiagonalization.
//!
//! For each family ν the diagonal matrix of mode frequencies is
//! tridiagonalized starting from the normalized coupling vector. The system
//! then couples only to the chain head with strength `β_{ν,1} = ‖g_ν‖₂`, and
//! chain sites are linked by the remaining off-diagonal coefficients.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::star::SpectralDensity;
use super::thermofield::DoubledBath;
use crate::error::{Error, Result};

/// Lanczos stops when the next off-diagonal falls below this.
pub const BREAKDOWN: f64 = 1e-13;

/// A single tight-binding chain. `beta[0]` is the system-head coupling and
/// `beta[j]` (j ≥ 1) hops between sites `j-1` and `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl Chain {
    pub fn empty() -> Self {
        Chain {
            alpha: Vec::new(),
            beta: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn head_coupling(&self) -> f64 {
        self.beta.first().copied().unwrap_or(0.0)
    }

    pub fn hoppings(&self) -> &[f64] {
        if self.beta.is_empty() {
            &[]
        } else {
            &self.beta[1..]
        }
    }

    /// Dense tridiagonal chain matrix (row-major, `len × len`).
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.alpha[i];
            if i + 1 < n {
                m[i][i + 1] = self.beta[i + 1];
                m[i + 1][i] = self.beta[i + 1];
            }
        }
        m
    }
}

/// Where a chain came from; stored alongside the coefficients so cached
/// mappings can be checked against a request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainProvenance {
    pub spectral: SpectralDensity,
    pub delta: f64,
    pub temperature: f64,
    pub n_star: usize,
    pub n_chain: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainBath {
    /// Chain 1 (`+ω` family).
    pub chain1: Chain,
    /// Chain 2 (`-ω` family); empty at zero temperature.
    pub chain2: Chain,
    pub provenance: ChainProvenance,
}

impl ChainBath {
    pub fn chain(&self, family: usize) -> &Chain {
        if family == 1 {
            &self.chain1
        } else {
            &self.chain2
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Tridiagonalize `diag(energies)` from `start`, keeping at most `n` sites.
///
/// Full reorthogonalization (two Gram-Schmidt passes) is applied at every
/// step.
pub fn lanczos_diagonal(energies: &[f64], start: &[f64], n: usize) -> Chain {
    assert_eq!(energies.len(), start.len());
    let head = norm(start);
    if head == 0.0 || n == 0 {
        return Chain::empty();
    }
    let mut basis: Vec<Vec<f64>> = vec![start.iter().map(|x| x / head).collect()];
    let mut alpha = Vec::with_capacity(n);
    let mut beta = vec![head];
    for k in 0..n {
        let v = &basis[k];
        let mut w: Vec<f64> = energies.iter().zip(v).map(|(e, x)| e * x).collect();
        let a = dot(v, &w);
        alpha.push(a);
        if k + 1 == n {
            break;
        }
        for (wi, vi) in w.iter_mut().zip(v) {
            *wi -= a * vi;
        }
        if k > 0 {
            let b = beta[k];
            for (wi, vi) in w.iter_mut().zip(&basis[k - 1]) {
                *wi -= b * vi;
            }
        }
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = norm(&w);
        if b < BREAKDOWN {
            break;
        }
        beta.push(b);
        basis.push(w.into_iter().map(|x| x / b).collect());
    }
    Chain { alpha, beta }
}

pub fn chain_map(doubled: &DoubledBath, n_chain: usize) -> Result<ChainBath> {
    let n_star = doubled.star.len();
    if n_chain == 0 || n_chain > n_star {
        return Err(Error::invalid(
            "n_chain",
            format!("must satisfy 1 <= n_chain <= {n_star}"),
        ));
    }
    let chain1 = lanczos_diagonal(&doubled.frequencies(1), &doubled.g1, n_chain);
    let chain2 = lanczos_diagonal(&doubled.frequencies(2), &doubled.g2, n_chain);
    Ok(ChainBath {
        chain1,
        chain2,
        provenance: ChainProvenance {
            spectral: doubled.star.spectral,
            delta: doubled.star.delta,
            temperature: doubled.temperature,
            n_star,
            n_chain,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::star::{discretize, SpectralDensity};
    use crate::bath::thermofield::thermofield;

    #[test]
    fn single_mode_chain() {
        let c = lanczos_diagonal(&[0.7], &[0.3], 1);
        assert_eq!(c.alpha, vec![0.7]);
        assert_eq!(c.beta, vec![0.3]);
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn zero_temperature_second_chain_is_empty() {
        let star = discretize(&SpectralDensity::sqrt(2.0), 0.05).unwrap();
        let cb = chain_map(&thermofield(&star, 0.0).unwrap(), 20).unwrap();
        assert!(cb.chain2.is_empty());
        assert_eq!(cb.chain1.len(), 20);
        assert_eq!(cb.chain2.head_coupling(), 0.0);
    }

    #[test]
    fn breakdown_truncates_chain() {
        // three distinct energies support at most three Lanczos vectors
        let c = lanczos_diagonal(&[1.0, 1.0, 2.0, 3.0], &[0.5, 0.5, 1.0, 1.0], 4);
        assert_eq!(c.len(), 3);
        assert_eq!(c.beta.len(), 3);
    }

    #[test]
    fn chain_ranges() {
        let star = discretize(&SpectralDensity::sqrt(2.0), 0.05).unwrap();
        let cb = chain_map(&thermofield(&star, 0.7).unwrap(), 20).unwrap();
        assert!(cb.chain1.alpha.iter().all(|&a| (0.0..=2.0).contains(&a)));
        assert!(cb.chain2.alpha.iter().all(|&a| (-2.0..=0.0).contains(&a)));
        let g1 = cb.chain1.head_coupling();
        let d = thermofield(&star, 0.7).unwrap();
        assert!((g1 - d.g1.iter().map(|x| x * x).sum::<f64>().sqrt()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_lengths() {
        let star = discretize(&SpectralDensity::sqrt(2.0), 0.5).unwrap();
        let d = thermofield(&star, 0.0).unwrap();
        assert!(chain_map(&d, 0).is_err());
        assert!(chain_map(&d, 5).is_err());
        assert!(chain_map(&d, 4).is_ok());
    }

    #[test]
    fn json_is_bit_reproducible() {
        let star = discretize(&SpectralDensity::sqrt(2.0), 0.05).unwrap();
        let cb = chain_map(&thermofield(&star, 0.4).unwrap(), 12).unwrap();
        let s = cb.to_json().unwrap();
        let back = ChainBath::from_json(&s).unwrap();
        assert_eq!(back, cb);
        assert_eq!(back.to_json().unwrap(), s);
    }
}
