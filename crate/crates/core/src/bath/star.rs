use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Functional form of the spectral density below the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralShape {
    /// `𝒥(ω) = √ω`.
    Sqrt,
    /// `𝒥(ω) = prefactor · ω^exponent`.
    PowerLaw { prefactor: f64, exponent: f64 },
}

/// Coupling-weighted density of bath modes with a hard cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralDensity {
    #[serde(default = "default_shape")]
    pub shape: SpectralShape,
    pub cutoff: f64,
}

fn default_shape() -> SpectralShape {
    SpectralShape::Sqrt
}

impl Default for SpectralDensity {
    fn default() -> Self {
        SpectralDensity {
            shape: SpectralShape::Sqrt,
            cutoff: 2.0,
        }
    }
}

impl SpectralDensity {
    pub fn sqrt(cutoff: f64) -> Self {
        SpectralDensity {
            shape: SpectralShape::Sqrt,
            cutoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(Error::invalid(
                "spectral_density.cutoff",
                "must be finite and > 0",
            ));
        }
        if let SpectralShape::PowerLaw {
            prefactor,
            exponent,
        } = self.shape
        {
            if !(prefactor >= 0.0 && prefactor.is_finite()) {
                return Err(Error::invalid(
                    "spectral_density.shape.prefactor",
                    "must be >= 0",
                ));
            }
            if !(exponent > -1.0 && exponent.is_finite()) {
                return Err(Error::invalid(
                    "spectral_density.shape.exponent",
                    "must be > -1 for an integrable density",
                ));
            }
        }
        Ok(())
    }

    pub fn value(&self, omega: f64) -> f64 {
        // relative slack so a grid point landing on the cutoff is kept
        if omega <= 0.0 || omega > self.cutoff * (1.0 + 1e-12) {
            return 0.0;
        }
        match self.shape {
            SpectralShape::Sqrt => omega.sqrt(),
            SpectralShape::PowerLaw {
                prefactor,
                exponent,
            } => prefactor * omega.powf(exponent),
        }
    }

    /// `∫₀^{ω_c} 𝒥(ω) dω`.
    pub fn integral(&self) -> f64 {
        let wc = self.cutoff;
        match self.shape {
            SpectralShape::Sqrt => 2.0 / 3.0 * wc.powf(1.5),
            SpectralShape::PowerLaw {
                prefactor,
                exponent,
            } => prefactor * wc.powf(exponent + 1.0) / (exponent + 1.0),
        }
    }
}

/// Linearly discretized bath: modes `ω_j = jδ` with couplings `J_j = √(𝒥(ω_j) δ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarBath {
    pub spectral: SpectralDensity,
    pub delta: f64,
    pub frequencies: Vec<f64>,
    pub couplings: Vec<f64>,
}

impl StarBath {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// `Σ_j J_j²`, the Riemann sum of the spectral density.
    pub fn total_weight(&self) -> f64 {
        self.couplings.iter().map(|j| j * j).sum()
    }
}

pub fn discretize(spectral: &SpectralDensity, delta: f64) -> Result<StarBath> {
    spectral.validate()?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid("delta", "must be finite and > 0"));
    }
    let ratio = spectral.cutoff / delta;
    let n = ratio.round();
    if n < 1.0 || (n * delta - spectral.cutoff).abs() > 1e-9 * spectral.cutoff {
        return Err(Error::invalid(
            "delta",
            format!(
                "must divide the cutoff {} (ratio {ratio} is not an integer)",
                spectral.cutoff
            ),
        ));
    }
    let n = n as usize;
    let frequencies: Vec<f64> = (1..=n).map(|j| j as f64 * delta).collect();
    let couplings = frequencies
        .iter()
        .map(|&w| (spectral.value(w) * delta).sqrt())
        .collect();
    Ok(StarBath {
        spectral: *spectral,
        delta,
        frequencies,
        couplings,
    })
}
