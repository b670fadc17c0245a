use serde::{Deserialize, Serialize};

use super::star::StarBath;
use crate::error::{Error, Result};

/// Mean thermal occupation `1/(e^{ω/T} - 1)`; exactly zero at `T = 0`.
pub fn bose_einstein(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return 0.0;
    }
    1.0 / (omega / temperature).exp_m1()
}

/// Thermofield-doubled bath. Family 1 has frequencies `+ω_j` and couplings
/// `J_j cosh θ_j`; family 2 has `-ω_j` and `J_j sinh θ_j`. Its joint vacuum
/// reproduces the thermal state of the original bath.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubledBath {
    pub star: StarBath,
    pub temperature: f64,
    pub occupations: Vec<f64>,
    pub cosh_theta: Vec<f64>,
    pub sinh_theta: Vec<f64>,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
}

impl DoubledBath {
    pub fn frequencies(&self, family: usize) -> Vec<f64> {
        let sign = if family == 1 { 1.0 } else { -1.0 };
        self.star.frequencies.iter().map(|w| sign * w).collect()
    }

    pub fn couplings(&self, family: usize) -> &[f64] {
        if family == 1 {
            &self.g1
        } else {
            &self.g2
        }
    }
}

pub fn thermofield(star: &StarBath, temperature: f64) -> Result<DoubledBath> {
    if temperature.is_nan() || temperature < 0.0 {
        return Err(Error::invalid("temperature", "must be >= 0"));
    }
    let occupations: Vec<f64> = star
        .frequencies
        .iter()
        .map(|&w| bose_einstein(w, temperature))
        .collect();
    let cosh_theta: Vec<f64> = occupations.iter().map(|n| (1.0 + n).sqrt()).collect();
    let sinh_theta: Vec<f64> = occupations.iter().map(|n| n.sqrt()).collect();
    let g1 = star
        .couplings
        .iter()
        .zip(&cosh_theta)
        .map(|(j, c)| j * c)
        .collect();
    let g2 = star
        .couplings
        .iter()
        .zip(&sinh_theta)
        .map(|(j, s)| j * s)
        .collect();
    Ok(DoubledBath {
        star: star.clone(),
        temperature,
        occupations,
        cosh_theta,
        sinh_theta,
        g1,
        g2,
    })
}
