//! Gaussian control pulses.
//!
//! The pump pulse is centred at `+delay/2` and the Stokes pulse at
//! `-delay/2`, so a positive delay gives the counter-intuitive ordering
//! (Stokes first). A negative delay swaps the centres.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PulseKind {
    /// Pump, couples the initial qubit.
    P,
    /// Stokes, couples the target qubit.
    S,
}

/// Shared envelope parameters of the pump/Stokes pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseShape {
    /// Peak amplitude Ω.
    pub amplitude: f64,
    /// Delay τ between the pulse centres.
    pub delay: f64,
    /// Width τ₀ of the Gaussian.
    pub width: f64,
}

impl Default for PulseShape {
    fn default() -> Self {
        PulseShape {
            amplitude: 2.0,
            delay: 1.0,
            width: 2.0,
        }
    }
}

impl PulseShape {
    pub fn new(amplitude: f64, delay: f64, width: f64) -> Result<Self> {
        let shape = PulseShape {
            amplitude,
            delay,
            width,
        };
        shape.validate()?;
        Ok(shape)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::invalid("pulse.amplitude", "must be finite and >= 0"));
        }
        if !self.delay.is_finite() {
            return Err(Error::invalid("pulse.delay", "must be finite"));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::invalid("pulse.width", "must be finite and > 0"));
        }
        Ok(())
    }

    pub fn pump(&self) -> Pulse {
        Pulse {
            shape: *self,
            kind: PulseKind::P,
        }
    }

    pub fn stokes(&self) -> Pulse {
        Pulse {
            shape: *self,
            kind: PulseKind::S,
        }
    }

    /// `(Ω_P(t), Ω_S(t))`.
    pub fn values(&self, t: f64) -> (f64, f64) {
        (self.pump().value(t), self.stokes().value(t))
    }

    /// Half-width of the window outside which both pulses are below
    /// `e^{-25}` of their peak.
    pub fn default_window(&self) -> f64 {
        self.delay.abs() / 2.0 + 5.0 * self.width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub shape: PulseShape,
    pub kind: PulseKind,
}

impl Pulse {
    pub fn center(&self) -> f64 {
        match self.kind {
            PulseKind::P => self.shape.delay / 2.0,
            PulseKind::S => -self.shape.delay / 2.0,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let x = (t - self.center()) / self.shape.width;
        self.shape.amplitude * (-x * x).exp()
    }
}
