//! Population transfer between two qubits through a finite-temperature
//! intermediate state.
//!
//! Two regimes are covered:
//!
//! * [`discrete`]: a five-site model (qubit, mode, thermal spin, mode, qubit)
//!   propagated exactly as a density matrix.
//! * [`bath`] + [`mps`]: a bosonic continuum, discretized, thermofield-doubled
//!   and mapped onto two chains, then evolved as a matrix product state.
//!
//! [`sweep`] drives parameter scans and writes CSV/JSON/SVG artifacts.

pub mod bath;
pub mod discrete;
pub mod error;
pub mod linalg;
pub mod mps;
pub mod plot;
pub mod pulse;
pub mod result;
pub mod sweep;

pub use error::{Error, Result};
pub use pulse::{Pulse, PulseKind, PulseShape};
pub use result::{Diagnostics, RunResult, TraceColumn};
