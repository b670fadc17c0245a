//! Continuum preprocessing: linear discretization, thermofield doubling and
//! star-to-chain mapping.

pub mod chain;
pub mod star;
pub mod thermofield;

pub use chain::{chain_map, lanczos_diagonal, Chain, ChainBath, ChainProvenance};
pub use star::{discretize, SpectralDensity, SpectralShape, StarBath};
pub use thermofield::{bose_einstein, thermofield, DoubledBath};
