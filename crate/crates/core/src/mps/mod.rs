//! Matrix product state evolution of the chain-mapped continuum model.

pub mod checkpoint;
pub mod lattice;
pub mod single_excitation;
pub mod state;
pub mod tebd;

pub use checkpoint::config_hash;
pub use lattice::{
    spin_lowering, spin_population, ContinuumModelParams, Lattice, SiteRole, SPIN_DIM,
};
pub use single_excitation::single_excitation;
pub use state::{MpsState, Sweep, Truncation};
pub use tebd::{
    evolve_tcmps, initial_state, spin_fidelities, EvolveConfig, Integrator, Propagator, TcmpsRun,
};
