//! Discrete model: two qubits, two bosonic modes and one thermal intermediate spin.

pub mod liouville;
pub mod model;

pub use liouville::{
    evolve, evolve_from, evolve_with_states, fidelity_traces, mixture_oracle, IntegratorConfig,
    LiouvilleEngine, Method, TimeGrid,
};
pub use model::{
    build_hamiltonian, initial_state, thermal_spin_state, thermal_weights, DenseOperator,
    DensityMatrix, DiscreteModelParams, DiscreteSpace, Frame, HamiltonianParts,
};
