//! Sweep-ordered TEBD for the chain-mapped lattice.
//!
//! One second-order step applies `exp(-i h_b τ/2)` on bonds `0 .. L-2` left
//! to right and then the same gates right to left, merging the two half-steps
//! on the last bond. The product is symmetric, hence second order; pulses are
//! sampled at the step midpoint. [`Integrator::Suzuki4`] composes five such
//! steps into a fourth-order step.

use std::collections::HashMap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::lattice::{spin_population, ContinuumModelParams, Lattice};
use super::state::{MpsState, Sweep, Truncation};
use crate::bath::ChainBath;
use crate::discrete::TimeGrid;
use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian, C64};
use crate::pulse::PulseShape;
use crate::result::RunResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    /// Symmetric sweep, second order in `dt`.
    #[default]
    Trotter2,
    /// Fourth-order Suzuki composition of five second-order sweeps.
    Suzuki4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub dt: f64,
    pub chi_max: usize,
    /// Relative discarded weight tolerated per SVD.
    pub svd_threshold: f64,
    /// Local Fock dimension of every chain site.
    pub d_loc: usize,
    /// Half-width of the window; `None` picks `|τ|/2 + 5τ₀`.
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub integrator: Integrator,
    /// Record every `stride`-th step (the last step is always recorded).
    pub stride: usize,
    /// Abort when one step discards more than this weight.
    pub discarded_ceiling: f64,
}

impl EvolveConfig {
    /// `dt = 0.01`, `χ = 400`, `d_loc = 6`.
    pub fn full_scale() -> Self {
        EvolveConfig {
            dt: 0.01,
            chi_max: 400,
            svd_threshold: 1e-10,
            d_loc: 6,
            t_max: None,
            integrator: Integrator::Trotter2,
            stride: 10,
            discarded_ceiling: 1e-3,
        }
    }

    /// `dt = 0.05`, `χ = 64`, `d_loc = 4`.
    pub fn ci_scale() -> Self {
        EvolveConfig {
            dt: 0.05,
            chi_max: 64,
            d_loc: 4,
            stride: 4,
            ..Self::full_scale()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("mps.dt", "must be > 0"));
        }
        if self.chi_max < 2 {
            return Err(Error::invalid("mps.chi_max", "must be >= 2"));
        }
        if self.d_loc < 2 {
            return Err(Error::invalid("mps.d_loc", "must be >= 2"));
        }
        if !(self.svd_threshold >= 0.0) {
            return Err(Error::invalid("mps.svd_threshold", "must be >= 0"));
        }
        if self.stride == 0 {
            return Err(Error::invalid("mps.stride", "must be >= 1"));
        }
        if !(self.discarded_ceiling > 0.0) {
            return Err(Error::invalid("mps.discarded_ceiling", "must be > 0"));
        }
        Ok(())
    }

    pub fn truncation(&self) -> Truncation {
        Truncation {
            chi_max: self.chi_max,
            threshold: self.svd_threshold,
        }
    }

    pub fn grid(&self, pulse: &PulseShape) -> Result<TimeGrid> {
        crate::discrete::liouville::grid_for(Some(self.dt), self.t_max, pulse, self.dt)
    }
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self::ci_scale()
    }
}

/// Applies time steps to an [`MpsState`] on a fixed lattice.
#[derive(Debug, Clone)]
pub struct Propagator {
    lattice: Lattice,
    pulse: PulseShape,
    truncation: Truncation,
    integrator: Integrator,
    /// Gates of undriven bonds keyed by `(bond, τ bits)`.
    static_gates: HashMap<(usize, u64), Array2<C64>>,
}

impl Propagator {
    pub fn new(lattice: Lattice, pulse: PulseShape, cfg: &EvolveConfig) -> Self {
        Propagator {
            lattice,
            pulse,
            truncation: cfg.truncation(),
            integrator: cfg.integrator,
            static_gates: HashMap::new(),
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// `exp(-i h τ)` with entries that would change the charge set to zero.
    fn exact_gate(&self, bond: usize, tau: f64, wp: f64, ws: f64) -> Result<Array2<C64>> {
        let mut g = expm_hermitian(&self.lattice.bond_hamiltonian(bond, wp, ws), tau)?;
        let ql = self.lattice.local_charges(bond);
        let qr = self.lattice.local_charges(bond + 1);
        let q: Vec<i64> = ql
            .iter()
            .flat_map(|a| qr.iter().map(move |b| a + b))
            .collect();
        for ((i, j), z) in g.indexed_iter_mut() {
            if q[i] != q[j] {
                *z = C64::new(0.0, 0.0);
            }
        }
        Ok(g)
    }

    fn gate(&mut self, bond: usize, tau: f64, wp: f64, ws: f64) -> Result<Array2<C64>> {
        if self.lattice.is_driven(bond) {
            return self.exact_gate(bond, tau, wp, ws);
        }
        let key = (bond, tau.to_bits());
        if let Some(g) = self.static_gates.get(&key) {
            return Ok(g.clone());
        }
        let g = self.exact_gate(bond, tau, 0.0, 0.0)?;
        self.static_gates.insert(key, g.clone());
        Ok(g)
    }

    /// Second-order sweep from `t` to `t + tau`; returns the discarded weight.
    pub fn second_order(&mut self, state: &mut MpsState, t: f64, tau: f64) -> Result<f64> {
        let (wp, ws) = self.pulse.values(t + tau / 2.0);
        let last = self.lattice.bonds() - 1;
        let mut discarded = 0.0;
        for b in 0..last {
            let g = self.gate(b, tau / 2.0, wp, ws)?;
            discarded += state.apply_two_site(b, &g, Sweep::Right, self.truncation)?;
        }
        let g = self.gate(last, tau, wp, ws)?;
        discarded += state.apply_two_site(last, &g, Sweep::Left, self.truncation)?;
        for b in (0..last).rev() {
            let g = self.gate(b, tau / 2.0, wp, ws)?;
            discarded += state.apply_two_site(b, &g, Sweep::Left, self.truncation)?;
        }
        Ok(discarded)
    }

    /// Advance by `dt` from `t`; returns the weight discarded in this step.
    pub fn step(&mut self, state: &mut MpsState, t: f64, dt: f64) -> Result<f64> {
        match self.integrator {
            Integrator::Trotter2 => self.second_order(state, t, dt),
            Integrator::Suzuki4 => {
                let p = 1.0 / (4.0 - 4f64.powf(1.0 / 3.0));
                let mut t_sub = t;
                let mut discarded = 0.0;
                for f in [p, p, 1.0 - 4.0 * p, p, p] {
                    discarded += self.second_order(state, t_sub, f * dt)?;
                    t_sub += f * dt;
                }
                Ok(discarded)
            }
        }
    }

    /// `⟨H(t)⟩` at pulse amplitudes `(Ω_P, Ω_S)`, summed over bonds.
    pub fn energy(&self, state: &mut MpsState, wp: f64, ws: f64) -> Result<f64> {
        let mut e = 0.0;
        for b in 0..self.lattice.bonds() {
            e += state
                .bond_expectation(b, &self.lattice.bond_hamiltonian(b, wp, ws))?
                .re;
        }
        Ok(e)
    }
}

/// `(F₁, F₂)` of a lattice state.
pub fn spin_fidelities(lattice: &Lattice, state: &mut MpsState) -> Result<(f64, f64)> {
    let site = lattice.spin_site();
    let f1 = state.local_expectation(site, &spin_population(1))?;
    let f2 = state.local_expectation(site, &spin_population(2))?;
    Ok((f1, f2))
}

/// Initial lattice state: chain vacuum with the first qubit excited.
pub fn initial_state(lattice: &Lattice) -> Result<MpsState> {
    MpsState::product(&lattice.site_dims(), &lattice.initial_levels())
}

/// An in-progress time evolution that can be checkpointed between steps.
#[derive(Debug, Clone)]
pub struct TcmpsRun {
    pub(crate) propagator: Propagator,
    pub(crate) state: MpsState,
    pub(crate) grid: TimeGrid,
    pub(crate) cfg: EvolveConfig,
    pub(crate) next_step: usize,
    pub(crate) result: RunResult,
    pub(crate) max_step_discarded: f64,
    pub(crate) config_hash: [u8; 32],
}

impl TcmpsRun {
    pub fn new(
        params: &ContinuumModelParams,
        chain: &ChainBath,
        cfg: &EvolveConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let lattice = Lattice::new(params, chain, cfg.d_loc)?;
        let grid = cfg.grid(&params.pulse)?;
        let state = initial_state(&lattice)?;
        let mut run = TcmpsRun {
            propagator: Propagator::new(lattice, params.pulse, cfg),
            state,
            grid,
            cfg: cfg.clone(),
            next_step: 0,
            result: RunResult::new(),
            max_step_discarded: 0.0,
            config_hash: super::checkpoint::config_hash(params, chain, cfg)?,
        };
        run.record(0, 0.0)?;
        Ok(run)
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn steps_done(&self) -> usize {
        self.next_step
    }

    pub fn is_done(&self) -> bool {
        self.next_step >= self.grid.steps
    }

    pub fn state(&self) -> &MpsState {
        &self.state
    }

    pub fn lattice(&self) -> &Lattice {
        self.propagator.lattice()
    }

    pub fn result(&self) -> &RunResult {
        &self.result
    }

    fn record(&mut self, step: usize, step_discarded: f64) -> Result<()> {
        let lattice = self.propagator.lattice.clone();
        let (f1, f2) = spin_fidelities(&lattice, &mut self.state)?;
        self.result.times.push(self.grid.time(step));
        self.result.f1.push(f1);
        self.result.f2.push(f2);
        self.result
            .push_column_value("step_discarded", step_discarded);
        self.result
            .push_column_value("max_bond_dim", self.state.max_bond_dim() as f64);
        self.result.push_column_value("norm", self.state.norm());
        Ok(())
    }

    /// Take up to `n` steps.
    pub fn advance(&mut self, n: usize) -> Result<()> {
        let end = self.next_step.saturating_add(n).min(self.grid.steps);
        while self.next_step < end {
            let t = self.grid.time(self.next_step);
            let w = self.propagator.step(&mut self.state, t, self.grid.dt)?;
            self.next_step += 1;
            self.max_step_discarded = self.max_step_discarded.max(w);
            if w > self.cfg.discarded_ceiling {
                return Err(Error::TruncationBlowUp {
                    time: self.grid.time(self.next_step),
                    weight: w,
                    ceiling: self.cfg.discarded_ceiling,
                });
            }
            if self.next_step % self.cfg.stride == 0 || self.next_step == self.grid.steps {
                self.record(self.next_step, w)?;
            }
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<RunResult> {
        self.advance(usize::MAX)?;
        let max_bond = self
            .result
            .column("max_bond_dim")
            .unwrap_or(&[])
            .iter()
            .fold(1.0f64, |a, &b| a.max(b)) as usize;
        let d = &mut self.result.diagnostics;
        d.max_step_discarded_weight = Some(self.max_step_discarded);
        d.cumulative_discarded_weight = Some(self.state.cumulative_discarded);
        d.max_bond_dim = Some(max_bond);
        Ok(self.result)
    }
}

/// Evolve the continuum model over the full window.
pub fn evolve_tcmps(
    params: &ContinuumModelParams,
    chain: &ChainBath,
    cfg: &EvolveConfig,
) -> Result<RunResult> {
    TcmpsRun::new(params, chain, cfg)?.finish()
}
