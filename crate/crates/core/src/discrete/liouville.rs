//! Fixed-step integration of `dρ/dt = -i[H(t), ρ]` for the discrete model.
//!
//! `H(t)` never couples different total-excitation sectors, so `ρ` is
//! propagated as the set of its nonzero sector blocks `ρ_{NM}`, each obeying
//! `dρ_{NM}/dt = -i(H_N ρ_{NM} - ρ_{NM} H_M)`. Blocks that start at zero stay
//! zero; the remaining arithmetic is exactly that of the dense equation.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::model::{
    combine, initial_state, thermal_weights, DenseOperator, DensityMatrix, DiscreteModelParams,
    DiscreteSpace, HamiltonianParts, A1, A2, Q1, Q2,
};
use crate::error::{Error, Result};
use crate::linalg::{C64, I, ZERO};
use crate::pulse::PulseShape;
use crate::result::RunResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Rk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    /// Step size; `None` picks `min(τ₀, 1/g, 1/Ω)/200`.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Half-width of the window; `None` picks `|τ|/2 + 5τ₀`.
    #[serde(default)]
    pub t_max: Option<f64>,
    /// Record every `stride`-th step (the last step is always recorded).
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub method: Method,
    /// Ceiling on trace and excitation drift before a run is declared diverged.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_stride() -> usize {
    1
}

fn default_tolerance() -> f64 {
    1e-8
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: None,
            t_max: None,
            stride: default_stride(),
            method: Method::Rk4,
            tolerance: default_tolerance(),
        }
    }
}

/// Hermiticity drift ceiling; tighter than the trace tolerance since RK4
/// preserves it to round-off.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Concrete time grid derived from an [`IntegratorConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn time(&self, step: usize) -> f64 {
        self.t_start + step as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.steps)
    }
}

impl IntegratorConfig {
    pub fn with_dt(dt: f64) -> Self {
        IntegratorConfig {
            dt: Some(dt),
            ..Default::default()
        }
    }

    pub fn default_dt(params: &DiscreteModelParams) -> f64 {
        let inv = |x: f64| if x > 0.0 { 1.0 / x } else { f64::INFINITY };
        params
            .pulse
            .width
            .min(inv(params.g.abs()))
            .min(inv(params.pulse.amplitude))
            / 200.0
    }

    /// Resolve defaults; the step is shrunk so the grid lands on `±t_max`.
    pub fn grid(&self, params: &DiscreteModelParams) -> Result<TimeGrid> {
        grid_for(self.dt, self.t_max, &params.pulse, Self::default_dt(params))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::invalid("integrator.dt", "must be > 0"));
            }
        }
        if self.stride == 0 {
            return Err(Error::invalid("integrator.stride", "must be >= 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("integrator.tolerance", "must be > 0"));
        }
        Ok(())
    }
}

pub(crate) fn grid_for(
    dt: Option<f64>,
    t_max: Option<f64>,
    pulse: &PulseShape,
    default_dt: f64,
) -> Result<TimeGrid> {
    let window = pulse.default_window();
    let t_max = t_max.unwrap_or(window);
    if t_max < window * (1.0 - 1e-12) {
        return Err(Error::invalid(
            "integrator.t_max",
            format!("must be >= |tau|/2 + 5 tau0 = {window}"),
        ));
    }
    let dt = dt.unwrap_or(default_dt);
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("integrator.dt", "must be > 0"));
    }
    let steps = ((2.0 * t_max / dt) - 1e-9).ceil().max(1.0) as usize;
    Ok(TimeGrid {
        t_start: -t_max,
        dt: 2.0 * t_max / steps as f64,
        steps,
    })
}

/// One sector of the block-diagonal Hamiltonian.
#[derive(Debug, Clone)]
struct Sector {
    indices: Vec<usize>,
    h0: Array2<C64>,
    vp: Array2<C64>,
    vs: Array2<C64>,
}

impl Sector {
    fn at(&self, wp: f64, ws: f64) -> Array2<C64> {
        combine(&self.h0, &self.vp, &self.vs, wp, ws)
    }
}

fn submatrix(m: &Array2<C64>, rows: &[usize], cols: &[usize]) -> Array2<C64> {
    Array2::from_shape_fn((rows.len(), cols.len()), |(r, c)| m[[rows[r], cols[c]]])
}

/// Density-matrix propagator over the excitation-sector blocks.
#[derive(Debug, Clone)]
pub struct LiouvilleEngine {
    space: DiscreteSpace,
    pulse: PulseShape,
    sectors: Vec<Sector>,
    /// `(N, M) -> ρ_{NM}` for every block that is nonzero initially.
    blocks: BTreeMap<(usize, usize), Array2<C64>>,
}

impl LiouvilleEngine {
    pub fn new(params: &DiscreteModelParams, rho0: &DensityMatrix) -> Result<Self> {
        let parts = HamiltonianParts::new(params)?;
        let space = parts.space;
        if rho0.operator().dims != space.dims().to_vec() {
            return Err(Error::invalid(
                "initial_state",
                "dimension does not match n_max",
            ));
        }
        let max_n = (0..space.dim())
            .map(|k| space.excitations(k))
            .max()
            .unwrap_or(0);
        let mut members = vec![Vec::new(); max_n + 1];
        for k in 0..space.dim() {
            members[space.excitations(k)].push(k);
        }
        let sectors: Vec<Sector> = members
            .into_iter()
            .map(|idx| Sector {
                h0: submatrix(&parts.static_part, &idx, &idx),
                vp: submatrix(&parts.pump_part, &idx, &idx),
                vs: submatrix(&parts.stokes_part, &idx, &idx),
                indices: idx,
            })
            .collect();
        let mut blocks = BTreeMap::new();
        for (n, sn) in sectors.iter().enumerate() {
            for (m, sm) in sectors.iter().enumerate() {
                let b = submatrix(rho0.matrix(), &sn.indices, &sm.indices);
                if b.iter().any(|z| *z != ZERO) {
                    blocks.insert((n, m), b);
                }
            }
        }
        Ok(LiouvilleEngine {
            space,
            pulse: params.pulse,
            sectors,
            blocks,
        })
    }

    fn derivative(
        &self,
        hs: &[Array2<C64>],
        state: &BTreeMap<(usize, usize), Array2<C64>>,
    ) -> BTreeMap<(usize, usize), Array2<C64>> {
        state
            .iter()
            .map(|(&(n, m), x)| {
                let d = hs[n].dot(x) - x.dot(&hs[m]);
                ((n, m), d.mapv(|z| -I * z))
            })
            .collect()
    }

    fn sector_hamiltonians(&self, t: f64) -> Vec<Array2<C64>> {
        let (wp, ws) = self.pulse.values(t);
        self.sectors.iter().map(|s| s.at(wp, ws)).collect()
    }

    /// One classical RK4 step from `t` to `t + dt`.
    pub fn step(&mut self, t: f64, dt: f64) {
        let h_start = self.sector_hamiltonians(t);
        let h_mid = self.sector_hamiltonians(t + dt / 2.0);
        let h_end = self.sector_hamiltonians(t + dt);
        let axpy = |base: &BTreeMap<(usize, usize), Array2<C64>>,
                    k: &BTreeMap<(usize, usize), Array2<C64>>,
                    c: f64| {
            base.iter()
                .map(|(key, x)| (*key, x + &k[key].mapv(|z| z * c)))
                .collect::<BTreeMap<_, _>>()
        };
        let k1 = self.derivative(&h_start, &self.blocks);
        let k2 = self.derivative(&h_mid, &axpy(&self.blocks, &k1, dt / 2.0));
        let k3 = self.derivative(&h_mid, &axpy(&self.blocks, &k2, dt / 2.0));
        let k4 = self.derivative(&h_end, &axpy(&self.blocks, &k3, dt));
        for (key, x) in self.blocks.iter_mut() {
            let inc = &k1[key] + &k2[key].mapv(|z| z * 2.0) + &k3[key].mapv(|z| z * 2.0) + &k4[key];
            *x = &*x + &inc.mapv(|z| z * (dt / 6.0));
        }
    }

    fn diagonal_sum(&self, mut weight: impl FnMut(usize) -> f64) -> f64 {
        let mut acc = 0.0;
        for (&(n, m), x) in &self.blocks {
            if n != m {
                continue;
            }
            for (local, &k) in self.sectors[n].indices.iter().enumerate() {
                let w = weight(k);
                if w != 0.0 {
                    acc += w * x[[local, local]].re;
                }
            }
        }
        acc
    }

    pub fn trace(&self) -> f64 {
        self.diagonal_sum(|_| 1.0)
    }

    /// `(F₁, F₂)` read off the diagonal, equal to the reduced-qubit populations.
    pub fn fidelities(&self) -> (f64, f64) {
        let space = self.space;
        let f1 = self.diagonal_sum(|k| (space.levels(k)[Q1] == 1) as u8 as f64);
        let f2 = self.diagonal_sum(|k| (space.levels(k)[Q2] == 1) as u8 as f64);
        (f1, f2)
    }

    pub fn excitation_expectation(&self) -> f64 {
        let space = self.space;
        self.diagonal_sum(|k| space.excitations(k) as f64)
    }

    /// Population of Fock levels above two in either mode.
    pub fn fock_leakage(&self) -> f64 {
        let space = self.space;
        self.diagonal_sum(|k| {
            let l = space.levels(k);
            (l[A1] > 2 || l[A2] > 2) as u8 as f64
        })
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (&(n, m), x) in &self.blocks {
            let partner = self.blocks.get(&(m, n));
            for ((r, c), z) in x.indexed_iter() {
                let mirror = partner.map_or(ZERO, |p| p[[c, r]]);
                worst = worst.max((z - mirror.conj()).norm());
            }
        }
        worst
    }

    /// Reassemble the full dense density matrix.
    pub fn density_matrix(&self) -> DensityMatrix {
        let d = self.space.dim();
        let mut rho = Array2::zeros((d, d));
        for (&(n, m), x) in &self.blocks {
            for (r, &gr) in self.sectors[n].indices.iter().enumerate() {
                for (c, &gc) in self.sectors[m].indices.iter().enumerate() {
                    rho[[gr, gc]] = x[[r, c]];
                }
            }
        }
        DensityMatrix::new_unchecked(DenseOperator {
            dims: self.space.dims().to_vec(),
            matrix: rho,
        })
    }
}

/// Evolve the initial state of the model across the full window.
pub fn evolve(params: &DiscreteModelParams, cfg: &IntegratorConfig) -> Result<RunResult> {
    let rho0 = initial_state(params)?;
    evolve_from(params, cfg, &rho0)
}

/// Evolve an arbitrary initial density matrix.
pub fn evolve_from(
    params: &DiscreteModelParams,
    cfg: &IntegratorConfig,
    rho0: &DensityMatrix,
) -> Result<RunResult> {
    evolve_with_states(params, cfg, rho0, |_, _| {}).map(|(r, _)| r)
}

/// As [`evolve_from`], also calling `observe(t, ρ(t))` at every recorded sample
/// and returning the final state.
pub fn evolve_with_states(
    params: &DiscreteModelParams,
    cfg: &IntegratorConfig,
    rho0: &DensityMatrix,
    mut observe: impl FnMut(f64, &DensityMatrix),
) -> Result<(RunResult, DensityMatrix)> {
    cfg.validate()?;
    let grid = cfg.grid(params)?;
    let mut engine = LiouvilleEngine::new(params, rho0)?;
    let trace0 = engine.trace();
    let exc0 = engine.excitation_expectation();
    let mut out = RunResult::new();
    let mut worst = (0.0f64, 0.0f64, 0.0f64, 0.0f64);

    let mut record = |engine: &LiouvilleEngine, step: usize, out: &mut RunResult| -> Result<()> {
        let t = grid.time(step);
        let (f1, f2) = engine.fidelities();
        let trace_drift = (engine.trace() - trace0).abs();
        let herm = engine.hermiticity_defect();
        let exc_drift = (engine.excitation_expectation() - exc0).abs();
        let leak = engine.fock_leakage();
        worst.0 = worst.0.max(trace_drift);
        worst.1 = worst.1.max(herm);
        worst.2 = worst.2.max(exc_drift);
        worst.3 = worst.3.max(leak);
        out.times.push(t);
        out.f1.push(f1);
        out.f2.push(f2);
        out.push_column_value("trace_drift", trace_drift);
        out.push_column_value("hermiticity_drift", herm);
        out.push_column_value("excitation_drift", exc_drift);
        for (quantity, drift, tol) in [
            ("trace", trace_drift, cfg.tolerance),
            ("excitation", exc_drift, cfg.tolerance),
            ("hermiticity", herm, HERMITICITY_TOL),
        ] {
            if !(drift <= tol) {
                return Err(Error::Diverged {
                    time: t,
                    quantity,
                    drift,
                    tolerance: tol,
                });
            }
        }
        Ok(())
    };

    record(&engine, 0, &mut out)?;
    observe(grid.time(0), &engine.density_matrix());
    for step in 0..grid.steps {
        engine.step(grid.time(step), grid.dt);
        let done = step + 1;
        if done % cfg.stride == 0 || done == grid.steps {
            record(&engine, done, &mut out)?;
            observe(grid.time(done), &engine.density_matrix());
        }
    }
    out.diagnostics.trace_drift = Some(worst.0);
    out.diagnostics.hermiticity_drift = Some(worst.1);
    out.diagnostics.excitation_drift = Some(worst.2);
    out.diagnostics.fock_leakage = Some(worst.3);
    Ok((out, engine.density_matrix()))
}

/// `F_i = ⟨1|Tr_{¬q_i} ρ|1⟩` for each state of a sequence.
pub fn fidelity_traces(states: &[DensityMatrix]) -> (Vec<f64>, Vec<f64>) {
    states
        .iter()
        .map(|rho| {
            let q1 = rho.operator().partial_trace_keep(Q1);
            let q2 = rho.operator().partial_trace_keep(Q2);
            (q1[[1, 1]].re, q2[[1, 1]].re)
        })
        .unzip()
}

/// Independent reference path: the initial state is a two-term diagonal
/// mixture over the intermediate spin, so each branch is evolved as a pure
/// state under the Schrödinger equation and the populations are mixed with the
/// Boltzmann weights.
pub fn mixture_oracle(params: &DiscreteModelParams, cfg: &IntegratorConfig) -> Result<RunResult> {
    cfg.validate()?;
    let grid = cfg.grid(params)?;
    let parts = HamiltonianParts::new(params)?;
    let space = parts.space;
    let (p0, p1) = thermal_weights(params.omega_m, params.temperature)?;
    let branches: Vec<(f64, Array1<C64>)> = [(p0, 0usize), (p1, 1usize)]
        .into_iter()
        .filter(|(w, _)| *w > 0.0)
        .map(|(w, m)| {
            let mut psi = Array1::zeros(space.dim());
            psi[space.index([1, 0, m, 0, 0])] = C64::new(1.0, 0.0);
            (w, psi)
        })
        .collect();
    let n_op: Vec<f64> = (0..space.dim())
        .map(|k| space.excitations(k) as f64)
        .collect();
    let q1_mask: Vec<bool> = (0..space.dim()).map(|k| space.levels(k)[Q1] == 1).collect();
    let q2_mask: Vec<bool> = (0..space.dim()).map(|k| space.levels(k)[Q2] == 1).collect();

    let observe = |branches: &[(f64, Array1<C64>)]| {
        let mut f1 = 0.0;
        let mut f2 = 0.0;
        let mut norm = 0.0;
        let mut exc = 0.0;
        for (w, psi) in branches {
            for (k, z) in psi.iter().enumerate() {
                let p = w * z.norm_sqr();
                norm += p;
                exc += p * n_op[k];
                if q1_mask[k] {
                    f1 += p;
                }
                if q2_mask[k] {
                    f2 += p;
                }
            }
        }
        (f1, f2, norm, exc)
    };

    let mut branches = branches;
    let mut out = RunResult::new();
    let (f1, f2, norm0, exc0) = observe(&branches);
    out.times.push(grid.time(0));
    out.f1.push(f1);
    out.f2.push(f2);
    let mut worst_norm: f64 = 0.0;
    let mut worst_exc: f64 = 0.0;
    let rhs = |h: &Array2<C64>, psi: &Array1<C64>| h.dot(psi).mapv(|z| -I * z);
    for step in 0..grid.steps {
        let t = grid.time(step);
        let dt = grid.dt;
        let h_start = parts.at(t);
        let h_mid = parts.at(t + dt / 2.0);
        let h_end = parts.at(t + dt);
        for (_, psi) in branches.iter_mut() {
            let k1 = rhs(&h_start, psi);
            let k2 = rhs(&h_mid, &(&*psi + &k1.mapv(|z| z * (dt / 2.0))));
            let k3 = rhs(&h_mid, &(&*psi + &k2.mapv(|z| z * (dt / 2.0))));
            let k4 = rhs(&h_end, &(&*psi + &k3.mapv(|z| z * dt)));
            let inc = &k1 + &k2.mapv(|z| z * 2.0) + &k3.mapv(|z| z * 2.0) + &k4;
            *psi = &*psi + &inc.mapv(|z| z * (dt / 6.0));
        }
        let done = step + 1;
        if done % cfg.stride == 0 || done == grid.steps {
            let (f1, f2, norm, exc) = observe(&branches);
            let t = grid.time(done);
            worst_norm = worst_norm.max((norm - norm0).abs());
            worst_exc = worst_exc.max((exc - exc0).abs());
            if !(worst_norm <= cfg.tolerance) {
                return Err(Error::Diverged {
                    time: t,
                    quantity: "norm",
                    drift: worst_norm,
                    tolerance: cfg.tolerance,
                });
            }
            out.times.push(t);
            out.f1.push(f1);
            out.f2.push(f2);
        }
    }
    out.diagnostics.trace_drift = Some(worst_norm);
    out.diagnostics.excitation_drift = Some(worst_exc);
    Ok(out)
}
