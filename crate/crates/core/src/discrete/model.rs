//! Operators, Hamiltonian and initial state of the five-site discrete model.
//!
//! Tensor order is `q₁ ⊗ a₁ ⊗ m ⊗ a₂ ⊗ q₂` with `q₁` the most significant
//! factor. Spins use `|0⟩` = ground, `|1⟩` = excited; modes are truncated to
//! Fock levels `0..=n_max`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dagger, kron_all, C64, ONE, ZERO};
use crate::pulse::PulseShape;

pub const Q1: usize = 0;
pub const A1: usize = 1;
pub const M: usize = 2;
pub const A2: usize = 3;
pub const Q2: usize = 4;

/// Reference frame of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Interaction picture with respect to `ω_m · N_tot`; only detunings remain.
    #[default]
    Rotating,
    /// Bare energies kept as written.
    Lab,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteModelParams {
    pub omega_q1: f64,
    pub omega_q2: f64,
    pub omega_a1: f64,
    pub omega_a2: f64,
    pub omega_m: f64,
    pub g: f64,
    pub pulse: PulseShape,
    pub temperature: f64,
    pub n_max: usize,
    pub frame: Frame,
}

impl Default for DiscreteModelParams {
    fn default() -> Self {
        DiscreteModelParams::resonant(1.0, 10.0, PulseShape::default(), 0.0)
    }
}

impl DiscreteModelParams {
    /// All five frequencies equal to `omega`, `n_max = 2`, rotating frame.
    pub fn resonant(omega: f64, g: f64, pulse: PulseShape, temperature: f64) -> Self {
        DiscreteModelParams {
            omega_q1: omega,
            omega_q2: omega,
            omega_a1: omega,
            omega_a2: omega,
            omega_m: omega,
            g,
            pulse,
            temperature,
            n_max: 2,
            frame: Frame::Rotating,
        }
    }

    pub fn is_resonant(&self) -> bool {
        let w = self.omega_m;
        [self.omega_q1, self.omega_q2, self.omega_a1, self.omega_a2]
            .iter()
            .all(|&x| x == w)
    }

    pub fn validate(&self) -> Result<()> {
        self.pulse.validate()?;
        if self.n_max < 2 {
            return Err(Error::invalid(
                "n_max",
                "must be >= 2 so the two-excitation sector is not clipped",
            ));
        }
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(Error::invalid("temperature", "must be >= 0"));
        }
        if !self.g.is_finite() {
            return Err(Error::invalid("g", "must be finite"));
        }
        for (key, w) in [
            ("omega_q1", self.omega_q1),
            ("omega_q2", self.omega_q2),
            ("omega_a1", self.omega_a1),
            ("omega_a2", self.omega_a2),
            ("omega_m", self.omega_m),
        ] {
            if !w.is_finite() {
                return Err(Error::invalid(key, "must be finite"));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> DiscreteSpace {
        DiscreteSpace { n_max: self.n_max }
    }
}

/// Index arithmetic for the product basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscreteSpace {
    pub n_max: usize,
}

impl DiscreteSpace {
    pub fn dims(&self) -> [usize; 5] {
        let b = self.n_max + 1;
        [2, b, 2, b, 2]
    }

    pub fn dim(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn index(&self, levels: [usize; 5]) -> usize {
        self.dims()
            .iter()
            .zip(levels)
            .fold(0, |acc, (&d, l)| acc * d + l)
    }

    pub fn levels(&self, mut index: usize) -> [usize; 5] {
        let dims = self.dims();
        let mut out = [0; 5];
        for site in (0..5).rev() {
            out[site] = index % dims[site];
            index /= dims[site];
        }
        out
    }

    /// Total excitation count of a basis state.
    pub fn excitations(&self, index: usize) -> usize {
        self.levels(index).iter().sum()
    }

    /// Embed a single-site operator at `site`.
    pub fn embed(&self, op: &Array2<C64>, site: usize) -> Array2<C64> {
        let factors: Vec<Array2<C64>> = self
            .dims()
            .iter()
            .enumerate()
            .map(|(s, &d)| {
                if s == site {
                    op.clone()
                } else {
                    linalg::identity(d)
                }
            })
            .collect();
        kron_all(&factors)
    }

    fn lowering(&self, site: usize) -> Array2<C64> {
        self.embed(&linalg::annihilation(self.dims()[site]), site)
    }

    /// `N_tot = Σ (σ^z + 1)/2 + Σ a†a`.
    pub fn excitation_operator(&self) -> Array2<C64> {
        let diag = (0..self.dim()).map(|k| C64::new(self.excitations(k) as f64, 0.0));
        Array2::from_diag(&ndarray::Array1::from_iter(diag))
    }

    /// Projector onto the excited state of qubit `site`.
    pub fn excited_projector(&self, site: usize) -> Array2<C64> {
        let mut p = Array2::zeros((2, 2));
        p[[1, 1]] = ONE;
        self.embed(&p, site)
    }
}

/// Square complex matrix over a tensor-product space with known factor dims.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub dims: Vec<usize>,
    pub matrix: Array2<C64>,
}

impl DenseOperator {
    pub fn new(dims: Vec<usize>, matrix: Array2<C64>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if matrix.dim() != (d, d) {
            return Err(Error::invalid(
                "matrix",
                format!(
                    "shape {:?} does not match factor dims {:?}",
                    matrix.dim(),
                    dims
                ),
            ));
        }
        Ok(DenseOperator { dims, matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.matrix)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= 1e-12
    }

    /// Reduced operator on one tensor factor.
    pub fn partial_trace_keep(&self, site: usize) -> Array2<C64> {
        let d = self.dims[site];
        let inner: usize = self.dims[site + 1..].iter().product();
        let outer: usize = self.dims[..site].iter().product();
        let mut out = Array2::zeros((d, d));
        for o in 0..outer {
            for i in 0..inner {
                for a in 0..d {
                    for b in 0..d {
                        let r = (o * d + a) * inner + i;
                        let c = (o * d + b) * inner + i;
                        out[[a, b]] += self.matrix[[r, c]];
                    }
                }
            }
        }
        out
    }
}

/// A validated density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(DenseOperator);

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-10;
    pub const EIGEN_TOL: f64 = -1e-8;

    pub fn new(op: DenseOperator) -> Result<Self> {
        let tr = linalg::trace(&op.matrix);
        if (tr - ONE).norm() > Self::TRACE_TOL {
            return Err(Error::invalid("density_matrix", format!("trace {tr} != 1")));
        }
        if op.hermiticity_defect() > 1e-12 {
            return Err(Error::invalid("density_matrix", "not Hermitian"));
        }
        let rho = DensityMatrix(op);
        if rho.min_eigenvalue()? < Self::EIGEN_TOL {
            return Err(Error::invalid(
                "density_matrix",
                "not positive semidefinite",
            ));
        }
        Ok(rho)
    }

    pub(crate) fn new_unchecked(op: DenseOperator) -> Self {
        DensityMatrix(op)
    }

    pub fn operator(&self) -> &DenseOperator {
        &self.0
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.0.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.0.matrix).re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        use ndarray_linalg::EigValsh;
        Ok(self
            .0
            .matrix
            .eigvalsh(ndarray_linalg::UPLO::Upper)?
            .to_vec())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }

    pub fn expectation(&self, op: &Array2<C64>) -> C64 {
        linalg::trace(&self.0.matrix.dot(op))
    }

    /// Maximally mixed state on the given factor dims.
    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        let m = Array2::eye(d).mapv(|z: C64| z / d as f64);
        DensityMatrix(DenseOperator { dims, matrix: m })
    }

    /// `w·self + (1-w)·other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<DensityMatrix> {
        if self.0.dims != other.0.dims {
            return Err(Error::invalid(
                "density_matrix",
                "mixing states of different spaces",
            ));
        }
        let m = self.matrix().mapv(|z| z * w) + other.matrix().mapv(|z| z * (1.0 - w));
        DensityMatrix::new(DenseOperator::new(self.0.dims.clone(), m)?)
    }
}

/// Boltzmann weights `(p_ground, p_excited)` of a two-level system.
pub fn thermal_weights(omega: f64, temperature: f64) -> Result<(f64, f64)> {
    if temperature.is_nan() || temperature < 0.0 {
        return Err(Error::invalid("temperature", "must be >= 0"));
    }
    if temperature == 0.0 {
        // pure ground state for ω > 0; degenerate levels stay equally mixed
        return Ok(if omega > 0.0 {
            (1.0, 0.0)
        } else if omega == 0.0 {
            (0.5, 0.5)
        } else {
            (0.0, 1.0)
        });
    }
    let excited = 1.0 / (1.0 + (omega / temperature).exp());
    Ok((1.0 - excited, excited))
}

pub fn thermal_spin_state(omega_m: f64, temperature: f64) -> Result<DensityMatrix> {
    let (p0, p1) = thermal_weights(omega_m, temperature)?;
    let mut m = Array2::zeros((2, 2));
    m[[0, 0]] = C64::new(p0, 0.0);
    m[[1, 1]] = C64::new(p1, 0.0);
    Ok(DensityMatrix::new_unchecked(DenseOperator {
        dims: vec![2],
        matrix: m,
    }))
}

fn projector(d: usize, level: usize) -> Array2<C64> {
    let mut p = Array2::zeros((d, d));
    p[[level, level]] = ONE;
    p
}

/// `|1⟩⟨1| ⊗ |0⟩⟨0| ⊗ ρ^m ⊗ |0⟩⟨0| ⊗ |0⟩⟨0|`.
pub fn initial_state(params: &DiscreteModelParams) -> Result<DensityMatrix> {
    params.validate()?;
    let space = params.space();
    let dims = space.dims();
    let rho_m = thermal_spin_state(params.omega_m, params.temperature)?;
    let factors = [
        projector(2, 1),
        projector(dims[A1], 0),
        rho_m.matrix().clone(),
        projector(dims[A2], 0),
        projector(2, 0),
    ];
    Ok(DensityMatrix::new_unchecked(DenseOperator {
        dims: dims.to_vec(),
        matrix: kron_all(&factors),
    }))
}

/// `H(t) = H₀ + Ω_P(t) V_P + Ω_S(t) V_S`, split so the time dependence is a
/// pair of scalar envelopes.
#[derive(Debug, Clone)]
pub struct HamiltonianParts {
    pub space: DiscreteSpace,
    pub static_part: Array2<C64>,
    pub pump_part: Array2<C64>,
    pub stokes_part: Array2<C64>,
    pub pulse: PulseShape,
}

impl HamiltonianParts {
    pub fn new(params: &DiscreteModelParams) -> Result<Self> {
        params.validate()?;
        let space = params.space();
        let sz = linalg::sigma_z();
        let a1 = space.lowering(A1);
        let a2 = space.lowering(A2);
        let sm = |site| space.embed(&linalg::sigma_minus(), site);
        let num = |a: &Array2<C64>| dagger(a).dot(a);

        let shift = match params.frame {
            Frame::Rotating => params.omega_m,
            Frame::Lab => 0.0,
        };
        let mut h0: Array2<C64> = Array2::zeros((space.dim(), space.dim()));
        for (site, w) in [
            (Q1, params.omega_q1),
            (M, params.omega_m),
            (Q2, params.omega_q2),
        ] {
            let w = w - shift;
            if w != 0.0 {
                h0 = h0 + space.embed(&sz, site).mapv(|z| z * (w / 2.0));
            }
        }
        for (a, w) in [(&a1, params.omega_a1), (&a2, params.omega_a2)] {
            let w = w - shift;
            if w != 0.0 {
                h0 = h0 + num(a).mapv(|z| z * w);
            }
        }
        // explicit hermitian-conjugate pairs
        let pair = |x: Array2<C64>| &x + &dagger(&x);
        let sm_m = sm(M);
        let g_part = pair(dagger(&a1).dot(&sm_m)) + pair(dagger(&a2).dot(&sm_m));
        h0 = h0 + g_part.mapv(|z| z * params.g);

        let pump_part = pair(dagger(&a1).dot(&sm(Q1)));
        let stokes_part = pair(dagger(&a2).dot(&sm(Q2)));
        Ok(HamiltonianParts {
            space,
            static_part: h0,
            pump_part,
            stokes_part,
            pulse: params.pulse,
        })
    }

    pub fn at(&self, t: f64) -> Array2<C64> {
        let (wp, ws) = self.pulse.values(t);
        combine(
            &self.static_part,
            &self.pump_part,
            &self.stokes_part,
            wp,
            ws,
        )
    }
}

pub(crate) fn combine(
    h0: &Array2<C64>,
    vp: &Array2<C64>,
    vs: &Array2<C64>,
    wp: f64,
    ws: f64,
) -> Array2<C64> {
    let mut h = h0.clone();
    h.zip_mut_with(vp, |x, &y| *x += y * wp);
    h.zip_mut_with(vs, |x, &y| *x += y * ws);
    h
}

pub fn build_hamiltonian(params: &DiscreteModelParams, t: f64) -> Result<DenseOperator> {
    let parts = HamiltonianParts::new(params)?;
    Ok(DenseOperator {
        dims: parts.space.dims().to_vec(),
        matrix: parts.at(t),
    })
}

/// True when `h` has no element coupling different excitation sectors.
pub fn conserves_excitations(space: &DiscreteSpace, h: &Array2<C64>) -> bool {
    h.indexed_iter()
        .all(|((r, c), z)| *z == ZERO || space.excitations(r) == space.excitations(c))
}
