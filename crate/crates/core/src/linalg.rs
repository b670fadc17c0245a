//! Small dense complex helpers shared by both models.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::Result;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity(d: usize) -> Array2<C64> {
    Array2::eye(d)
}

/// Bosonic annihilation operator on the Fock space `{0, .., d-1}`.
pub fn annihilation(d: usize) -> Array2<C64> {
    let mut a = Array2::zeros((d, d));
    for n in 1..d {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn number(d: usize) -> Array2<C64> {
    Array2::from_diag(&Array1::from_shape_fn(d, |n| C64::new(n as f64, 0.0)))
}

/// Spin lowering `|0⟩⟨1|` with `|0⟩` ground and `|1⟩` excited.
pub fn sigma_minus() -> Array2<C64> {
    annihilation(2)
}

pub fn sigma_plus() -> Array2<C64> {
    dagger(&sigma_minus())
}

/// `σ^z = |1⟩⟨1| - |0⟩⟨0|`.
pub fn sigma_z() -> Array2<C64> {
    Array2::from_diag(&Array1::from(vec![-ONE, ONE]))
}

pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, leftmost most significant.
pub fn kron_all(factors: &[Array2<C64>]) -> Array2<C64> {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| kron(&acc, f))
}

pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_defect(a: &Array2<C64>) -> f64 {
    max_abs_diff(a, &dagger(a))
}

pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().sum()
}

/// `exp(-i h t)` for Hermitian `h`, via its eigendecomposition.
pub fn expm_hermitian(h: &Array2<C64>, t: f64) -> Result<Array2<C64>> {
    let (evals, evecs) = h.eigh(UPLO::Upper)?;
    let phases = evals.mapv(|e| C64::from_polar(1.0, -e * t));
    let scaled = &evecs * &phases.insert_axis(ndarray::Axis(0));
    Ok(scaled.dot(&dagger(&evecs)))
}
