//! Density matrices and thermal (Gibbs) state construction.

use ndarray::Array1;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, cr, CMatrix};

/// Acceptance tolerances for state invariants.
pub const TRACE_TOL: f64 = 1e-10;
pub const HERM_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue; absorbs integrator round-off without
/// masking real positivity violations.
pub const PSD_TOL: f64 = -1e-9;

/// Hermitian, unit-trace, positive-semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validate and wrap a matrix as a quantum state.
    pub fn new(mat: CMatrix) -> Result<Self> {
        let n = linalg::check_square(&mat)?;
        if n == 0 {
            return Err(Error::invalid("empty matrix"));
        }
        let tr = linalg::trace(&mat);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::NotAState(format!("trace = {tr} (expected 1)")));
        }
        let herm = linalg::max_nonhermiticity(&mat);
        if herm > HERM_TOL {
            return Err(Error::NotAState(format!(
                "non-Hermitian by {herm:.3e}"
            )));
        }
        let (vals, _) = linalg::hermitian_eig(&mat)?;
        if vals[0] < PSD_TOL {
            return Err(Error::NotAState(format!(
                "smallest eigenvalue {:.3e} < {PSD_TOL:.0e}",
                vals[0]
            )));
        }
        Ok(Self { mat })
    }

    /// Wrap without validation; for propagator inner loops that preserve
    /// the invariants by construction.
    pub(crate) fn new_unchecked(mat: CMatrix) -> Self {
        Self { mat }
    }

    /// Projector onto a (normalized) pure state vector.
    pub fn from_pure(psi: &Array1<C64>) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::invalid("zero state vector"));
        }
        let n = psi.len();
        let mut mat = CMatrix::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                mat[(i, j)] = psi[i] * psi[j].conj() / cr(norm * norm);
            }
        }
        Ok(Self { mat })
    }

    /// Maximally mixed state `I / N`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            mat: CMatrix::eye(n).mapv(|z| z / cr(n as f64)),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// `tr(rho^2)`, 1 for pure states.
    pub fn purity(&self) -> f64 {
        linalg::trace(&self.mat.dot(&self.mat)).re
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        linalg::hermitian_eig(&self.mat).map(|(v, _)| v[0]).unwrap_or(f64::NAN)
    }

    /// `<psi|rho|psi>` for a normalized pure state.
    pub fn pure_overlap(&self, psi: &Array1<C64>) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += psi[i].conj() * self.mat[(i, j)] * psi[j];
            }
        }
        acc.re
    }

    /// Trace distance `tr|rho - sigma| / 2`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        let diff = self.matrix() - other.matrix();
        let (vals, _) = linalg::hermitian_eig(&diff)?;
        Ok(vals.iter().map(|v| v.abs()).sum::<f64>() / 2.0)
    }
}

/// Inverse temperature, with zero temperature as a distinct token so the
/// paper-scale beta (dimensionless 5e28) stays exact instead of overflowing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    pub fn finite(b: f64) -> Result<Self> {
        if !b.is_finite() || b < 0.0 {
            return Err(Error::invalid(format!("beta must be finite and >= 0, got {b}")));
        }
        Ok(Beta::Finite(b))
    }
}

/// Gibbs state `exp(-beta H) / Z`, computed through the eigendecomposition
/// with a spectral shift (ground energy subtracted before exponentiating) so
/// arbitrarily large beta cannot overflow. `Beta::Infinite` returns the
/// ground-state projector and errors on a degenerate ground level.
pub fn thermal_state(h: &CMatrix, beta: Beta) -> Result<DensityMatrix> {
    let n = linalg::check_square(h)?;
    linalg::check_finite(h)?;
    if linalg::max_nonhermiticity(h) > 1e-10 * linalg::max_abs(h).max(1.0) {
        return Err(Error::invalid("thermal_state: Hamiltonian is not Hermitian"));
    }
    let (vals, vecs) = linalg::hermitian_eig(h)?;
    let ground = vals[0];
    let weights: Vec<f64> = match beta {
        Beta::Finite(b) => vals.iter().map(|&e| (-b * (e - ground)).exp()).collect(),
        Beta::Infinite => {
            let gap = vals.get(1).map(|&e1| e1 - ground).unwrap_or(f64::INFINITY);
            if gap <= 1e-12 {
                return Err(Error::invalid(format!(
                    "thermal_state: ground level degenerate at beta = inf (gap {gap:.3e})"
                )));
            }
            let mut w = vec![0.0; n];
            w[0] = 1.0;
            w
        }
    };
    let z: f64 = weights.iter().sum();
    let mut d = CMatrix::zeros((n, n));
    for (k, w) in weights.iter().enumerate() {
        d[(k, k)] = cr(w / z);
    }
    let mat = vecs.dot(&d).dot(&linalg::dagger(&vecs));
    DensityMatrix::new(mat)
}
