//! Simulated single-qubit projective measurement in the x, y, z bases with
//! finite shots, Stokes-parameter estimation, and state reconstruction.
//!
//! Analysis-rotation convention: the x measurement applies
//! `U_x = exp(+i pi sigma_y / 4)` and the y measurement
//! `U_y = exp(-i pi sigma_x / 4)`, mapping the requested axis onto z so that
//! the excited-state population of the rotated state gives
//! `P_e^i = (1 + <sigma_i>) / 2`. These are the carrier-pulse rotations of
//! the experiment's tomography steps; the exact-probability round trip pins
//! any residual sign freedom.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{bloch_coeffs, pauli, su_generators, BlochCoefficients};
use crate::linalg::{ci, dagger, matrix_exponential, CMatrix};
use crate::states::DensityMatrix;

/// Measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn label(&self) -> &'static str {
        match self {
            Basis::X => "x",
            Basis::Y => "y",
            Basis::Z => "z",
        }
    }
}

/// Shot budget: finite counts or the infinite-shot token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, rename_all = "lowercase")]
pub enum Shots {
    Finite(u64),
    Exact(ExactToken),
}

/// Serde helper so `"exact"` parses as the token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactToken {
    Exact,
}

pub const EXACT: Shots = Shots::Exact(ExactToken::Exact);

/// One basis measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub basis: Basis,
    /// Shot count; zero marks an exact (infinite-shot) record.
    pub shots: u64,
    pub excited_counts: u64,
    pub seed: u64,
    /// Estimated excited population; exact probability when `shots == 0`.
    pub p_hat: f64,
}

/// Analysis rotation mapping `basis` onto z.
fn analysis_rotation(basis: Basis) -> CMatrix {
    let [sx, sy, _] = pauli();
    match basis {
        Basis::X => {
            matrix_exponential(&sy.mapv(|z| z * ci(std::f64::consts::PI / 4.0))).expect("unitary")
        }
        Basis::Y => {
            matrix_exponential(&sx.mapv(|z| z * ci(-std::f64::consts::PI / 4.0))).expect("unitary")
        }
        Basis::Z => CMatrix::eye(2),
    }
}

/// Exact excited-state population after the analysis rotation,
/// `P_e = <e| U rho U^dag |e>`.
pub fn excited_probability(rho: &DensityMatrix, basis: Basis) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::invalid("tomography is defined for qubits"));
    }
    let u = analysis_rotation(basis);
    let rotated = u.dot(rho.matrix()).dot(&dagger(&u));
    Ok(rotated[(1, 1)].re.clamp(0.0, 1.0))
}

/// Projective measurement of the excited population in the given basis with
/// binomial shot noise; the `EXACT` token returns the probability itself in
/// a zero-variance record.
pub fn measure_populations(
    rho: &DensityMatrix,
    basis: Basis,
    shots: Shots,
    seed: u64,
) -> Result<MeasurementRecord> {
    let p = excited_probability(rho, basis)?;
    match shots {
        Shots::Exact(_) => Ok(MeasurementRecord {
            basis,
            shots: 0,
            excited_counts: 0,
            seed,
            p_hat: p,
        }),
        Shots::Finite(n) => {
            if n == 0 {
                return Err(Error::invalid("measure_populations: shots must be >= 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let counts = Binomial::new(n, p)
                .map_err(|e| Error::invalid(format!("binomial: {e}")))?
                .sample(&mut rng);
            Ok(MeasurementRecord {
                basis,
                shots: n,
                excited_counts: counts,
                seed,
                p_hat: counts as f64 / n as f64,
            })
        }
    }
}

/// Stokes estimates; components may leave [-1, 1] under shot noise before
/// reconstruction projects them back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesVector {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl StokesVector {
    pub fn norm(&self) -> f64 {
        (self.sx * self.sx + self.sy * self.sy + self.sz * self.sz).sqrt()
    }

    pub fn component(&self, basis: Basis) -> f64 {
        match basis {
            Basis::X => self.sx,
            Basis::Y => self.sy,
            Basis::Z => self.sz,
        }
    }
}

/// `S_i = 2 P_e^i - 1` from one record per basis.
pub fn stokes_from_records(records: &[MeasurementRecord]) -> Result<StokesVector> {
    let mut out = [None; 3];
    for r in records {
        let idx = match r.basis {
            Basis::X => 0,
            Basis::Y => 1,
            Basis::Z => 2,
        };
        out[idx] = Some(2.0 * r.p_hat - 1.0);
    }
    match out {
        [Some(sx), Some(sy), Some(sz)] => Ok(StokesVector { sx, sy, sz }),
        _ => Err(Error::invalid(
            "stokes_from_records: need one record for each of x, y, z",
        )),
    }
}

/// Build `rho = (I + S . sigma)/2`, radially projecting S onto the unit
/// sphere first whenever shot noise pushes it outside the Bloch ball.
pub fn reconstruct_density(s: &StokesVector) -> Result<DensityMatrix> {
    let norm = s.norm();
    let scale = if norm > 1.0 { 1.0 / norm } else { 1.0 };
    let gens = su_generators(2)?;
    let b = BlochCoefficients::new(vec![s.sx * scale, s.sy * scale, s.sz * scale]);
    crate::generators::density_from_bloch(&b, &gens)
}

/// Full exact or sampled tomography pipeline for one state: measure all
/// three bases (seeds derived from `seed` per basis), estimate Stokes
/// parameters, reconstruct.
pub fn tomograph(
    rho: &DensityMatrix,
    shots: Shots,
    seed: u64,
) -> Result<(Vec<MeasurementRecord>, StokesVector, DensityMatrix)> {
    let records = Basis::ALL
        .iter()
        .enumerate()
        .map(|(k, basis)| measure_populations(rho, *basis, shots, seed.wrapping_add(k as u64)))
        .collect::<Result<Vec<_>>>()?;
    let stokes = stokes_from_records(&records)?;
    let rec = reconstruct_density(&stokes)?;
    Ok((records, stokes, rec))
}
