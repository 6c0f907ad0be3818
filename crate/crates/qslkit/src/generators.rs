//! SU(N) generator algebra: generalized Gell-Mann construction, structure
//! constants, and Bloch-coefficient maps.
//!
//! Basis convention: matrix index 0 is |g> and index 1 is |e>, with
//! sigma_z |e> = +|e>. The antisymmetric and diagonal generators carry the
//! signs that make the N = 2 triple exactly (sigma_x, sigma_y, sigma_z)/2 in
//! that labeling; the algebra is right-handed with f_123 = +1.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, ci, cr, CMatrix};

/// Desk-scale cap on the Hilbert-space dimension.
pub const MAX_DIM: usize = 8;

const ORTHO_TOL: f64 = 1e-12;

/// The Pauli matrices `[sigma_x, sigma_y, sigma_z]` in the (|g>, |e>) basis.
pub fn pauli() -> [CMatrix; 3] {
    let mut sx = CMatrix::zeros((2, 2));
    sx[(0, 1)] = cr(1.0);
    sx[(1, 0)] = cr(1.0);
    let mut sy = CMatrix::zeros((2, 2));
    sy[(0, 1)] = ci(1.0);
    sy[(1, 0)] = ci(-1.0);
    let mut sz = CMatrix::zeros((2, 2));
    sz[(0, 0)] = cr(-1.0);
    sz[(1, 1)] = cr(1.0);
    [sx, sy, sz]
}

/// Orthonormal traceless Hermitian basis of su(N), `tr(T_u T_v) = delta/2`.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    dim: usize,
    mats: Vec<CMatrix>,
}

impl GeneratorSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of generators, `N^2 - 1`.
    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.mats
    }
}

/// Generalized Gell-Mann generators of SU(N), normalized to
/// `tr(T_u T_v) = delta_uv / 2`. For N = 2 these are the Pauli matrices
/// divided by two.
pub fn su_generators(n: usize) -> Result<GeneratorSet> {
    if !(2..=MAX_DIM).contains(&n) {
        return Err(Error::invalid(format!(
            "su_generators: N must be in [2, {MAX_DIM}], got {n}"
        )));
    }
    let mut mats = Vec::with_capacity(n * n - 1);
    for k in 1..n {
        for j in 0..k {
            let mut sym = CMatrix::zeros((n, n));
            sym[(j, k)] = cr(0.5);
            sym[(k, j)] = cr(0.5);
            mats.push(sym);
            let mut asym = CMatrix::zeros((n, n));
            asym[(j, k)] = ci(0.5);
            asym[(k, j)] = ci(-0.5);
            mats.push(asym);
        }
        // Diagonal generator with the +k entry last, so the qubit case gives
        // sigma_z |e> = +|e>.
        let c = (2.0 / (k as f64 * (k + 1) as f64)).sqrt() / 2.0;
        let mut diag = CMatrix::zeros((n, n));
        for i in 0..k {
            diag[(i, i)] = cr(-c);
        }
        diag[(k, k)] = cr(c * k as f64);
        mats.push(diag);
    }
    Ok(GeneratorSet { dim: n, mats })
}

fn validate_generators(gens: &GeneratorSet) -> Result<()> {
    let d = gens.len();
    for (u, t) in gens.mats.iter().enumerate() {
        let tr = linalg::trace(t);
        if tr.norm() > ORTHO_TOL {
            return Err(Error::invalid(format!(
                "generator {u} is not traceless (tr = {tr})"
            )));
        }
        for (v, s) in gens.mats.iter().enumerate() {
            let want = if u == v { 0.5 } else { 0.0 };
            let got = linalg::trace(&t.dot(s));
            if (got.re - want).abs() > ORTHO_TOL || got.im.abs() > ORTHO_TOL {
                return Err(Error::invalid(format!(
                    "generators {u}, {v} not orthonormal: tr(T_u T_v) = {got}"
                )));
            }
        }
        let _ = d;
    }
    Ok(())
}

/// Totally antisymmetric structure constants `f_uvw` of a generator set,
/// stored as a flattened rank-3 array.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    dim: usize,
    d: usize,
    f: Vec<f64>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, u: usize, v: usize, w: usize) -> f64 {
        self.f[(u * self.d + v) * self.d + w]
    }

    /// Contraction `r_w = h_u b_v f_uvw`; for N = 2 this is the cross
    /// product `h x b`.
    pub fn contract(&self, h: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        if h.len() != self.d || b.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "contract: expected vectors of length {}, got {} and {}",
                self.d,
                h.len(),
                b.len()
            )));
        }
        let mut r = vec![0.0; self.d];
        for u in 0..self.d {
            if h[u] == 0.0 {
                continue;
            }
            for v in 0..self.d {
                if b[v] == 0.0 {
                    continue;
                }
                for (w, rw) in r.iter_mut().enumerate() {
                    *rw += h[u] * b[v] * self.get(u, v, w);
                }
            }
        }
        Ok(r)
    }
}

/// `f_uvw = -2i tr([T_u, T_v] T_w)`. The imaginary residue of the right side
/// is checked against 1e-12 and discarded.
pub fn structure_constants(gens: &GeneratorSet) -> Result<StructureConstants> {
    validate_generators(gens)?;
    let d = gens.len();
    let mut f = vec![0.0; d * d * d];
    for u in 0..d {
        for v in 0..d {
            let comm = linalg::commutator(&gens.mats[u], &gens.mats[v]);
            for w in 0..d {
                let val = linalg::trace(&comm.dot(&gens.mats[w])) * ci(-2.0);
                if val.im.abs() > 1e-12 {
                    return Err(Error::invalid(format!(
                        "structure constant ({u},{v},{w}) has imaginary residue {:.3e}",
                        val.im
                    )));
                }
                f[(u * d + v) * d + w] = val.re;
            }
        }
    }
    Ok(StructureConstants {
        dim: gens.dim,
        d,
        f,
    })
}

/// Real coefficient vector of an operator on the generator basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochCoefficients {
    values: Vec<f64>,
}

impl BlochCoefficients {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Coefficients `2 tr(A T_u)`. Applied to a density matrix this is the Bloch
/// vector b; applied to a Hamiltonian it yields the field vector h.
pub fn bloch_coeffs(a: &CMatrix, gens: &GeneratorSet) -> Result<BlochCoefficients> {
    let n = linalg::check_square(a)?;
    if n != gens.dim {
        return Err(Error::DimensionMismatch(format!(
            "operator is {n}x{n}, generators are for N = {}",
            gens.dim
        )));
    }
    let values = gens
        .mats
        .iter()
        .map(|t| 2.0 * linalg::trace(&a.dot(t)).re)
        .collect();
    Ok(BlochCoefficients { values })
}

/// Inverse of [`bloch_coeffs`] for states: `rho = I/N + b_u T_u`, validated
/// as a density matrix.
pub fn density_from_bloch(
    b: &BlochCoefficients,
    gens: &GeneratorSet,
) -> Result<crate::states::DensityMatrix> {
    if b.values.len() != gens.len() {
        return Err(Error::DimensionMismatch(format!(
            "bloch vector has {} components, expected {}",
            b.values.len(),
            gens.len()
        )));
    }
    let n = gens.dim;
    let mut mat = CMatrix::eye(n).mapv(|z| z / cr(n as f64));
    for (bu, t) in b.values.iter().zip(&gens.mats) {
        mat = mat + t.mapv(|z| z * cr(*bu));
    }
    crate::states::DensityMatrix::new(mat)
}

/// Cross product of length-3 coefficient vectors, the N = 2 form of the
/// structure-constant contraction.
pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::states::DensityMatrix;
    use ndarray::Array1;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn n2_generators_are_half_pauli() {
        let gens = su_generators(2).unwrap();
        let [sx, sy, sz] = pauli();
        for (t, s) in gens.matrices().iter().zip([sx, sy, sz]) {
            assert!(max_abs(&(t - &s.mapv(|z| z * cr(0.5)))) < 1e-15);
        }
        // orthogonality spot check
        let t12 = linalg::trace(&gens.matrices()[0].dot(&gens.matrices()[1]));
        assert!(t12.norm() < 1e-15);
    }

    #[test]
    fn generator_set_is_orthonormal_and_traceless() {
        for n in 2..=4 {
            let gens = su_generators(n).unwrap();
            assert_eq!(gens.len(), n * n - 1);
            validate_generators(&gens).unwrap();
        }
    }

    #[test]
    fn rejects_out_of_range_dimension() {
        assert!(su_generators(1).is_err());
        assert!(su_generators(9).is_err());
    }

    #[test]
    fn su2_structure_constants_are_levi_civita() {
        let gens = su_generators(2).unwrap();
        let f = structure_constants(&gens).unwrap();
        assert!((f.get(0, 1, 2) - 1.0).abs() < 1e-12);
        assert!((f.get(1, 2, 0) - 1.0).abs() < 1e-12);
        assert!((f.get(1, 0, 2) + 1.0).abs() < 1e-12);
        assert!(f.get(0, 0, 1).abs() < 1e-14);
    }

    #[test]
    fn su3_known_constants() {
        let gens = su_generators(3).unwrap();
        let f = structure_constants(&gens).unwrap();
        // 1-based (1,2,3) and (4,5,8) in the standard lambda ordering
        assert!((f.get(0, 1, 2) - 1.0).abs() < 1e-12);
        assert!((f.get(3, 4, 7) - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn antisymmetry_under_index_swaps() {
        for n in 2..=4 {
            let gens = su_generators(n).unwrap();
            let f = structure_constants(&gens).unwrap();
            let d = gens.len();
            for u in 0..d {
                for v in 0..d {
                    for w in 0..d {
                        let base = f.get(u, v, w);
                        assert!((f.get(v, u, w) + base).abs() < 1e-10);
                        assert!((f.get(u, w, v) + base).abs() < 1e-10);
                        assert!((f.get(w, v, u) + base).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn commutators_reconstructed_from_f() {
        // Brute-force [T_u, T_v] = i f_uvw T_w for N in 2..=4.
        for n in 2..=4 {
            let gens = su_generators(n).unwrap();
            let f = structure_constants(&gens).unwrap();
            let d = gens.len();
            for u in 0..d {
                for v in 0..d {
                    let comm = linalg::commutator(&gens.matrices()[u], &gens.matrices()[v]);
                    let mut rebuilt = CMatrix::zeros((n, n));
                    for w in 0..d {
                        rebuilt = rebuilt + gens.matrices()[w].mapv(|z| z * ci(f.get(u, v, w)));
                    }
                    assert!(max_abs(&(&comm - &rebuilt)) < 1e-10, "n={n} u={u} v={v}");
                }
            }
        }
    }

    #[test]
    fn rejects_invalid_generator_set() {
        let bad = GeneratorSet {
            dim: 2,
            mats: vec![CMatrix::eye(2)],
        };
        assert!(structure_constants(&bad).is_err());
    }

    #[test]
    fn bloch_of_basic_states() {
        let gens = su_generators(2).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        let b = bloch_coeffs(mixed.matrix(), &gens).unwrap();
        assert!(b.norm() < 1e-15);

        // |e> occupies index 1 and is the +z eigenstate
        let e = Array1::from(vec![cr(0.0), cr(1.0)]);
        let rho_e = DensityMatrix::from_pure(&e).unwrap();
        let b = bloch_coeffs(rho_e.matrix(), &gens).unwrap();
        assert!((b.values()[0]).abs() < 1e-15);
        assert!((b.values()[1]).abs() < 1e-15);
        assert!((b.values()[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bloch_round_trip_on_random_states() {
        let gens = su_generators(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            // random Bloch vector inside the ball
            let v = loop {
                let v = [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ];
                if (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) < 1.0 {
                    break v;
                }
            };
            let rho = density_from_bloch(&BlochCoefficients::new(v.to_vec()), &gens).unwrap();
            let back = bloch_coeffs(rho.matrix(), &gens).unwrap();
            for (x, y) in v.iter().zip(back.values()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bloch_outside_ball_is_not_a_state() {
        let gens = su_generators(2).unwrap();
        let b = BlochCoefficients::new(vec![0.0, 0.0, 1.5]);
        assert!(matches!(
            density_from_bloch(&b, &gens),
            Err(crate::error::Error::NotAState(_))
        ));
    }

    #[test]
    fn pure_bloch_vectors_have_unit_norm() {
        let gens = su_generators(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let psi = Array1::from(vec![
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ]);
            let rho = DensityMatrix::from_pure(&psi).unwrap();
            let b = bloch_coeffs(rho.matrix(), &gens).unwrap();
            assert!((b.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn contract_matches_cross_product_for_qubits() {
        let gens = su_generators(2).unwrap();
        let f = structure_constants(&gens).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let h: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = f.contract(&h, &b).unwrap();
            let x = cross3(&h, &b);
            for (a, c) in r.iter().zip(x) {
                assert!((a - c).abs() < 1e-12);
            }
        }
    }
}
