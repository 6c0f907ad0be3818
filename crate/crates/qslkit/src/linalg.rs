//! Minimal dense complex linear algebra for desk-scale (N <= 8) operators:
//! Hermitian eigendecomposition, matrix exponential, and small helpers.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense complex matrix, the working representation for all operators.
pub type CMatrix = Array2<C64>;

/// Real number as a complex value.
pub fn cr(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Imaginary number as a complex value.
pub fn ci(y: f64) -> C64 {
    C64::new(0.0, y)
}

/// Conjugate transpose.
pub fn dagger(a: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros((a.ncols(), a.nrows()));
    for ((i, j), z) in a.indexed_iter() {
        out[(j, i)] = z.conj();
    }
    out
}

/// Commutator `[a, b] = ab - ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b) - b.dot(a)
}

/// Frobenius norm `sqrt(tr(A^dag A))`.
pub fn frobenius_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry magnitude.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `A - A^dag`; zero for Hermitian input.
pub fn max_nonhermiticity(a: &CMatrix) -> f64 {
    max_abs(&(a - &dagger(a)))
}

/// Trace.
pub fn trace(a: &CMatrix) -> C64 {
    a.diag().iter().sum()
}

pub(crate) fn check_square(a: &CMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows())
}

pub(crate) fn check_finite(a: &CMatrix) -> Result<()> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns eigenvalues in ascending order and the unitary whose
/// columns are the matching eigenvectors.
pub fn hermitian_eig(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = check_square(a)?;
    check_finite(a)?;
    let scale = max_abs(a).max(1.0);
    if max_nonhermiticity(a) > 1e-10 * scale {
        return Err(Error::invalid(format!(
            "hermitian_eig: input is not Hermitian (residual {:.3e})",
            max_nonhermiticity(a)
        )));
    }
    // Symmetrize to scrub rounding-level asymmetry before iterating.
    let mut m = (a + &dagger(a)).mapv(|z| z * 0.5);
    let mut v = CMatrix::eye(n);

    let off = |m: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    for _sweep in 0..100 {
        if off(&m) <= 1e-14 * scale {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phi = apq.arg();
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Real symmetric Schur rotation on [[app, r], [r, aqq]].
                let tau = (aqq - app) / (2.0 * r);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column rotation J restricted to (p, q):
                //   J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                let jpp = cr(c);
                let jpq = cr(s);
                let jqp = -cr(s) * (-ci(phi)).exp();
                let jqq = cr(c) * (-ci(phi)).exp();
                // m <- J^dag m J, applied as column then row updates.
                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = mip * jpp + miq * jqp;
                    m[(i, q)] = mip * jpq + miq * jqq;
                }
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = jpp.conj() * mpj + jqp.conj() * mqj;
                    m[(q, j)] = jpq.conj() * mpj + jqq.conj() * mqj;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * jpp + viq * jqp;
                    v[(i, q)] = vip * jpq + viq * jqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let eigvals: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vecs = CMatrix::zeros((n, n));
    for (k, &i) in order.iter().enumerate() {
        for row in 0..n {
            vecs[(row, k)] = v[(row, i)];
        }
    }
    Ok((eigvals, vecs))
}

/// Rebuild `V f(diag) V^dag` from an eigendecomposition.
fn from_eig(eigvals: &[f64], vecs: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let n = eigvals.len();
    let mut d = CMatrix::zeros((n, n));
    for (k, &lam) in eigvals.iter().enumerate() {
        d[(k, k)] = f(lam);
    }
    vecs.dot(&d).dot(&dagger(vecs))
}

/// Matrix exponential. Hermitian and anti-Hermitian inputs go through the
/// eigendecomposition; everything else uses Pade [13/13] with scaling and
/// squaring.
pub fn matrix_exponential(a: &CMatrix) -> Result<CMatrix> {
    let _n = check_square(a)?;
    check_finite(a)?;
    let scale = max_abs(a).max(1.0);
    if max_nonhermiticity(a) <= 1e-12 * scale {
        let (vals, vecs) = hermitian_eig(a)?;
        return Ok(from_eig(&vals, &vecs, |x| cr(x.exp())));
    }
    let anti = max_abs(&(a + &dagger(a)));
    if anti <= 1e-12 * scale {
        // a = i h with h Hermitian
        let h = a.mapv(|z| z * ci(-1.0));
        let (vals, vecs) = hermitian_eig(&h)?;
        return Ok(from_eig(&vals, &vecs, |x| ci(x).exp()));
    }
    pade13(a)
}

fn one_norm(a: &CMatrix) -> f64 {
    let mut best = 0.0;
    for j in 0..a.ncols() {
        let s: f64 = (0..a.nrows()).map(|i| a[(i, j)].norm()).sum();
        best = f64::max(best, s);
    }
    best
}

fn pade13(a: &CMatrix) -> Result<CMatrix> {
    const THETA13: f64 = 5.371920351148152;
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let n = a.nrows();
    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.mapv(|z| z / cr(2f64.powi(s)));
    let eye = CMatrix::eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let u_inner = a6.mapv(|z| z * cr(B[13]))
        + a4.mapv(|z| z * cr(B[11]))
        + a2.mapv(|z| z * cr(B[9]));
    let u = a.dot(
        &(a6.dot(&u_inner)
            + a6.mapv(|z| z * cr(B[7]))
            + a4.mapv(|z| z * cr(B[5]))
            + a2.mapv(|z| z * cr(B[3]))
            + eye.mapv(|z| z * cr(B[1]))),
    );
    let v_inner = a6.mapv(|z| z * cr(B[12]))
        + a4.mapv(|z| z * cr(B[10]))
        + a2.mapv(|z| z * cr(B[8]));
    let v = a6.dot(&v_inner)
        + a6.mapv(|z| z * cr(B[6]))
        + a4.mapv(|z| z * cr(B[4]))
        + a2.mapv(|z| z * cr(B[2]))
        + eye.mapv(|z| z * cr(B[0]));
    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut out = solve_linear(&lhs, &rhs)?;
    for _ in 0..s {
        out = out.dot(&out);
    }
    Ok(out)
}

/// Solve `A X = B` by Gaussian elimination with partial pivoting.
pub(crate) fn solve_linear(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let n = check_square(a)?;
    let mut m = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let mut piv = col;
        let mut best = m[(col, col)].norm();
        for row in (col + 1)..n {
            if m[(row, col)].norm() > best {
                best = m[(row, col)].norm();
                piv = row;
            }
        }
        if best == 0.0 {
            return Err(Error::invalid("singular matrix in linear solve"));
        }
        if piv != col {
            for j in 0..n {
                m.swap((col, j), (piv, j));
                x.swap((col, j), (piv, j));
            }
        }
        let d = m[(col, col)];
        for row in (col + 1)..n {
            let factor = m[(row, col)] / d;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = m[(col, j)];
                m[(row, j)] -= factor * v;
            }
            for j in 0..n {
                let v = x[(col, j)];
                x[(row, j)] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let d = m[(col, col)];
        for j in 0..n {
            x[(col, j)] /= d;
        }
        for row in 0..col {
            let factor = m[(row, col)];
            for j in 0..n {
                let v = x[(col, j)];
                x[(row, j)] -= factor * v;
            }
        }
    }
    Ok(x)
}

/// Analytic `exp(-i h dt)` for a 2x2 Hermitian `h`, writing
/// `h = c0 I + v . sigma` and using the su(2) closed form.
pub fn unitary_exp_2x2(h: &CMatrix, dt: f64) -> CMatrix {
    debug_assert_eq!(h.nrows(), 2);
    let c0 = (h[(0, 0)].re + h[(1, 1)].re) / 2.0;
    let vz = (h[(1, 1)].re - h[(0, 0)].re) / 2.0;
    let vx = h[(0, 1)].re;
    let vy = h[(0, 1)].im;
    let w = (vx * vx + vy * vy + vz * vz).sqrt();
    let phase = (-ci(c0 * dt)).exp();
    if w == 0.0 {
        return CMatrix::eye(2).mapv(|z| z * phase);
    }
    let (cwt, swt) = ((w * dt).cos(), (w * dt).sin());
    let f = -ci(swt / w);
    let mut u = CMatrix::zeros((2, 2));
    // v . sigma = [[-vz, vx + i vy], [vx - i vy, vz]] in the (|g>, |e>) basis
    u[(0, 0)] = (cr(cwt) + f * cr(-vz)) * phase;
    u[(0, 1)] = f * C64::new(vx, vy) * phase;
    u[(1, 0)] = f * C64::new(vx, -vy) * phase;
    u[(1, 1)] = (cr(cwt) + f * cr(vz)) * phase;
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, rng: &mut impl Rng) -> CMatrix {
        CMatrix::from_shape_fn((n, n), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
        let a = random_matrix(n, rng);
        (&a + &dagger(&a)).mapv(|z| z * 0.5)
    }

    /// Plain truncated Taylor series, the independent oracle for expm.
    fn taylor_exp(a: &CMatrix, terms: usize) -> CMatrix {
        let n = a.nrows();
        let mut out = CMatrix::eye(n);
        let mut term = CMatrix::eye(n);
        for k in 1..=terms {
            term = term.dot(a).mapv(|z| z / cr(k as f64));
            out = out + &term;
        }
        out
    }

    #[test]
    fn jacobi_diagonalizes_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=8 {
            for _ in 0..20 {
                let a = random_hermitian(n, &mut rng);
                let (vals, vecs) = hermitian_eig(&a).unwrap();
                // unitarity
                let vv = dagger(&vecs).dot(&vecs);
                assert!(max_abs(&(&vv - &CMatrix::eye(n))) < 1e-12);
                // A V = V diag
                let rebuilt = from_eig(&vals, &vecs, cr);
                assert!(max_abs(&(&rebuilt - &a)) < 1e-12);
                // ascending
                assert!(vals.windows(2).all(|w| w[0] <= w[1] + 1e-14));
            }
        }
    }

    #[test]
    fn eig_matches_2x2_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = random_hermitian(2, &mut rng);
            let (vals, _) = hermitian_eig(&a).unwrap();
            let half_tr = (a[(0, 0)].re + a[(1, 1)].re) / 2.0;
            let det = (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]).re;
            let disc = (half_tr * half_tr - det).max(0.0).sqrt();
            assert!((vals[0] - (half_tr - disc)).abs() < 1e-12);
            assert!((vals[1] - (half_tr + disc)).abs() < 1e-12);
        }
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = CMatrix::zeros((3, 3));
        let e = matrix_exponential(&z).unwrap();
        assert!(max_abs(&(&e - &CMatrix::eye(3))) < 1e-15);
    }

    #[test]
    fn expm_matches_taylor_oracle() {
        // exp(-i pi sigma_x / 2) = -i sigma_x, checked against the series.
        let mut sx = CMatrix::zeros((2, 2));
        sx[(0, 1)] = cr(1.0);
        sx[(1, 0)] = cr(1.0);
        let arg = sx.mapv(|z| z * ci(-std::f64::consts::PI / 2.0));
        let e = matrix_exponential(&arg).unwrap();
        let oracle = taylor_exp(&arg, 40);
        assert!(max_abs(&(&e - &oracle)) < 1e-13);
        let expected = sx.mapv(|z| z * ci(-1.0));
        assert!(max_abs(&(&e - &expected)) < 1e-13);
    }

    #[test]
    fn expm_general_matches_taylor() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 2..=5 {
            for _ in 0..10 {
                let a = random_matrix(n, &mut rng);
                let e = matrix_exponential(&a).unwrap();
                let oracle = taylor_exp(&a, 60);
                assert!(
                    max_abs(&(&e - &oracle)) <= 1e-12 * max_abs(&oracle).max(1.0),
                    "n = {n}"
                );
            }
        }
    }

    #[test]
    fn expm_antihermitian_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..30 {
            let h = random_hermitian(4, &mut rng);
            let a = h.mapv(|z| z * ci(-1.0));
            let u = matrix_exponential(&a).unwrap();
            let uu = dagger(&u).dot(&u);
            assert!(max_abs(&(&uu - &CMatrix::eye(4))) < 1e-12);
        }
    }

    #[test]
    fn expm_rejects_non_finite() {
        let mut a = CMatrix::zeros((2, 2));
        a[(0, 0)] = cr(f64::NAN);
        assert!(matrix_exponential(&a).is_err());
    }

    #[test]
    fn unitary_exp_2x2_matches_expm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let h = random_hermitian(2, &mut rng);
            let dt = rng.gen_range(0.01..2.0);
            let fast = unitary_exp_2x2(&h, dt);
            let slow = matrix_exponential(&h.mapv(|z| z * ci(-dt))).unwrap();
            assert!(max_abs(&(&fast - &slow)) < 1e-12);
        }
    }
}
