//! Spin-coherent-state quadrature oracles for the s-parameterized phase
//! space. These integrate the raw phase-space functions over the Bloch
//! sphere and exist as an independent check on the closed forms in
//! [`crate::metrics`]; they share nothing with that computation path beyond
//! the Bloch coefficients themselves.
//!
//! Phase-space function of a qubit operator with Bloch coefficients b:
//! `F^s(eta) = 1/2 + r_s b . n(eta)` with `r_s = sqrt(3^{1+s}) / 2`, and the
//! measure is `d mu = d Omega / (2 pi)`, calibrated by the requirement that
//! the purity integral reproduce `tr(rho0 rho_t)`.

use crate::error::{Error, Result};
use crate::generators::{bloch_coeffs, cross3, su_generators};
use crate::linalg::CMatrix;
use crate::states::DensityMatrix;

/// Default polar quadrature order; the integrands are quadratic in n, so
/// this is far beyond exactness and leaves margin for |s| up to 20.
pub const DEFAULT_ORDER: usize = 64;

const MIN_ORDER: usize = 8;
const MAX_ABS_S: f64 = 20.0;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton iteration from the Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P'_n(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn r_s(s: f64) -> f64 {
    3f64.powf((1.0 + s) / 2.0) / 2.0
}

fn check_inputs(dim: usize, s: f64, order: usize) -> Result<()> {
    if dim != 2 {
        return Err(Error::invalid(
            "phase-space oracles are implemented for qubits only",
        ));
    }
    if !s.is_finite() || s.abs() > MAX_ABS_S {
        return Err(Error::invalid(format!(
            "phase-space oracle needs finite |s| <= {MAX_ABS_S}, got {s}"
        )));
    }
    if order < MIN_ORDER {
        return Err(Error::invalid(format!(
            "quadrature order {order} too small; use at least {MIN_ORDER} (default {DEFAULT_ORDER})"
        )));
    }
    Ok(())
}

/// Iterate `f(n)` over the product grid (Gauss-Legendre in cos(theta) times
/// uniform azimuth) and return the integral against `d mu = d Omega / 2 pi`.
fn integrate_sphere(order: usize, mut f: impl FnMut(&[f64; 3]) -> f64) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let n_phi = 2 * order;
    let mut total = 0.0;
    for (u, w) in nodes.iter().zip(&weights) {
        let sin_theta = (1.0 - u * u).max(0.0).sqrt();
        let mut ring = 0.0;
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            let n_vec = [sin_theta * phi.cos(), sin_theta * phi.sin(), *u];
            ring += f(&n_vec);
        }
        total += w * ring / n_phi as f64;
    }
    total
}

/// Relative purity evaluated in s-parameterized phase space:
/// `int d mu F^{-s}_{rho0} F^{s}_{rho_t}`. Must reproduce
/// `tr(rho0 rho_t)` within 1e-6 at any admissible order.
pub fn phase_space_purity_oracle(
    rho0: &DensityMatrix,
    rhot: &DensityMatrix,
    s: f64,
    order: usize,
) -> Result<f64> {
    if rho0.dim() != rhot.dim() {
        return Err(Error::DimensionMismatch(format!(
            "purity oracle: {} vs {}",
            rho0.dim(),
            rhot.dim()
        )));
    }
    check_inputs(rho0.dim(), s, order)?;
    let gens = su_generators(2)?;
    let b0 = bloch_coeffs(rho0.matrix(), &gens)?;
    let bt = bloch_coeffs(rhot.matrix(), &gens)?;
    let (rm, rp) = (r_s(-s), r_s(s));
    Ok(integrate_sphere(order, |n| {
        let f0 = 0.5 + rm * dot3(b0.values(), n);
        let ft = 0.5 + rp * dot3(bt.values(), n);
        f0 * ft
    }))
}

/// QSL bound evaluated by quadrature:
/// `[int d mu (F^{-s}_{rho0})^2]^{1/2} [int d mu (r_s (h x b) . n)^2]^{1/2}`,
/// where the second factor is the Moyal bracket of the qubit phase-space
/// functions. Must match the closed form within 1e-4 relative.
pub fn vqsl_quadrature_oracle(
    rho0: &DensityMatrix,
    h: &CMatrix,
    rhot: &DensityMatrix,
    s: f64,
    order: usize,
) -> Result<f64> {
    if rho0.dim() != rhot.dim() || h.nrows() != rho0.dim() {
        return Err(Error::DimensionMismatch("vqsl oracle: operands disagree".into()));
    }
    check_inputs(rho0.dim(), s, order)?;
    let gens = su_generators(2)?;
    let b0 = bloch_coeffs(rho0.matrix(), &gens)?;
    let bt = bloch_coeffs(rhot.matrix(), &gens)?;
    let hv = bloch_coeffs(h, &gens)?;
    let cross = cross3(hv.values(), bt.values());
    let (rm, rp) = (r_s(-s), r_s(s));
    let first = integrate_sphere(order, |n| {
        let f0 = 0.5 + rm * dot3(b0.values(), n);
        f0 * f0
    });
    let second = integrate_sphere(order, |n| {
        let moyal = rp * dot3(&cross, n);
        moyal * moyal
    });
    Ok(first.sqrt() * second.sqrt())
}

fn dot3(a: &[f64], n: &[f64; 3]) -> f64 {
    a[0] * n[0] + a[1] * n[1] + a[2] * n[2]
}
