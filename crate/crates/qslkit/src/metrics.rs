//! Speed, cost, and bound functionals: relative purity and its rate, the
//! counterdiabatic cost rate, s-parameterized QSL bounds, trade-off ratios,
//! the prior-art angle bound, and the tightness condition with its locator.

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::generators::{bloch_coeffs, su_generators, BlochCoefficients, StructureConstants};
use crate::linalg::{self, CMatrix};
use crate::lz::{self, LZParams};
use crate::states::DensityMatrix;

/// Phase-space index s, an extended real including negative infinity. The
/// token maps `3^s` to zero exactly; finite values are clamped to |s| <= 600
/// so `3^s` stays representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SParameter {
    NegInf,
    Finite(f64),
}

impl SParameter {
    pub fn finite(s: f64) -> Result<Self> {
        if !s.is_finite() || s.abs() > 600.0 {
            return Err(Error::invalid(format!(
                "s parameter must be finite with |s| <= 600, got {s}"
            )));
        }
        Ok(SParameter::Finite(s))
    }

    /// `3^s`, exactly zero for the negative-infinity token.
    pub fn three_pow(&self) -> f64 {
        match self {
            SParameter::NegInf => 0.0,
            SParameter::Finite(s) => 3f64.powf(*s),
        }
    }

    /// Column label: `neginf` for the token, the shortest float otherwise.
    pub fn label(&self) -> String {
        match self {
            SParameter::NegInf => "neginf".into(),
            SParameter::Finite(s) => format!("{s}"),
        }
    }
}

impl Serialize for SParameter {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SParameter::NegInf => ser.serialize_str("-inf"),
            SParameter::Finite(s) => ser.serialize_f64(*s),
        }
    }
}

impl<'de> Deserialize<'de> for SParameter {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(s) => SParameter::finite(s).map_err(serde::de::Error::custom),
            Raw::Text(t) if t == "-inf" || t == "neginf" => Ok(SParameter::NegInf),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "unrecognized s parameter {t:?} (use a number or \"-inf\")"
            ))),
        }
    }
}

/// Relative purity `P = tr(rho0 rho_t)`, symmetric in its arguments.
pub fn relative_purity(rho0: &DensityMatrix, rhot: &DensityMatrix) -> Result<f64> {
    if rho0.dim() != rhot.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relative_purity: {} vs {}",
            rho0.dim(),
            rhot.dim()
        )));
    }
    Ok(linalg::trace(&rho0.matrix().dot(rhot.matrix())).re)
}

/// Dynamical speed `|tr(rho0 [H, rho_t])|`, the rate of the relative purity
/// along the unitary flow (hbar = 1).
pub fn speed(rho0: &DensityMatrix, h: &CMatrix, rhot: &DensityMatrix) -> Result<f64> {
    if rho0.dim() != rhot.dim() || h.nrows() != rho0.dim() {
        return Err(Error::DimensionMismatch("speed: operands disagree".into()));
    }
    if linalg::max_nonhermiticity(h) > 1e-10 * linalg::max_abs(h).max(1.0) {
        return Err(Error::invalid("speed: Hamiltonian is not Hermitian"));
    }
    let comm = linalg::commutator(h, rhot.matrix());
    Ok(linalg::trace(&rho0.matrix().dot(&comm)).norm())
}

/// Counterdiabatic cost rate `sqrt(2) |theta'(t)|`, cross-checked against
/// the Frobenius norm of the counterdiabatic field; the two paths must agree
/// to 1e-12.
pub fn cost_rate(lz: &LZParams, t: f64) -> Result<f64> {
    let from_theta = 2f64.sqrt() * lz::theta_prime(lz, t)?.abs();
    let from_norm = linalg::frobenius_norm(&lz::counterdiabatic_h1(lz, t)?);
    if (from_theta - from_norm).abs() > 1e-12 * from_theta.max(1.0) {
        return Err(Error::invalid(format!(
            "cost_rate: dual paths disagree ({from_theta} vs {from_norm})"
        )));
    }
    Ok(from_theta)
}

fn require_len3(v: &BlochCoefficients, what: &str) -> Result<()> {
    if v.values().len() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "{what}: expected a length-3 coefficient vector, got {}",
            v.values().len()
        )));
    }
    Ok(())
}

/// Qubit QSL bound `V^s = (1/2) sqrt(3^s + |b0|^2) |h x b|`.
pub fn vqsl_qubit(
    s: SParameter,
    b0: &BlochCoefficients,
    h: &BlochCoefficients,
    b: &BlochCoefficients,
) -> Result<f64> {
    require_len3(b0, "vqsl_qubit b0")?;
    require_len3(h, "vqsl_qubit h")?;
    require_len3(b, "vqsl_qubit b")?;
    let cross = crate::generators::cross3(h.values(), b.values());
    let cross_norm = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    Ok(0.5 * (s.three_pow() + b0.norm().powi(2)).sqrt() * cross_norm)
}

/// Closed form of the bound for an eigenstate-initialized transitionless
/// trajectory: `V^s = sqrt(3^s + 1) |theta'(t)|`.
pub fn vqsl_eigenstate(s: SParameter, lz: &LZParams, t: f64) -> Result<f64> {
    Ok((s.three_pow() + 1.0).sqrt() * lz::theta_prime(lz, t)?.abs())
}

/// Trade-off ratio `V^s / cost = sqrt(3^s + 1) / sqrt(2)` (hbar = 1).
pub fn tradeoff_ratio(s: SParameter) -> f64 {
    ((s.three_pow() + 1.0) / 2.0).sqrt()
}

/// Sentinel returned by [`tightness_residual`] when the contraction
/// `h_v b_l f_vlu` vanishes.
pub const RESIDUAL_SENTINEL: f64 = 2.0;

/// Misalignment between `b(0)` and the contraction `r_u = h_v b_l f_vlu`
/// (for qubits, `h x b`): zero when aligned or anti-aligned, one when
/// orthogonal, [`RESIDUAL_SENTINEL`] when `|r|` vanishes.
pub fn tightness_residual(
    b0: &BlochCoefficients,
    h: &BlochCoefficients,
    b: &BlochCoefficients,
    f: &StructureConstants,
) -> Result<f64> {
    let b0n = b0.norm();
    if b0n < 1e-14 {
        return Err(Error::invalid("tightness_residual: b(0) is zero"));
    }
    let r = f.contract(h.values(), b.values())?;
    if b0.values().len() != r.len() {
        return Err(Error::DimensionMismatch(
            "tightness_residual: b(0) length disagrees with the algebra".into(),
        ));
    }
    let rn = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if rn < 1e-14 {
        return Ok(RESIDUAL_SENTINEL);
    }
    let dot: f64 = b0.values().iter().zip(&r).map(|(a, c)| a * c).sum();
    Ok(1.0 - dot.abs() / (b0n * rn))
}

/// Prior-art bound of the Bures-angle metric: at each trajectory time,
/// `L = arccos |<psi0|psi_t>|`, its rate, and the bound
/// `v = sqrt(eps^2 + <d_t n|d_t n>) / (cos L sin L)`. Values within 1e-6 of
/// the L = 0 or L = pi/2 singularities are undefined rather than infinite.
#[derive(Debug, Clone, Copy)]
pub struct PriorArtPoint {
    pub l: Option<f64>,
    pub l_dot: Option<f64>,
    pub v_qsl: Option<f64>,
}

pub fn prior_vqsl(lz: &LZParams, traj: &Trajectory) -> Result<Vec<PriorArtPoint>> {
    let rho0 = traj
        .states
        .first()
        .ok_or_else(|| Error::invalid("prior_vqsl: empty trajectory"))?;
    let mut out = Vec::with_capacity(traj.len());
    for (t, state) in traj.times.iter().zip(&traj.states) {
        if state.purity() < 1.0 - 1e-6 {
            return Err(Error::invalid(format!(
                "prior_vqsl: state at t = {t} is mixed (purity {:.6}); the angle metric needs pure states",
                state.purity()
            )));
        }
        let p = relative_purity(rho0, state)?.clamp(0.0, 1.0);
        let l = p.sqrt().clamp(-1.0, 1.0).acos();
        let singular = l < 1e-6 || (std::f64::consts::FRAC_PI_2 - l) < 1e-6;
        if singular {
            out.push(PriorArtPoint {
                l: Some(l),
                l_dot: None,
                v_qsl: None,
            });
            continue;
        }
        let (g, _) = lz::g_eval(&lz.schedule, *t)?;
        let eps2 = lz.delta * lz.delta + g * g;
        let dn = lz::theta_prime(lz, *t)?;
        let denom = l.cos() * l.sin();
        let h_tot = lz::h_total(lz, *t)?;
        let pdot = speed(rho0, &h_tot, state)?;
        out.push(PriorArtPoint {
            l: Some(l),
            l_dot: Some(pdot / (2.0 * denom)),
            v_qsl: Some((eps2 + dn * dn).sqrt() / denom),
        });
    }
    Ok(out)
}

/// Per-time metrics of a scenario run.
#[derive(Debug, Clone)]
pub struct MetricsSeries {
    pub times: Vec<f64>,
    pub bloch: Vec<[f64; 3]>,
    pub purity: Vec<f64>,
    pub speed: Vec<f64>,
    /// Cost rate; `None` where the scenario defines no counterdiabatic cost.
    pub cost_rate: Vec<Option<f64>>,
    /// One bound series per requested s, in request order.
    pub vqsl: Vec<(SParameter, Vec<f64>)>,
    /// `|P'| / cost`; `None` below the cost floor of 1e-12.
    pub ratio: Vec<Option<f64>>,
    pub tightness_residual: Vec<f64>,
}

impl MetricsSeries {
    pub fn vqsl_for(&self, s: SParameter) -> Option<&[f64]> {
        self.vqsl
            .iter()
            .find(|(sp, _)| sp.label() == s.label())
            .map(|(_, v)| v.as_slice())
    }

    /// Index of the maximum of the bound series for `s`.
    pub fn argmax_vqsl(&self, s: SParameter) -> Option<(f64, f64)> {
        let series = self.vqsl_for(s)?;
        let mut best: Option<(f64, f64)> = None;
        for (t, v) in self.times.iter().zip(series) {
            if best.map(|(_, bv)| *v > bv).unwrap_or(true) {
                best = Some((*t, *v));
            }
        }
        best
    }
}

/// Inputs for [`compute_metrics`]: a qubit trajectory plus the Hamiltonian
/// actually applied at each recorded time and an optional cost-rate series.
pub struct MetricsInput<'a> {
    pub rho0: &'a DensityMatrix,
    pub trajectory: &'a Trajectory,
    pub hamiltonians: &'a [CMatrix],
    pub cost_rate: Option<&'a [f64]>,
}

/// Pointwise metric evaluation over a trajectory.
pub fn compute_metrics(input: &MetricsInput, s_list: &[SParameter]) -> Result<MetricsSeries> {
    let traj = input.trajectory;
    if input.hamiltonians.len() != traj.len() {
        return Err(Error::DimensionMismatch(format!(
            "compute_metrics: {} Hamiltonian samples for {} trajectory points",
            input.hamiltonians.len(),
            traj.len()
        )));
    }
    if let Some(c) = input.cost_rate {
        if c.len() != traj.len() {
            return Err(Error::DimensionMismatch(
                "compute_metrics: cost series length disagrees with trajectory".into(),
            ));
        }
    }
    if input.rho0.dim() != 2 {
        return Err(Error::invalid(
            "compute_metrics: the metric pipeline is defined for qubits",
        ));
    }
    let gens = su_generators(2)?;
    let f = crate::generators::structure_constants(&gens)?;
    let b0 = bloch_coeffs(input.rho0.matrix(), &gens)?;

    let n = traj.len();
    let mut bloch = Vec::with_capacity(n);
    let mut purity = Vec::with_capacity(n);
    let mut speed_series = Vec::with_capacity(n);
    let mut cost_series = Vec::with_capacity(n);
    let mut ratio = Vec::with_capacity(n);
    let mut residual = Vec::with_capacity(n);
    let mut vqsl: Vec<(SParameter, Vec<f64>)> = s_list
        .iter()
        .map(|s| (*s, Vec::with_capacity(n)))
        .collect();

    for k in 0..n {
        let state = &traj.states[k];
        let hmat = &input.hamiltonians[k];
        let b = bloch_coeffs(state.matrix(), &gens)?;
        let h = bloch_coeffs(hmat, &gens)?;
        bloch.push([b.values()[0], b.values()[1], b.values()[2]]);
        purity.push(relative_purity(input.rho0, state)?);
        let sp = speed(input.rho0, hmat, state)?;
        speed_series.push(sp);
        for (s, col) in vqsl.iter_mut() {
            col.push(vqsl_qubit(*s, &b0, &h, &b)?);
        }
        residual.push(tightness_residual(&b0, &h, &b, &f)?);
        let cost = input.cost_rate.map(|c| c[k]);
        cost_series.push(cost);
        ratio.push(match cost {
            Some(c) if c > 1e-12 => Some(sp / c),
            _ => None,
        });
    }

    Ok(MetricsSeries {
        times: traj.times.clone(),
        bloch,
        purity,
        speed: speed_series,
        cost_rate: cost_series,
        vqsl,
        ratio,
        tightness_residual: residual,
    })
}

/// Pointwise `|P'| / cost` with sub-floor cost marked undefined. Errors when
/// the cost rate vanishes everywhere.
pub fn empirical_tradeoff(series: &MetricsSeries) -> Result<Vec<Option<f64>>> {
    let any_cost = series
        .cost_rate
        .iter()
        .any(|c| matches!(c, Some(v) if *v > 1e-12));
    if !any_cost {
        return Err(Error::invalid(
            "empirical_tradeoff: cost rate is zero or absent on the whole grid",
        ));
    }
    Ok(series.ratio.clone())
}

/// Local minima of the tightness residual below `tol`, refined by a
/// parabolic fit through each minimum and its neighbors.
pub fn locate_tightness(series: &MetricsSeries, tol: f64) -> Vec<f64> {
    let res = &series.tightness_residual;
    let t = &series.times;
    let mut out = Vec::new();
    for k in 1..res.len().saturating_sub(1) {
        let (y0, y1, y2) = (res[k - 1], res[k], res[k + 1]);
        if !(y1 < tol) {
            continue;
        }
        let is_min = (y1 < y0 && y1 <= y2) || (y1 <= y0 && y1 < y2);
        if !is_min {
            continue;
        }
        let denom = y0 - 2.0 * y1 + y2;
        let refined = if denom.abs() > 1e-300 {
            let h = (t[k + 1] - t[k - 1]) / 2.0;
            (t[k] + h / 2.0 * (y0 - y2) / denom).clamp(t[k - 1], t[k + 1])
        } else {
            t[k]
        };
        out.push(refined);
    }
    out
}
