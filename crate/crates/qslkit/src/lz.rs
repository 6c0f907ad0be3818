//! The Landau-Zener model family: drive schedules with analytic derivatives,
//! instantaneous eigensystem, counterdiabatic field, combined effective
//! controls, and piecewise-constant pulse discretization.
//!
//! Units: hbar = 1, time in microseconds, energies in rad/us. The model is
//! `H0(t) = Delta sigma_x + g(t) sigma_z` in the (|g>, |e>) basis with
//! sigma_z |e> = +|e>. In that convention the eigenvector of +sqrt(D^2+g^2)
//! is `sin(theta)|g> + cos(theta)|e>` with `theta = atan2(Delta, g)/2`; see
//! [`instantaneous_eigensystem`].

use ndarray::Array1;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::pauli;
use crate::linalg::{cr, CMatrix};

/// Time-dependent drive g(t) with an analytic derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ControlSchedule {
    /// `g(t) = (omega0 / 2) cos(pi t / tau)`.
    Cosine { omega0: f64, tau: f64 },
    /// `g(t) = a - b t / tau`.
    Linear { a: f64, b: f64, tau: f64 },
    /// Piecewise-linear table of `(t, g)` samples spanning `[0, tau]`.
    Table { points: Vec<(f64, f64)> },
}

impl ControlSchedule {
    pub fn tau(&self) -> f64 {
        match self {
            ControlSchedule::Cosine { tau, .. } | ControlSchedule::Linear { tau, .. } => *tau,
            ControlSchedule::Table { points } => points.last().map(|p| p.0).unwrap_or(0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let tau = self.tau();
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::invalid(format!("schedule duration tau = {tau} must be > 0")));
        }
        match self {
            ControlSchedule::Cosine { omega0, .. } => {
                if !omega0.is_finite() {
                    return Err(Error::invalid("cosine schedule: omega0 not finite"));
                }
            }
            ControlSchedule::Linear { a, b, .. } => {
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::invalid("linear schedule: ramp parameters not finite"));
                }
            }
            ControlSchedule::Table { points } => {
                if points.len() < 2 {
                    return Err(Error::invalid("table schedule needs at least two points"));
                }
                if points[0].0 != 0.0 {
                    return Err(Error::invalid("table schedule must start at t = 0"));
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::invalid("table schedule times must be strictly increasing"));
                }
                if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
                    return Err(Error::invalid("table schedule has non-finite entries"));
                }
            }
        }
        Ok(())
    }
}

/// Evaluate `(g(t), g'(t))`.
pub fn g_eval(schedule: &ControlSchedule, t: f64) -> Result<(f64, f64)> {
    let tau = schedule.tau();
    if !(0.0..=tau).contains(&t) {
        return Err(Error::TimeOutOfRange { t, tau });
    }
    match schedule {
        ControlSchedule::Cosine { omega0, tau } => {
            let phase = std::f64::consts::PI * t / tau;
            Ok((
                omega0 / 2.0 * phase.cos(),
                -omega0 / 2.0 * std::f64::consts::PI / tau * phase.sin(),
            ))
        }
        ControlSchedule::Linear { a, b, tau } => Ok((a - b * t / tau, -b / tau)),
        ControlSchedule::Table { points } => {
            let k = points
                .windows(2)
                .position(|w| t <= w[1].0)
                .unwrap_or(points.len() - 2);
            let (t0, g0) = points[k];
            let (t1, g1) = points[k + 1];
            let slope = (g1 - g0) / (t1 - t0);
            Ok((g0 + slope * (t - t0), slope))
        }
    }
}

/// The Landau-Zener Hamiltonian family: gap `delta` and drive schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LZParams {
    pub delta: f64,
    pub schedule: ControlSchedule,
}

impl LZParams {
    pub fn new(delta: f64, schedule: ControlSchedule) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::invalid(format!("delta = {delta} must be finite and >= 0")));
        }
        schedule.validate()?;
        Ok(Self { delta, schedule })
    }

    pub fn tau(&self) -> f64 {
        self.schedule.tau()
    }

    fn g_checked(&self, t: f64) -> Result<(f64, f64)> {
        let (g, gp) = g_eval(&self.schedule, t)?;
        if self.delta == 0.0 && g == 0.0 {
            return Err(Error::DegenerateSpectrum { delta: self.delta, g });
        }
        Ok((g, gp))
    }
}

/// `H0(t) = Delta sigma_x + g(t) sigma_z`.
pub fn h0(lz: &LZParams, t: f64) -> Result<CMatrix> {
    let (g, _) = g_eval(&lz.schedule, t)?;
    let [sx, _, sz] = pauli();
    Ok(sx.mapv(|z| z * cr(lz.delta)) + sz.mapv(|z| z * cr(g)))
}

/// Instantaneous eigensystem of `H0(t)`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Mixing angle `theta = atan2(Delta, g) / 2`, continuous in t.
    pub theta: f64,
    /// `+sqrt(Delta^2 + g^2)`, the energy of [`EigenSystem::plus`].
    pub eps_plus: f64,
    /// `-sqrt(Delta^2 + g^2)`, the energy of [`EigenSystem::minus`].
    pub eps_minus: f64,
    /// Upper eigenstate `sin(theta)|g> + cos(theta)|e>`.
    pub plus: Array1<C64>,
    /// Lower eigenstate `cos(theta)|g> - sin(theta)|e>`.
    pub minus: Array1<C64>,
}

/// Mixing angle and eigenpairs of the instantaneous Hamiltonian. Errors at
/// degenerate points (`Delta = g = 0`).
pub fn instantaneous_eigensystem(lz: &LZParams, t: f64) -> Result<EigenSystem> {
    let (g, _) = lz.g_checked(t)?;
    let theta = f64::atan2(lz.delta, g) / 2.0;
    let e = (lz.delta * lz.delta + g * g).sqrt();
    let (s, c) = theta.sin_cos();
    Ok(EigenSystem {
        theta,
        eps_plus: e,
        eps_minus: -e,
        plus: Array1::from(vec![cr(s), cr(c)]),
        minus: Array1::from(vec![cr(c), cr(-s)]),
    })
}

/// Rate of the mixing angle, `theta'(t) = -Delta g'(t) / (2 (Delta^2 + g^2))`.
pub fn theta_prime(lz: &LZParams, t: f64) -> Result<f64> {
    let (g, gp) = lz.g_checked(t)?;
    Ok(-lz.delta * gp / (2.0 * (lz.delta * lz.delta + g * g)))
}

/// Counterdiabatic field `H1(t) = Xi(t) sigma_y` with
/// `Xi = -Delta g' / (2 (Delta^2 + g^2)) = theta'(t)`.
pub fn counterdiabatic_h1(lz: &LZParams, t: f64) -> Result<CMatrix> {
    let xi = theta_prime(lz, t)?;
    let [_, sy, _] = pauli();
    Ok(sy.mapv(|z| z * cr(xi)))
}

/// Total driving Hamiltonian `H0(t) + H1(t)`.
pub fn h_total(lz: &LZParams, t: f64) -> Result<CMatrix> {
    Ok(h0(lz, t)? + counterdiabatic_h1(lz, t)?)
}

/// Effective laser controls realizing `H = Delta sigma_x + Xi sigma_y +
/// g sigma_z` as `omega_eff (e^{i phase} sigma_+ + e^{-i phase} sigma_-) +
/// detuning sigma_z` with `sigma_pm = (sigma_x +- i sigma_y)/2`.
///
/// The reconstruction identity fixes `omega_eff = sqrt(Delta^2 + Xi^2)` and
/// `phase_eff = atan2(-Xi, Delta)`. A convention placing a factor 1/2 on the
/// Rabi term instead reports `2 omega_eff` and the same phase up to the
/// Xi/(2 Delta) redefinition; this module always stores the pair that
/// regenerates the matrix exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveControls {
    /// Effective Rabi frequency (rad/us).
    pub omega_eff: f64,
    /// Effective drive phase (rad).
    pub phase_eff: f64,
    /// sigma_z coefficient g(t) (rad/us).
    pub detuning: f64,
    /// sigma_y coefficient Xi(t) (rad/us).
    pub xi: f64,
}

impl EffectiveControls {
    /// Rebuild the Hamiltonian matrix from the stored controls.
    pub fn hamiltonian(&self) -> CMatrix {
        let [sx, sy, sz] = pauli();
        let cx = self.omega_eff * self.phase_eff.cos();
        let cy = -self.omega_eff * self.phase_eff.sin();
        sx.mapv(|z| z * cr(cx)) + sy.mapv(|z| z * cr(cy)) + sz.mapv(|z| z * cr(self.detuning))
    }
}

/// Controls at time t for the combined Hamiltonian.
pub fn effective_controls(lz: &LZParams, t: f64) -> Result<EffectiveControls> {
    let (g, _) = g_eval(&lz.schedule, t)?;
    let xi = theta_prime(lz, t)?;
    Ok(EffectiveControls {
        omega_eff: (lz.delta * lz.delta + xi * xi).sqrt(),
        phase_eff: f64::atan2(-xi, lz.delta),
        detuning: g,
        xi,
    })
}

/// One piecewise-constant control step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseStep {
    pub duration: f64,
    pub omega_eff: f64,
    pub phase_eff: f64,
    pub detuning: f64,
}

impl PulseStep {
    /// Constant Hamiltonian applied during the step.
    pub fn hamiltonian(&self) -> CMatrix {
        let [sx, sy, sz] = pauli();
        let cx = self.omega_eff * self.phase_eff.cos();
        let cy = -self.omega_eff * self.phase_eff.sin();
        sx.mapv(|z| z * cr(cx)) + sy.mapv(|z| z * cr(cy)) + sz.mapv(|z| z * cr(self.detuning))
    }
}

/// Piecewise-constant control table.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pub steps: Vec<PulseStep>,
}

impl PulseSequence {
    pub fn total_duration(&self) -> f64 {
        self.steps.iter().map(|s| s.duration).sum()
    }

    /// CSV table with the documented column contract.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "step_index,duration_us,omega_eff_rad_per_us,phase_eff_rad,detuning_rad_per_us\n",
        );
        for (k, s) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                k, s.duration, s.omega_eff, s.phase_eff, s.detuning
            ));
        }
        out
    }
}

/// Split `[0, tau]` into equal-duration steps with controls sampled at step
/// midpoints.
pub fn discretize(lz: &LZParams, n_steps: usize) -> Result<PulseSequence> {
    if n_steps < 1 {
        return Err(Error::invalid("discretize: n_steps must be >= 1"));
    }
    let tau = lz.tau();
    let dt = tau / n_steps as f64;
    let steps = (0..n_steps)
        .map(|k| {
            let t_mid = (k as f64 + 0.5) * dt;
            let c = effective_controls(lz, t_mid)?;
            Ok(PulseStep {
                duration: dt,
                omega_eff: c.omega_eff,
                phase_eff: c.phase_eff,
                detuning: c.detuning,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PulseSequence { steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_norm, hermitian_eig, max_abs};
    use std::f64::consts::PI;

    const OMEGA0: f64 = 2.0 * PI * 0.04; // rad/us
    const TAU: f64 = 50.0; // us

    fn fig2_lz() -> LZParams {
        LZParams::new(
            OMEGA0 / 4.0,
            ControlSchedule::Cosine {
                omega0: OMEGA0,
                tau: TAU,
            },
        )
        .unwrap()
    }

    #[test]
    fn cosine_schedule_values() {
        let lz = fig2_lz();
        let (g, gp) = g_eval(&lz.schedule, 0.0).unwrap();
        assert!((g - OMEGA0 / 2.0).abs() < 1e-15);
        assert!(gp.abs() < 1e-15);
        let (g, gp) = g_eval(&lz.schedule, TAU / 2.0).unwrap();
        assert!(g.abs() < 1e-15);
        assert!((gp - (-OMEGA0 * PI / (2.0 * TAU))).abs() < 1e-15);
    }

    #[test]
    fn linear_schedule_values() {
        // g(t) = 0.2 - 0.4 t / tau
        let sched = ControlSchedule::Linear {
            a: 0.2,
            b: 0.4,
            tau: 1.0,
        };
        let (g, gp) = g_eval(&sched, 0.0).unwrap();
        assert!((g - 0.2).abs() < 1e-15);
        assert!((gp + 0.4).abs() < 1e-15);
    }

    #[test]
    fn schedule_rejects_out_of_range_time() {
        let lz = fig2_lz();
        assert!(matches!(
            g_eval(&lz.schedule, -0.1),
            Err(Error::TimeOutOfRange { .. })
        ));
        assert!(g_eval(&lz.schedule, TAU + 0.1).is_err());
    }

    #[test]
    fn analytic_derivative_matches_finite_difference() {
        let schedules = [
            ControlSchedule::Cosine {
                omega0: OMEGA0,
                tau: TAU,
            },
            ControlSchedule::Linear {
                a: 0.2,
                b: 0.4,
                tau: 10.0,
            },
        ];
        for sched in schedules {
            let tau = sched.tau();
            let h = 1e-6 * tau;
            for k in 1..40 {
                let t = k as f64 * tau / 40.0;
                let (_, gp) = g_eval(&sched, t).unwrap();
                let (gm, _) = g_eval(&sched, t - h).unwrap();
                let (gpl, _) = g_eval(&sched, t + h).unwrap();
                let fd = (gpl - gm) / (2.0 * h);
                let scale = gp.abs().max(1e-3);
                assert!((gp - fd).abs() / scale < 1e-6, "t = {t}");
            }
        }
    }

    #[test]
    fn h0_limits() {
        let [sx, _, sz] = pauli();
        let lz = LZParams::new(
            0.0,
            ControlSchedule::Linear {
                a: 1.0,
                b: 0.0,
                tau: 1.0,
            },
        )
        .unwrap();
        assert!(max_abs(&(&h0(&lz, 0.5).unwrap() - &sz)) < 1e-15);
        let lz = LZParams::new(
            1.0,
            ControlSchedule::Linear {
                a: 0.0,
                b: 0.0,
                tau: 1.0,
            },
        )
        .unwrap();
        assert!(max_abs(&(&h0(&lz, 0.5).unwrap() - &sx)) < 1e-15);
    }

    #[test]
    fn h0_eigenvalues_at_t0() {
        let lz = fig2_lz();
        let m = h0(&lz, 0.0).unwrap();
        let (vals, _) = hermitian_eig(&m).unwrap();
        let expect = OMEGA0 * 5f64.sqrt() / 4.0;
        assert!((vals[1] - expect).abs() < 1e-12);
        assert!((vals[0] + expect).abs() < 1e-12);
    }

    #[test]
    fn eigensystem_solves_h0() {
        let lz = fig2_lz();
        for k in 0..=40 {
            let t = k as f64 * TAU / 40.0;
            let es = instantaneous_eigensystem(&lz, t).unwrap();
            let m = h0(&lz, t).unwrap();
            for (vec, eps) in [(&es.plus, es.eps_plus), (&es.minus, es.eps_minus)] {
                let hv = m.dot(vec);
                let diff: f64 = hv
                    .iter()
                    .zip(vec.iter())
                    .map(|(a, b)| (a - b * cr(eps)).norm())
                    .fold(0.0, f64::max);
                assert!(diff < 1e-12, "t = {t}");
            }
            // eigenvalue symmetry is exact for the traceless model
            assert_eq!(es.eps_plus, -es.eps_minus);
        }
    }

    #[test]
    fn mixing_angle_values() {
        // symmetric superposition at the crossing
        let lz = LZParams::new(
            1.0,
            ControlSchedule::Linear {
                a: 0.0,
                b: 0.0,
                tau: 1.0,
            },
        )
        .unwrap();
        let es = instantaneous_eigensystem(&lz, 0.3).unwrap();
        assert!((es.theta - PI / 4.0).abs() < 1e-15);

        // reported example numbers
        let lz = LZParams::new(
            0.01,
            ControlSchedule::Linear {
                a: 0.2,
                b: 0.0,
                tau: 1.0,
            },
        )
        .unwrap();
        let es = instantaneous_eigensystem(&lz, 0.0).unwrap();
        assert!((2.0 * es.theta - f64::atan2(0.01, 0.2)).abs() < 1e-15);
        assert!((2.0 * es.theta - 0.049958).abs() < 1e-6);
    }

    #[test]
    fn degenerate_point_is_rejected() {
        let lz = LZParams::new(
            0.0,
            ControlSchedule::Linear {
                a: 0.1,
                b: 0.2,
                tau: 1.0,
            },
        )
        .unwrap();
        // g crosses zero at t = tau/2
        assert!(matches!(
            instantaneous_eigensystem(&lz, 0.5),
            Err(Error::DegenerateSpectrum { .. })
        ));
        assert!(counterdiabatic_h1(&lz, 0.5).is_err());
    }

    #[test]
    fn counterdiabatic_coefficient() {
        let lz = fig2_lz();
        // g' = 0 at t = 0
        let h1 = counterdiabatic_h1(&lz, 0.0).unwrap();
        assert!(max_abs(&h1) < 1e-15);
        // at tau/2: Xi = pi / tau
        let h1 = counterdiabatic_h1(&lz, TAU / 2.0).unwrap();
        let [_, sy, _] = pauli();
        assert!(max_abs(&(&h1 - &sy.mapv(|z| z * cr(PI / TAU)))) < 1e-12);

        // Delta = 0 kills the field everywhere g != 0
        let lz0 = LZParams::new(
            0.0,
            ControlSchedule::Linear {
                a: 1.0,
                b: 0.5,
                tau: 1.0,
            },
        )
        .unwrap();
        assert!(max_abs(&counterdiabatic_h1(&lz0, 0.2).unwrap()) < 1e-15);
    }

    #[test]
    fn xi_equals_theta_rate_by_finite_difference() {
        let lz = fig2_lz();
        let h = 1e-5;
        for k in 1..50 {
            let t = k as f64 * TAU / 50.0;
            let xi = theta_prime(&lz, t).unwrap();
            let tp = instantaneous_eigensystem(&lz, t + h).unwrap().theta;
            let tm = instantaneous_eigensystem(&lz, t - h).unwrap().theta;
            let fd = (tp - tm) / (2.0 * h);
            assert!((xi - fd).abs() < 1e-7 * xi.abs().max(1.0), "t = {t}");
        }
    }

    #[test]
    fn effective_controls_reconstruct_hamiltonian() {
        let lz = fig2_lz();
        for k in 0..=100 {
            let t = k as f64 * TAU / 100.0;
            let c = effective_controls(&lz, t).unwrap();
            let direct = h_total(&lz, t).unwrap();
            assert!(max_abs(&(&c.hamiltonian() - &direct)) < 1e-14, "t = {t}");
        }
        // Xi = 0 at the endpoints of the cosine schedule
        let c = effective_controls(&lz, 0.0).unwrap();
        assert_eq!(c.phase_eff, 0.0);
        assert_eq!(c.xi, 0.0);
        // pure sigma_y drive when Delta = 0... requires Xi != 0, so test the
        // limit with a tiny Delta by hand instead: phase -> +-pi/2
        let c = EffectiveControls {
            omega_eff: 1.0,
            phase_eff: f64::atan2(-1.0, 0.0),
            detuning: 0.0,
            xi: 1.0,
        };
        assert!((c.phase_eff.abs() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn effective_controls_midpoint_value() {
        let lz = fig2_lz();
        let c = effective_controls(&lz, TAU / 2.0).unwrap();
        assert!((c.xi - PI / TAU).abs() < 1e-12);
        let direct = h_total(&lz, TAU / 2.0).unwrap();
        assert!(max_abs(&(&c.hamiltonian() - &direct)) < 1e-14);
    }

    #[test]
    fn frobenius_norm_of_h1_is_sqrt2_theta_rate() {
        let lz = fig2_lz();
        for k in 1..50 {
            let t = k as f64 * TAU / 50.0;
            let h1 = counterdiabatic_h1(&lz, t).unwrap();
            let xi = theta_prime(&lz, t).unwrap();
            assert!((frobenius_norm(&h1) - 2f64.sqrt() * xi.abs()).abs() < 1e-14);
        }
    }

    #[test]
    fn discretize_single_step() {
        let lz = fig2_lz();
        let seq = discretize(&lz, 1).unwrap();
        assert_eq!(seq.steps.len(), 1);
        assert!((seq.steps[0].duration - TAU).abs() < 1e-12);
        let mid = effective_controls(&lz, TAU / 2.0).unwrap();
        assert!((seq.steps[0].detuning - mid.detuning).abs() < 1e-15);
    }

    #[test]
    fn discretize_twenty_steps() {
        let lz = fig2_lz();
        let seq = discretize(&lz, 20).unwrap();
        assert_eq!(seq.steps.len(), 20);
        for s in &seq.steps {
            assert!((s.duration - 2.5).abs() < 1e-12);
        }
        assert!((seq.total_duration() - TAU).abs() < 1e-9);
    }

    #[test]
    fn discretize_rejects_zero_steps() {
        assert!(discretize(&fig2_lz(), 0).is_err());
    }

    #[test]
    fn pulse_csv_has_contract_columns() {
        let seq = discretize(&fig2_lz(), 3).unwrap();
        let csv = seq.to_csv();
        assert!(csv.starts_with(
            "step_index,duration_us,omega_eff_rad_per_us,phase_eff_rad,detuning_rad_per_us"
        ));
        assert_eq!(csv.lines().count(), 4);
    }
}
