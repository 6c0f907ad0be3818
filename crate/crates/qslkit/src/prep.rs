//! Dissipative preparation of a target (thermal) state: the control
//! Hamiltonian of the preparation stage, the engineered decay channel, the
//! Uhlmann fidelity objective, and a seeded cross-entropy optimizer over
//! piecewise-constant pulse tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{propagate_lindblad, LindbladModel, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::generators::pauli;
use crate::linalg::{cr, CMatrix};
use crate::states::DensityMatrix;

/// Controls of one preparation step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControls {
    /// sigma_y control (rad/us), applied as 2 f1 sigma_y.
    pub f1: f64,
    /// sigma_x control (rad/us), applied as 2 f2 sigma_x.
    pub f2: f64,
    /// Laser detuning (rad/us), applied as (delta/2) sigma_z.
    pub delta: f64,
}

/// Full piecewise-constant preparation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepControls {
    /// Base Rabi frequency Omega_i (rad/us).
    pub omega_i: f64,
    /// Step length (us).
    pub step_duration: f64,
    pub steps: Vec<StepControls>,
}

impl PrepControls {
    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn total_duration(&self) -> f64 {
        self.step_duration * self.steps.len() as f64
    }

    /// Effective single-beam pulse parameters of step `k`:
    /// `omega = sqrt(16 f1^2 + (Omega_i + 4 f2)^2)`,
    /// `phase = atan2(-4 f1, Omega_i + 4 f2)`, derived by coefficient
    /// matching on the step Hamiltonian.
    pub fn effective_pulse(&self, step: usize) -> Result<(f64, f64)> {
        let c = self
            .steps
            .get(step)
            .ok_or_else(|| Error::invalid(format!("step {step} out of range")))?;
        let x = self.omega_i + 4.0 * c.f2;
        let y = 4.0 * c.f1;
        Ok(((x * x + y * y).sqrt(), f64::atan2(-y, x)))
    }
}

/// Step Hamiltonian
/// `H = (delta/2) sigma_z + (Omega_i/2) sigma_x + 2 f1 sigma_y + 2 f2 sigma_x`.
pub fn prep_hamiltonian(controls: &PrepControls, step: usize) -> Result<CMatrix> {
    let c = controls
        .steps
        .get(step)
        .ok_or_else(|| Error::invalid(format!("step {step} out of range")))?;
    let [sx, sy, sz] = pauli();
    Ok(sx.mapv(|z| z * cr(controls.omega_i / 2.0 + 2.0 * c.f2))
        + sy.mapv(|z| z * cr(2.0 * c.f1))
        + sz.mapv(|z| z * cr(c.delta / 2.0)))
}

/// Engineered decay rate `gamma_eff = Omega_1^2 / Gamma` from adiabatic
/// elimination of the auxiliary level.
pub fn gamma_eff(omega1: f64, big_gamma: f64) -> Result<f64> {
    if !(big_gamma > 0.0) {
        return Err(Error::invalid(format!("Gamma must be > 0, got {big_gamma}")));
    }
    Ok(omega1 * omega1 / big_gamma)
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`. For qubits the
/// closed form `tr(rho sigma) + 2 sqrt(det rho det sigma)` is used.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "uhlmann_fidelity: {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    if rho.dim() == 2 {
        let det = |m: &CMatrix| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
        let overlap = crate::linalg::trace(&rho.matrix().dot(sigma.matrix())).re;
        let d = (det(rho.matrix()).max(0.0) * det(sigma.matrix()).max(0.0)).sqrt();
        return Ok((overlap + 2.0 * d).clamp(0.0, 1.0));
    }
    // general route through the matrix square roots
    let sqrt_m = |m: &CMatrix| -> Result<CMatrix> {
        let (vals, vecs) = crate::linalg::hermitian_eig(m)?;
        let n = vals.len();
        let mut d = CMatrix::zeros((n, n));
        for (k, v) in vals.iter().enumerate() {
            d[(k, k)] = cr(v.max(0.0).sqrt());
        }
        Ok(vecs.dot(&d).dot(&crate::linalg::dagger(&vecs)))
    };
    let sr = sqrt_m(rho.matrix())?;
    let inner = sr.dot(sigma.matrix()).dot(&sr);
    let (vals, _) = crate::linalg::hermitian_eig(&inner)?;
    let tr: f64 = vals.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

/// Static description of the preparation stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrepSetup {
    pub omega_i: f64,
    pub n_steps: usize,
    pub step_duration: f64,
    pub gamma_eff: f64,
}

impl Default for PrepSetup {
    fn default() -> Self {
        let omega_i = 2.0 * std::f64::consts::PI * 0.02; // 20 kHz
        Self {
            omega_i,
            n_steps: 13,
            step_duration: 0.125 / omega_i,
            gamma_eff: 2.0 * std::f64::consts::PI * 0.04,
        }
    }
}

/// Cross-entropy optimizer settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub population: usize,
    pub elite_fraction: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Bound on |f1|, |f2| and |delta| (rad/us).
    pub control_bounds: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            population: 32,
            elite_fraction: 0.25,
            iterations: 15,
            seed: 7,
            control_bounds: 2.0 * std::f64::consts::PI * 0.05,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 8 {
            return Err(Error::invalid("optimizer population must be >= 8"));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("optimizer needs at least one iteration"));
        }
        if !(0.0..1.0).contains(&self.elite_fraction) || self.elite_fraction == 0.0 {
            return Err(Error::invalid("elite_fraction must lie in (0, 1)"));
        }
        if !(self.control_bounds > 0.0) {
            return Err(Error::invalid("control_bounds must be > 0"));
        }
        Ok(())
    }
}

/// Outcome of a preparation run.
#[derive(Debug, Clone)]
pub struct PrepResult {
    pub controls: PrepControls,
    pub final_state: DensityMatrix,
    pub fidelity: f64,
    pub episodes_used: usize,
    /// True when the optimizer reached the 0.99 target.
    pub converged: bool,
    /// Best-so-far fidelity after each iteration (monotone).
    pub best_history: Vec<f64>,
}

/// Simulate one control table from |g> through the dissipative channel.
pub fn simulate_prep(controls: &PrepControls, gamma: f64) -> Result<Trajectory> {
    let n = controls.n_steps();
    if n == 0 {
        return Err(Error::invalid("simulate_prep: empty control table"));
    }
    let total = controls.total_duration();
    let step_duration = controls.step_duration;
    let hams: Vec<CMatrix> = (0..n).map(|k| prep_hamiltonian(controls, k)).collect::<Result<_>>()?;
    let h = move |t: f64| -> Result<CMatrix> {
        let k = ((t / step_duration) as usize).min(n - 1);
        Ok(hams[k].clone())
    };
    let model = LindbladModel::new(Box::new(h), LindbladModel::qubit_decay(), gamma)?;
    let ground = DensityMatrix::from_pure(&ndarray::Array1::from(vec![cr(1.0), cr(0.0)]))?;
    // one output per step boundary so the recorded points line up with the
    // staircase
    let grid = TimeGrid::new(0.0, total, n + 1, 1)?;
    propagate_lindblad(&model, &ground, &grid)
}

fn controls_from_params(setup: &PrepSetup, params: &[f64]) -> PrepControls {
    let steps = params
        .chunks_exact(3)
        .map(|c| StepControls {
            f1: c[0],
            f2: c[1],
            delta: c[2],
        })
        .collect();
    PrepControls {
        omega_i: setup.omega_i,
        step_duration: setup.step_duration,
        steps,
    }
}

/// Cross-entropy search for a control table preparing `target` from |g>
/// through the dissipative channel: sample Gaussian control tables, score by
/// Uhlmann fidelity, refit on the elite fraction. Deterministic given the
/// seed; episodes are scored on independent RNG streams split from it.
pub fn optimize_prep(
    target: &DensityMatrix,
    setup: &PrepSetup,
    config: &OptimizerConfig,
) -> Result<PrepResult> {
    config.validate()?;
    if target.dim() != 2 {
        return Err(Error::invalid("optimize_prep: target must be a qubit state"));
    }
    if setup.n_steps == 0 || !(setup.step_duration > 0.0) {
        return Err(Error::invalid("optimize_prep: invalid step layout"));
    }
    let dim = 3 * setup.n_steps;
    let bounds = config.control_bounds;
    let mut mean = vec![0.0; dim];
    let mut std = vec![bounds / 2.0; dim];
    let n_elite = ((config.population as f64 * config.elite_fraction).ceil() as usize).max(1);
    let smoothing = 0.7;
    let std_floor = 0.01 * bounds;

    let score = |params: &[f64]| -> Result<(f64, DensityMatrix)> {
        let controls = controls_from_params(setup, params);
        let traj = simulate_prep(&controls, setup.gamma_eff)?;
        let last = traj.states.last().expect("nonempty trajectory").clone();
        Ok((uhlmann_fidelity(&last, target)?, last))
    };

    let mut best_params = mean.clone();
    let mut best_fid = f64::NEG_INFINITY;
    let mut history = Vec::with_capacity(config.iterations);
    let mut episodes = 0;

    for iter in 0..config.iterations {
        let mut scored: Vec<(f64, Vec<f64>)> = Vec::with_capacity(config.population);
        for e in 0..config.population {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream((iter * config.population + e) as u64 + 1);
            let params: Vec<f64> = (0..dim)
                .map(|d| {
                    let z: f64 = sample_standard_normal(&mut rng);
                    (mean[d] + std[d] * z).clamp(-bounds, bounds)
                })
                .collect();
            let (fid, _) = score(&params)?;
            episodes += 1;
            if fid > best_fid {
                best_fid = fid;
                best_params = params.clone();
            }
            scored.push((fid, params));
        }
        scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let elites = &scored[..n_elite];
        for d in 0..dim {
            let m: f64 = elites.iter().map(|(_, p)| p[d]).sum::<f64>() / n_elite as f64;
            let v: f64 = elites.iter().map(|(_, p)| (p[d] - m).powi(2)).sum::<f64>()
                / n_elite as f64;
            mean[d] = smoothing * m + (1.0 - smoothing) * mean[d];
            std[d] = (smoothing * v.sqrt() + (1.0 - smoothing) * std[d]).max(std_floor);
        }
        history.push(best_fid);
    }

    // the reported fidelity is an independent re-simulation of the winner
    let (fidelity, final_state) = score(&best_params)?;
    Ok(PrepResult {
        controls: controls_from_params(setup, &best_params),
        final_state,
        fidelity,
        episodes_used: episodes,
        converged: fidelity >= 0.99,
        best_history: history,
    })
}

/// Box-Muller standard normal draw.
fn sample_standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
