//! The one-step maps and the fixed-point solver behind their implicit
//! velocity updates.
//!
//! Three symmetric second-order Lie-group methods are implemented:
//!
//! - [`step_lie_newmark`] — explicit half-kick, Cayley configuration
//!   update, implicit half-kick (implicit in the angular velocity only,
//!   never in the torque);
//! - [`step_lie_verlet`] — implicit half-velocity equation with a cubic
//!   (Wᵀ𝕀W)W correction entering the two half-kicks with opposite signs,
//!   Cayley configuration update, explicit second half;
//! - [`step_liemid_ea`] — composition of a half-step of a first-order
//!   Lie-midpoint method with its adjoint; two implicit increment solves
//!   per step, exponential-map configuration updates.
//!
//! All three remain on the group by construction (the configuration is
//! only ever multiplied by Cayley/exponential images), are symmetric
//! (step(−h)∘step(h) = id up to solver tolerance), and accept negative h.
//! [`step_rk4_reference`] integrates the flattened 12-dimensional system
//! without any projection and serves as the reference for order studies.

use crate::dynamics::{continuous_rhs_raw, torque, DynamicsError, InertiaMatrix, PotentialParams, State};
use crate::so3::{cay, expmap, Mat3, RotationMatrix, Vec3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("fixed-point iteration did not converge after {iterations} iterations (last increment {residual:.3e}, last iterate {last_iterate:?})")]
    NoConvergence {
        iterations: usize,
        last_iterate: Vec3,
        residual: f64,
    },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Convergence control for the implicit velocity updates.
///
/// The iteration stops once the increment sup-norm drops to `tolerance`;
/// the maps are O(h)-contractions at the bench step sizes, so the returned
/// iterate's residual is strictly smaller than the last increment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 50,
        }
    }
}

/// Outcome of one step: the new state and the largest fixed-point
/// iteration count across the step's implicit substeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub state: State,
    pub solver_iterations: usize,
}

/// Converged fixed point of a map, with the iteration count and the last
/// increment sup-norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointSolution {
    pub value: Vec3,
    pub iterations: usize,
    pub residual: f64,
}

/// Iterates v ← map(v) from `guess` until the increment sup-norm is at
/// most `cfg.tolerance`.
pub fn fixed_point_solve<F>(
    map: F,
    guess: Vec3,
    cfg: &SolverConfig,
) -> Result<FixedPointSolution, IntegratorError>
where
    F: Fn(&Vec3) -> Vec3,
{
    let mut v = guess;
    let mut increment = f64::INFINITY;
    for iteration in 1..=cfg.max_iterations {
        let next = map(&v);
        increment = (next - v).amax();
        v = next;
        if increment <= cfg.tolerance {
            return Ok(FixedPointSolution {
                value: v,
                iterations: iteration,
                residual: increment,
            });
        }
    }
    Err(IntegratorError::NoConvergence {
        iterations: cfg.max_iterations,
        last_iterate: v,
        residual: increment,
    })
}

/// Lie-Newmark step:
///
/// ```text
///     W₊ = W + (h/2) 𝕀⁻¹(𝕀W × W + τ(Q))            (explicit)
///     Q' = Q cay(h W₊)                              (explicit)
///     W' = W₊ + (h/2) 𝕀⁻¹(𝕀W' × W' + τ(Q'))        (implicit in W')
/// ```
pub fn step_lie_newmark(
    inertia: &InertiaMatrix,
    params: &PotentialParams,
    state: &State,
    h: f64,
    cfg: &SolverConfig,
) -> Result<StepResult, IntegratorError> {
    let tau_0 = torque(params, &state.q)?;
    let w = state.w;
    let w_half = w + 0.5 * h * inertia.apply_inverse(&(inertia.apply(&w).cross(&w) + tau_0));
    let q_next = state.q * cay(&(h * w_half));
    let tau_1 = torque(params, &q_next)?;
    let solution = fixed_point_solve(
        |v| w_half + 0.5 * h * inertia.apply_inverse(&(inertia.apply(v).cross(v) + tau_1)),
        w_half,
        cfg,
    )?;
    Ok(StepResult {
        state: State {
            q: q_next,
            w: solution.value,
        },
        solver_iterations: solution.iterations,
    })
}

/// Lie-Verlet step:
///
/// ```text
///     W₊ = W + (h/2) 𝕀⁻¹[𝕀W₊ × W₊ − (h/2)(W₊ᵀ𝕀W₊)W₊ + τ(Q)]   (implicit in W₊)
///     Q' = Q cay(h W₊)                                          (explicit)
///     W' = W₊ + (h/2) 𝕀⁻¹[𝕀W₊ × W₊ + (h/2)(W₊ᵀ𝕀W₊)W₊ + τ(Q')]  (explicit)
/// ```
///
/// The cubic term flips sign between the two half-kicks.
pub fn step_lie_verlet(
    inertia: &InertiaMatrix,
    params: &PotentialParams,
    state: &State,
    h: f64,
    cfg: &SolverConfig,
) -> Result<StepResult, IntegratorError> {
    let tau_0 = torque(params, &state.q)?;
    let w = state.w;
    let solution = fixed_point_solve(
        |v| {
            let momentum = inertia.apply(v);
            w + 0.5
                * h
                * inertia.apply_inverse(
                    &(momentum.cross(v) - 0.5 * h * v.dot(&momentum) * v + tau_0),
                )
        },
        w,
        cfg,
    )?;
    let w_half = solution.value;
    let q_next = state.q * cay(&(h * w_half));
    let tau_1 = torque(params, &q_next)?;
    let momentum = inertia.apply(&w_half);
    let w_next = w_half
        + 0.5
            * h
            * inertia.apply_inverse(
                &(momentum.cross(&w_half) + 0.5 * h * w_half.dot(&momentum) * w_half + tau_1),
            );
    Ok(StepResult {
        state: State {
            q: q_next,
            w: w_next,
        },
        solver_iterations: solution.iterations,
    })
}

/// Explicit Lie-midpoint composition step (two increment solves):
///
/// ```text
///     Θ₊ = (h/2) 𝕀⁻¹ exp(−Θ̂₊/2)(𝕀W + (h/2)τ(Q))   (implicit in Θ₊)
///     Q₊ = Q exp(Θ̂₊)
///     W₊ = 𝕀⁻¹ exp(−Θ̂₊)(𝕀W + (h/2)τ(Q))
///     Θ' = (h/2) 𝕀⁻¹ exp(−Θ̂'/2)(𝕀W₊)              (implicit in Θ')
///     Q' = Q₊ exp(Θ̂')
///     W' = 𝕀⁻¹(exp(−Θ̂')𝕀W₊ + (h/2)τ(Q'))
/// ```
///
/// The final velocity update reuses the just-solved second-half increment
/// Θ'; that choice is what makes the step the adjoint composition of its
/// first half, hence symmetric.
pub fn step_liemid_ea(
    inertia: &InertiaMatrix,
    params: &PotentialParams,
    state: &State,
    h: f64,
    cfg: &SolverConfig,
) -> Result<StepResult, IntegratorError> {
    let tau_0 = torque(params, &state.q)?;
    let m_0 = inertia.apply(&state.w) + 0.5 * h * tau_0;
    let first = fixed_point_solve(
        |theta| 0.5 * h * inertia.apply_inverse(&(expmap(&(-0.5 * theta)) * m_0)),
        0.5 * h * state.w,
        cfg,
    )?;
    let theta_half = first.value;
    let q_half = state.q * expmap(&theta_half);
    let w_half = inertia.apply_inverse(&(expmap(&(-theta_half)) * m_0));

    let m_half = inertia.apply(&w_half);
    let second = fixed_point_solve(
        |theta| 0.5 * h * inertia.apply_inverse(&(expmap(&(-0.5 * theta)) * m_half)),
        0.5 * h * w_half,
        cfg,
    )?;
    let theta_next = second.value;
    let q_next = q_half * expmap(&theta_next);
    let tau_1 = torque(params, &q_next)?;
    let w_next = inertia.apply_inverse(&(expmap(&(-theta_next)) * m_half + 0.5 * h * tau_1));
    Ok(StepResult {
        state: State {
            q: q_next,
            w: w_next,
        },
        solver_iterations: first.iterations.max(second.iterations),
    })
}

/// Classical RK4 on the flattened 12-dimensional system (9 entries of Q,
/// 3 of W). No projection back to the group is applied; the orthogonality
/// defect is the caller's diagnostic, not ours to repair.
pub fn step_rk4_reference(
    inertia: &InertiaMatrix,
    params: &PotentialParams,
    state: &State,
    h: f64,
) -> Result<State, DynamicsError> {
    let q = *state.q.matrix();
    let w = state.w;
    let (k1q, k1w) = continuous_rhs_raw(inertia, params, &q, &w)?;
    let (k2q, k2w) =
        continuous_rhs_raw(inertia, params, &(q + 0.5 * h * k1q), &(w + 0.5 * h * k1w))?;
    let (k3q, k3w) =
        continuous_rhs_raw(inertia, params, &(q + 0.5 * h * k2q), &(w + 0.5 * h * k2w))?;
    let (k4q, k4w) = continuous_rhs_raw(inertia, params, &(q + h * k3q), &(w + h * k3w))?;
    let q_next: Mat3 = q + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    let w_next = w + (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    Ok(State {
        q: RotationMatrix::new_unchecked(q_next),
        w: w_next,
    })
}

/// The one-step maps the bench knows how to drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntegratorKind {
    #[serde(rename = "nmb")]
    LieNewmark,
    #[serde(rename = "vlv")]
    LieVerlet,
    #[serde(rename = "liemid-ea")]
    LiemidEa,
    #[serde(rename = "rk4")]
    Rk4,
}

impl IntegratorKind {
    pub const ALL: [IntegratorKind; 4] = [
        IntegratorKind::LieNewmark,
        IntegratorKind::LieVerlet,
        IntegratorKind::LiemidEa,
        IntegratorKind::Rk4,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            IntegratorKind::LieNewmark => "nmb",
            IntegratorKind::LieVerlet => "vlv",
            IntegratorKind::LiemidEa => "liemid-ea",
            IntegratorKind::Rk4 => "rk4",
        }
    }
}

impl std::fmt::Display for IntegratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for IntegratorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nmb" => Ok(IntegratorKind::LieNewmark),
            "vlv" => Ok(IntegratorKind::LieVerlet),
            "liemid-ea" => Ok(IntegratorKind::LiemidEa),
            "rk4" => Ok(IntegratorKind::Rk4),
            other => Err(format!(
                "unknown integrator {other:?} (expected nmb, vlv, liemid-ea or rk4)"
            )),
        }
    }
}
