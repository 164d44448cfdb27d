//! The mechanical model: a rigid body with diagonal inertia in a static
//! potential field on SO(3).
//!
//! The potential is a sum of a bounded shell term, minimized on the set
//! dist(Q, I) = 1, and an unbounded attraction toward a fixed
//! configuration:
//!
//! ```text
//!     U_α(Q) = (dist(Q, I) − 1)² − α / dist(Q, Q_m)
//! ```
//!
//! The torque enters the balance law through the directional derivative
//! τ(Q)ᵀy = −DU(Q)·Qŷ and is implemented in closed form (validated against
//! a central-difference oracle in the tests):
//!
//! ```text
//!     τ(Q) = −(2(d_I − 1)/d_I) vee(Q − Qᵀ) − (α/d_m³) vee(M − Mᵀ)
//! ```
//!
//! with d_I = dist(Q, I), d_m = dist(Q, Q_m), M = Q_mᵀQ.

use crate::so3::{dist_raw, hat, vee_unchecked, Mat3, RotationMatrix, Vec3};
use thiserror::Error;

/// Below this distance the gradient factors 1/d_I and α/d_m³ are treated
/// as singular. Chosen far under anything the bench trajectories reach.
pub const SINGULARITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("inertia moments must be positive, got ({i1}, {i2}, {i3})")]
    NonPositiveInertia { i1: f64, i2: f64, i3: f64 },
    #[error("attraction strength must be nonnegative, got {alpha}")]
    NegativeAlpha { alpha: f64 },
    #[error("configuration within {SINGULARITY_TOL:.0e} of the attractor (dist = {dist:.3e}); potential is singular")]
    SingularPotential { dist: f64 },
    #[error("configuration within {SINGULARITY_TOL:.0e} of the identity (dist = {dist:.3e}); shell-term gradient is singular")]
    SingularGradient { dist: f64 },
}

/// Diagonal positive-definite inertia tensor 𝕀 = diag(I₁, I₂, I₃).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaMatrix {
    moments: Vec3,
}

impl InertiaMatrix {
    pub fn new(i1: f64, i2: f64, i3: f64) -> Result<Self, DynamicsError> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !(positive(i1) && positive(i2) && positive(i3)) {
            return Err(DynamicsError::NonPositiveInertia { i1, i2, i3 });
        }
        Ok(Self {
            moments: Vec3::new(i1, i2, i3),
        })
    }

    /// The principal moments (I₁, I₂, I₃).
    pub fn moments(&self) -> Vec3 {
        self.moments
    }

    /// 𝕀w — the body angular momentum of angular velocity w.
    #[inline]
    pub fn apply(&self, w: &Vec3) -> Vec3 {
        self.moments.component_mul(w)
    }

    /// 𝕀⁻¹v.
    #[inline]
    pub fn apply_inverse(&self, v: &Vec3) -> Vec3 {
        v.component_div(&self.moments)
    }
}

/// The potential's tuning parameter α ≥ 0 and attraction point Q_m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    alpha: f64,
    attractor: RotationMatrix,
}

impl PotentialParams {
    pub fn new(alpha: f64, attractor: RotationMatrix) -> Result<Self, DynamicsError> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(DynamicsError::NegativeAlpha { alpha });
        }
        Ok(Self { alpha, attractor })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn attractor(&self) -> &RotationMatrix {
        &self.attractor
    }
}

/// The evolved pair (Q, W): configuration and body angular velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub q: RotationMatrix,
    pub w: Vec3,
}

/// T(W) = ½ Wᵀ𝕀W.
pub fn kinetic_energy(inertia: &InertiaMatrix, w: &Vec3) -> f64 {
    0.5 * w.dot(&inertia.apply(w))
}

/// U_α(Q) = (dist(Q, I) − 1)² − α/dist(Q, Q_m).
pub fn potential(params: &PotentialParams, q: &RotationMatrix) -> Result<f64, DynamicsError> {
    potential_raw(params, q.matrix())
}

pub(crate) fn potential_raw(params: &PotentialParams, q: &Mat3) -> Result<f64, DynamicsError> {
    let d_m = dist_raw(params.attractor.matrix(), q);
    if d_m <= SINGULARITY_TOL {
        return Err(DynamicsError::SingularPotential { dist: d_m });
    }
    let d_i = dist_raw(&Mat3::identity(), q);
    Ok((d_i - 1.0).powi(2) - params.alpha / d_m)
}

/// The torque of U_α in closed form (see the module docs).
pub fn torque(params: &PotentialParams, q: &RotationMatrix) -> Result<Vec3, DynamicsError> {
    torque_raw(params, q.matrix())
}

pub(crate) fn torque_raw(params: &PotentialParams, q: &Mat3) -> Result<Vec3, DynamicsError> {
    let d_m = dist_raw(params.attractor.matrix(), q);
    if d_m <= SINGULARITY_TOL {
        return Err(DynamicsError::SingularPotential { dist: d_m });
    }
    let d_i = dist_raw(&Mat3::identity(), q);
    if d_i <= SINGULARITY_TOL {
        return Err(DynamicsError::SingularGradient { dist: d_i });
    }
    let shell = (2.0 * (d_i - 1.0) / d_i) * vee_unchecked(&(q - q.transpose()));
    let m = params.attractor.matrix().transpose() * q;
    let attraction = (params.alpha / (d_m * d_m * d_m)) * vee_unchecked(&(m - m.transpose()));
    Ok(-(shell + attraction))
}

/// E(Q, W) = T(W) + U_α(Q).
pub fn total_energy(
    inertia: &InertiaMatrix,
    params: &PotentialParams,
    state: &State,
) -> Result<f64, DynamicsError> {
    Ok(kinetic_energy(inertia, &state.w) + potential(params, &state.q)?)
}

/// Right-hand side of the governing equations:
/// Q̇ = QŴ and Ẇ = 𝕀⁻¹(𝕀W × W + τ(Q)).
pub fn continuous_rhs(
    inertia: &InertiaMatrix,
    params: &PotentialParams,
    state: &State,
) -> Result<(Mat3, Vec3), DynamicsError> {
    continuous_rhs_raw(inertia, params, state.q.matrix(), &state.w)
}

// Raw variant for the RK4 reference integrator, whose internal stages sit
// slightly off the group; the formulas extend smoothly off the manifold.
pub(crate) fn continuous_rhs_raw(
    inertia: &InertiaMatrix,
    params: &PotentialParams,
    q: &Mat3,
    w: &Vec3,
) -> Result<(Mat3, Vec3), DynamicsError> {
    let tau = torque_raw(params, q)?;
    let q_dot = q * hat(w);
    let w_dot = inertia.apply_inverse(&(inertia.apply(w).cross(w) + tau));
    Ok((q_dot, w_dot))
}
