//! Rigid-body integrators on the rotation group and a long-horizon
//! energy-drift test bench.
//!
//! The library simulates a single rigid body with diagonal inertia in a
//! static potential field on SO(3),
//!
//! ```text
//!     Q' = Q Ŵ,        𝕀 W' = 𝕀W × W + τ(Q),
//! ```
//!
//! with three symmetric second-order one-step maps (Lie-Newmark, Lie-Verlet
//! and the explicit Lie-midpoint composition LIEMID\[EA\]) plus a fixed-step
//! RK4 reference integrator. The [`experiments`] module runs long-horizon
//! energy-error studies that classify each method as drifting or bounded,
//! and time-precision studies that measure observed convergence order.
//!
//! Modules
//! - [`so3`] — hat/vee, Cayley and exponential maps, log, Frobenius metric.
//! - [`dynamics`] — inertia, energies, the shell-plus-attractor potential
//!   and its torque.
//! - [`integrators`] — the one-step maps and the fixed-point solver for
//!   their implicit velocity updates.
//! - [`experiments`] — trajectory simulation, drift fits, order studies,
//!   and the stress-test suite.

pub mod dynamics;
pub mod experiments;
pub mod integrators;
pub mod so3;

pub use so3::{Mat3, RotationMatrix, Vec3};
