//! JSON run configuration: a flat mirror of the experiment spec with
//! snake_case keys. Rotations are given as axis-angle 3-vectors and applied
//! through the exponential map, so nobody has to type 9-entry matrices.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use spindrift::dynamics::{InertiaMatrix, PotentialParams, State};
use spindrift::experiments::{ExperimentSpec, Scenario, DEFAULT_SAMPLE_STRIDE, DRIFT_HORIZON};
use spindrift::integrators::{IntegratorKind, SolverConfig};
use spindrift::so3::expmap;
use spindrift::Vec3;

fn default_sample_stride() -> usize {
    DEFAULT_SAMPLE_STRIDE
}

fn default_solver_tolerance() -> f64 {
    SolverConfig::default().tolerance
}

fn default_solver_max_iterations() -> usize {
    SolverConfig::default().max_iterations
}

fn default_output() -> PathBuf {
    PathBuf::from("trajectory.csv")
}

/// One simulation run, as serialized to and from JSON. Unknown keys are
/// rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// One of "nmb", "vlv", "liemid-ea", "rk4".
    pub integrator: IntegratorKind,
    pub h: f64,
    pub t_final: f64,
    #[serde(default = "default_sample_stride")]
    pub sample_stride: usize,
    /// Principal moments (I₁, I₂, I₃).
    pub inertia: [f64; 3],
    /// Attraction strength α ≥ 0.
    pub alpha: f64,
    /// Axis-angle vector of the attraction configuration Q_m = exp(v).
    pub attractor_axis_angle: [f64; 3],
    /// Axis-angle vector of the initial configuration Q₀ = exp(v).
    pub initial_axis_angle: [f64; 3],
    /// Initial body angular velocity W₀.
    pub initial_angular_velocity: [f64; 3],
    #[serde(default = "default_solver_tolerance")]
    pub solver_tolerance: f64,
    #[serde(default = "default_solver_max_iterations")]
    pub solver_max_iterations: usize,
    /// CSV output path of `simulate`.
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

impl Default for RunConfig {
    /// The shipped default: the canonical bench scenario, integrated with
    /// Lie-Verlet at h = 0.25 over [0, 15000].
    fn default() -> Self {
        let half = 2.5 / f64::sqrt(2.0);
        Self {
            integrator: IntegratorKind::LieVerlet,
            h: 0.25,
            t_final: DRIFT_HORIZON,
            sample_stride: default_sample_stride(),
            inertia: [2.0, 2.0, 4.0],
            alpha: 0.3,
            attractor_axis_angle: [half, 0.0, half],
            initial_axis_angle: [0.0, 0.7227, 0.0],
            initial_angular_velocity: [0.0, 0.0, 0.625],
            solver_tolerance: default_solver_tolerance(),
            solver_max_iterations: default_solver_max_iterations(),
            output: default_output(),
        }
    }
}

fn finite_vec(name: &str, v: [f64; 3]) -> Result<Vec3> {
    if !v.iter().all(|x| x.is_finite()) {
        bail!("{name} must be finite, got {v:?}");
    }
    Ok(Vec3::new(v[0], v[1], v[2]))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: Self = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        Ok(config)
    }

    /// The physical setup described by this config.
    pub fn scenario(&self) -> Result<Scenario> {
        let inertia = InertiaMatrix::new(self.inertia[0], self.inertia[1], self.inertia[2])
            .context("key \"inertia\"")?;
        let attractor = expmap(&finite_vec("attractor_axis_angle", self.attractor_axis_angle)?);
        let potential =
            PotentialParams::new(self.alpha, attractor).context("key \"alpha\"")?;
        let initial = State {
            q: expmap(&finite_vec("initial_axis_angle", self.initial_axis_angle)?),
            w: finite_vec("initial_angular_velocity", self.initial_angular_velocity)?,
        };
        Ok(Scenario {
            inertia,
            potential,
            initial,
        })
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            tolerance: self.solver_tolerance,
            max_iterations: self.solver_max_iterations,
        }
    }

    pub fn to_spec(&self) -> Result<ExperimentSpec> {
        let scenario = self.scenario()?;
        let mut spec =
            ExperimentSpec::from_scenario(&scenario, self.integrator, self.h, self.t_final);
        spec.sample_stride = self.sample_stride;
        spec.solver = self.solver();
        spec.validate()?;
        Ok(spec)
    }
}
