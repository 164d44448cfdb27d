//! Shared helpers for the integration suites: a straight-line
//! transcription of each iteration rule, kept deliberately naive (local
//! hat/Cayley/exponential formulas on raw matrices, a brute-force
//! 200-iteration fixed-point loop with no convergence test) so it stays
//! independent of the library's stepper implementations.
#![allow(dead_code)]

use spindrift::dynamics::{torque, InertiaMatrix, PotentialParams, State};
use spindrift::so3::expmap;
use spindrift::{Mat3, RotationMatrix, Vec3};

use rand::rngs::StdRng;
use rand::Rng;

pub const BRUTE_FORCE_ITERATIONS: usize = 200;

#[rustfmt::skip]
fn hat_t(v: &Vec3) -> Mat3 {
    Mat3::new(
        0.0,  -v.z,  v.y,
        v.z,   0.0, -v.x,
       -v.y,   v.x,  0.0,
    )
}

fn cay_t(x: &Vec3) -> Mat3 {
    let n2 = x.dot(x);
    let xh = hat_t(x);
    Mat3::identity() + (4.0 / (4.0 + n2)) * xh + (2.0 / (4.0 + n2)) * (xh * xh)
}

fn exp_t(x: &Vec3) -> Mat3 {
    let n2 = x.dot(x);
    if n2 < 1e-30 {
        return Mat3::identity() + hat_t(x);
    }
    let angle = n2.sqrt();
    let xh = hat_t(x);
    Mat3::identity() + (angle.sin() / angle) * xh + ((1.0 - angle.cos()) / n2) * (xh * xh)
}

fn brute_force_fixed_point(map: impl Fn(&Vec3) -> Vec3, guess: Vec3) -> Vec3 {
    let mut v = guess;
    for _ in 0..BRUTE_FORCE_ITERATIONS {
        v = map(&v);
    }
    v
}

fn apply_inertia(inertia: &InertiaMatrix, w: &Vec3) -> Vec3 {
    let m = inertia.moments();
    Vec3::new(m.x * w.x, m.y * w.y, m.z * w.z)
}

fn apply_inertia_inverse(inertia: &InertiaMatrix, v: &Vec3) -> Vec3 {
    let m = inertia.moments();
    Vec3::new(v.x / m.x, v.y / m.y, v.z / m.z)
}

pub fn naive_lie_newmark(
    inertia: &InertiaMatrix,
    params: &PotentialParams,
    state: &State,
    h: f64,
) -> State {
    let w = state.w;
    let tau_0 = torque(params, &state.q).unwrap();
    let w_half = w
        + 0.5 * h * apply_inertia_inverse(inertia, &(apply_inertia(inertia, &w).cross(&w) + tau_0));
    let q_next = RotationMatrix::new_unchecked(state.q.matrix() * cay_t(&(h * w_half)));
    let tau_1 = torque(params, &q_next).unwrap();
    let w_next = brute_force_fixed_point(
        |v| {
            w_half
                + 0.5
                    * h
                    * apply_inertia_inverse(inertia, &(apply_inertia(inertia, v).cross(v) + tau_1))
        },
        w_half,
    );
    State { q: q_next, w: w_next }
}

pub fn naive_lie_verlet(
    inertia: &InertiaMatrix,
    params: &PotentialParams,
    state: &State,
    h: f64,
) -> State {
    let w = state.w;
    let tau_0 = torque(params, &state.q).unwrap();
    let w_half = brute_force_fixed_point(
        |v| {
            let iv = apply_inertia(inertia, v);
            w + 0.5
                * h
                * apply_inertia_inverse(inertia, &(iv.cross(v) - 0.5 * h * v.dot(&iv) * v + tau_0))
        },
        w,
    );
    let q_next = RotationMatrix::new_unchecked(state.q.matrix() * cay_t(&(h * w_half)));
    let tau_1 = torque(params, &q_next).unwrap();
    let iw = apply_inertia(inertia, &w_half);
    let w_next = w_half
        + 0.5
            * h
            * apply_inertia_inverse(
                inertia,
                &(iw.cross(&w_half) + 0.5 * h * w_half.dot(&iw) * w_half + tau_1),
            );
    State { q: q_next, w: w_next }
}

pub fn naive_liemid_ea(
    inertia: &InertiaMatrix,
    params: &PotentialParams,
    state: &State,
    h: f64,
) -> State {
    let tau_0 = torque(params, &state.q).unwrap();
    let m_0 = apply_inertia(inertia, &state.w) + 0.5 * h * tau_0;
    let theta_half = brute_force_fixed_point(
        |theta| 0.5 * h * apply_inertia_inverse(inertia, &(exp_t(&(-0.5 * theta)) * m_0)),
        0.5 * h * state.w,
    );
    let q_half = RotationMatrix::new_unchecked(state.q.matrix() * exp_t(&theta_half));
    let w_half = apply_inertia_inverse(inertia, &(exp_t(&(-theta_half)) * m_0));
    let m_half = apply_inertia(inertia, &w_half);
    let theta_next = brute_force_fixed_point(
        |theta| 0.5 * h * apply_inertia_inverse(inertia, &(exp_t(&(-0.5 * theta)) * m_half)),
        0.5 * h * w_half,
    );
    let q_next = RotationMatrix::new_unchecked(q_half.matrix() * exp_t(&theta_next));
    let tau_1 = torque(params, &q_next).unwrap();
    let w_next =
        apply_inertia_inverse(inertia, &(exp_t(&(-theta_next)) * m_half + 0.5 * h * tau_1));
    State { q: q_next, w: w_next }
}

pub fn random_state(rng: &mut StdRng) -> State {
    State {
        q: expmap(&Vec3::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        )),
        w: Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ),
    }
}
