//! Rotation-group and Lie-algebra primitives for SO(3).
//!
//! The Lie algebra so(3) is identified with ℝ³ through the hat map
//! ([`hat`]/[`vee`]). Two maps from the algebra onto the group are
//! provided: the Cayley transform [`cay`] (a second-order approximation of
//! the exponential) and the exponential map [`expmap`] (Rodrigues formula),
//! together with the axis-angle projection [`logmap`] and the metric
//! [`dist`] induced by the Frobenius norm.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

/// 3-vector: body angular velocities, axis-angle vectors, torques.
pub type Vec3 = Vector3<f64>;
/// General 3×3 real matrix.
pub type Mat3 = Matrix3<f64>;

/// Constructor tolerance on ‖QᵀQ − I‖_F and |det Q − 1|.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;
/// Skewness tolerance for [`vee`], on ‖S + Sᵀ‖_F.
pub const SKEW_TOL: f64 = 1e-9;
/// Rotation angles closer to π than this margin have an ill-conditioned
/// axis; [`logmap`] refuses them.
pub const NEAR_PI_MARGIN: f64 = 1e-6;

// Below this angle the trigonometric coefficients of the Rodrigues and log
// formulas switch to 4th-order Taylor expansions to avoid cancellation.
const SMALL_ANGLE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum So3Error {
    #[error("matrix is not skew-symmetric: ‖S + Sᵀ‖_F = {defect:.3e}")]
    NotSkew { defect: f64 },
    #[error("matrix is not orthogonal: ‖QᵀQ − I‖_F = {defect:.3e}")]
    NotOrthogonal { defect: f64 },
    #[error("matrix has determinant {det}, not +1")]
    NotSpecial { det: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("rotation angle {angle} is within {NEAR_PI_MARGIN} of π; axis is ill-conditioned")]
    NearPi { angle: f64 },
}

/// An element of SO(3): a 3×3 orthogonal matrix with determinant +1.
///
/// [`try_new`](Self::try_new) checks the group invariants and never
/// repairs its input. Products of group elements and images of
/// [`cay`]/[`expmap`] are taken to be in the group; the rounding defect
/// they accumulate is observable through
/// [`orthogonality_defect`](Self::orthogonality_defect) and is
/// deliberately never re-orthonormalized away, so that drift in the
/// defect stays visible as a diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Mat3);

impl RotationMatrix {
    /// Validates ‖QᵀQ − I‖_F ≤ 1e−10 and det Q ∈ 1 ± 1e−10.
    pub fn try_new(m: Mat3) -> Result<Self, So3Error> {
        if !m.iter().all(|x| x.is_finite()) {
            return Err(So3Error::NonFinite);
        }
        let defect = (m.transpose() * m - Mat3::identity()).norm();
        if defect > ORTHOGONALITY_TOL {
            return Err(So3Error::NotOrthogonal { defect });
        }
        let det = m.determinant();
        if (det - 1.0).abs() > ORTHOGONALITY_TOL {
            return Err(So3Error::NotSpecial { det });
        }
        Ok(Self(m))
    }

    /// Wraps a matrix the caller guarantees to be in SO(3) (up to
    /// rounding), e.g. a product of group elements.
    pub fn new_unchecked(m: Mat3) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    /// The transpose, which is also the group inverse.
    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// ‖QᵀQ − I‖_F, the accumulated rounding defect.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat3::identity()).norm()
    }
}

impl std::ops::Mul for RotationMatrix {
    type Output = RotationMatrix;

    fn mul(self, rhs: RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

impl std::ops::Mul<Vec3> for RotationMatrix {
    type Output = Vec3;

    fn mul(self, v: Vec3) -> Vec3 {
        self.0 * v
    }
}

/// The hat map: `hat(v) w = v × w`.
///
/// ```text
///         ⎡  0   −v₃   v₂ ⎤
/// hat(v) =⎢  v₃   0   −v₁ ⎥
///         ⎣ −v₂   v₁   0  ⎦
/// ```
#[rustfmt::skip]
pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(
        0.0,  -v.z,  v.y,
        v.z,   0.0, -v.x,
       -v.y,   v.x,  0.0,
    )
}

/// Inverse of the hat map. Requires ‖S + Sᵀ‖_F ≤ 1e−9.
pub fn vee(s: &Mat3) -> Result<Vec3, So3Error> {
    let defect = (s + s.transpose()).norm();
    if defect > SKEW_TOL {
        return Err(So3Error::NotSkew { defect });
    }
    Ok(vee_unchecked(s))
}

/// Component extraction (S₃₂, S₁₃, S₂₁) without the skewness check, for
/// matrices that are skew by construction.
#[inline]
pub(crate) fn vee_unchecked(s: &Mat3) -> Vec3 {
    Vec3::new(s[(2, 1)], s[(0, 2)], s[(1, 0)])
}

/// The Cayley transform (I − x̂/2)⁻¹(I + x̂/2) in closed form:
///
/// ```text
/// cay(x) = I + 4/(4 + |x|²) x̂ + 2/(4 + |x|²) x̂²
/// ```
///
/// A rotation about x/|x| by the angle 2·atan(|x|/2); agrees with
/// [`expmap`] to third order at the origin. The squared norm in the
/// denominators is what keeps the image orthogonal.
pub fn cay(x: &Vec3) -> RotationMatrix {
    let n2 = x.norm_squared();
    let xh = hat(x);
    RotationMatrix(Mat3::identity() + (4.0 / (4.0 + n2)) * xh + (2.0 / (4.0 + n2)) * (xh * xh))
}

/// The exponential map (Rodrigues formula): rotation about x/|x| by |x|.
pub fn expmap(x: &Vec3) -> RotationMatrix {
    let n2 = x.norm_squared();
    let angle = n2.sqrt();
    // sin θ/θ and (1 − cos θ)/θ² go 0/0 at the origin; switch to their
    // 4th-order expansions below SMALL_ANGLE.
    let (a, b) = if angle < SMALL_ANGLE {
        (
            1.0 - n2 / 6.0 + n2 * n2 / 120.0,
            0.5 - n2 / 24.0 + n2 * n2 / 720.0,
        )
    } else {
        (angle.sin() / angle, (1.0 - angle.cos()) / n2)
    };
    let xh = hat(x);
    RotationMatrix(Mat3::identity() + a * xh + b * (xh * xh))
}

/// Axis-angle projection: the vector x with |x| = θ and expmap(x) = Q.
///
/// Fails with [`So3Error::NearPi`] for θ ≥ π − 1e−6, where the axis is
/// ill-conditioned.
pub fn logmap(q: &RotationMatrix) -> Result<Vec3, So3Error> {
    let m = q.matrix();
    let cos_angle = ((m.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let angle = cos_angle.acos();
    if angle >= std::f64::consts::PI - NEAR_PI_MARGIN {
        return Err(So3Error::NearPi { angle });
    }
    // Q − Qᵀ = 2 (sin θ/θ) x̂, so the skew part scaled by θ/(2 sin θ)
    // recovers x.
    let g = if angle < SMALL_ANGLE {
        let a2 = angle * angle;
        0.5 + a2 / 12.0 + 7.0 * a2 * a2 / 720.0
    } else {
        angle / (2.0 * angle.sin())
    };
    Ok(g * vee_unchecked(&(m - m.transpose())))
}

/// The metric induced by the Frobenius norm,
/// dist(Q₁, Q₂) = √(2 tr(I − Q₁ᵀQ₂)) = ‖Q₂ − Q₁‖_F, with range [0, 2√2].
pub fn dist(q1: &RotationMatrix, q2: &RotationMatrix) -> f64 {
    dist_raw(q1.matrix(), q2.matrix())
}

// The radicand is clamped at zero: it can only go negative by rounding.
#[inline]
pub(crate) fn dist_raw(a: &Mat3, b: &Mat3) -> f64 {
    (2.0 * (3.0 - a.dot(b))).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_vec(rng: &mut StdRng, scale: f64) -> Vec3 {
        Vec3::new(
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
        )
    }

    fn random_rotation(rng: &mut StdRng) -> RotationMatrix {
        expmap(&random_vec(rng, 2.5))
    }

    #[test]
    fn hat_matches_displayed_form() {
        let m = hat(&Vec3::new(1.0, 2.0, 3.0));
        #[rustfmt::skip]
        let expected = Mat3::new(
            0.0, -3.0,  2.0,
            3.0,  0.0, -1.0,
           -2.0,  1.0,  0.0,
        );
        assert_eq!(m, expected);
        assert_eq!(hat(&Vec3::zeros()), Mat3::zeros());
    }

    #[test]
    fn hat_of_vector_annihilates_itself() {
        let v = Vec3::new(0.3, -1.2, 2.0);
        assert_eq!(hat(&v) * v, Vec3::zeros());
    }

    #[test]
    fn vee_inverts_hat() {
        let v = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(vee(&hat(&v)).unwrap(), v);
        assert_eq!(vee(&Mat3::zeros()).unwrap(), Vec3::zeros());
        #[rustfmt::skip]
        let s = Mat3::new(
            0.0, -3.0,  2.0,
            3.0,  0.0, -1.0,
           -2.0,  1.0,  0.0,
        );
        assert_eq!(vee(&s).unwrap(), v);
    }

    #[test]
    fn vee_rejects_non_skew() {
        let err = vee(&Mat3::identity()).unwrap_err();
        assert!(matches!(err, So3Error::NotSkew { .. }));
    }

    #[test]
    fn cay_at_zero_is_identity() {
        assert_eq!(cay(&Vec3::zeros()), RotationMatrix::identity());
    }

    #[test]
    fn cay_quarter_turn() {
        // |x| = 2 gives angle 2·atan(1) = π/2 about e₁.
        let q = cay(&Vec3::new(2.0, 0.0, 0.0));
        #[rustfmt::skip]
        let expected = Mat3::new(
            1.0, 0.0,  0.0,
            0.0, 0.0, -1.0,
            0.0, 1.0,  0.0,
        );
        assert_abs_diff_eq!(*q.matrix(), expected, epsilon = 1e-15);
    }

    #[test]
    fn cay_lands_on_group() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let x = random_vec(&mut rng, 10.0);
            let q = cay(&x);
            let defect = (q.matrix().transpose() * q.matrix() - Mat3::identity()).norm();
            assert!(defect <= 1e-12, "defect {defect} at x = {x:?}");
        }
    }

    #[test]
    fn expmap_special_values() {
        assert_eq!(expmap(&Vec3::zeros()), RotationMatrix::identity());
        let half_turn = expmap(&Vec3::new(std::f64::consts::PI, 0.0, 0.0));
        let expected = Mat3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0));
        assert_abs_diff_eq!(*half_turn.matrix(), expected, epsilon = 1e-15);
    }

    #[test]
    fn cay_agrees_with_expmap_to_third_order() {
        // ‖exp(x) − cay(x)‖_F = (√2/12)|x|³ + O(|x|⁴); the ratio e/s³
        // must be near-constant across scales (√2/12 ≈ 0.1179).
        let u = Vec3::new(0.36, -0.48, 0.8);
        for s in [1e-1, 1e-2, 1e-3] {
            let x = s * u;
            let e = (expmap(&x).matrix() - cay(&x).matrix()).norm();
            let ratio = e / (s * s * s);
            assert!(
                (0.09..0.15).contains(&ratio),
                "cubic ratio {ratio} out of range at s = {s}"
            );
        }
    }

    #[test]
    fn logmap_special_values() {
        assert_eq!(logmap(&RotationMatrix::identity()).unwrap(), Vec3::zeros());
        let v = Vec3::new(0.0, 0.7227, 0.0);
        let back = logmap(&expmap(&v)).unwrap();
        assert_abs_diff_eq!(back, v, epsilon = 1e-12);
    }

    #[test]
    fn logmap_round_trips_below_pi() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let mut v = random_vec(&mut rng, 1.0);
            if v.norm() < 1e-9 {
                continue;
            }
            v *= rng.random_range(0.0..3.0) / v.norm();
            let back = logmap(&expmap(&v)).unwrap();
            assert_abs_diff_eq!(back, v, epsilon = 1e-9);
            let q = expmap(&logmap(&expmap(&v)).unwrap());
            assert_abs_diff_eq!(*q.matrix(), *expmap(&v).matrix(), epsilon = 1e-9);
        }
    }

    #[test]
    fn logmap_magnitude_is_rotation_angle() {
        let v = Vec3::new(0.3, -0.4, 1.2);
        let q = expmap(&v);
        let angle = ((q.matrix().trace() - 1.0) / 2.0).acos();
        assert_relative_eq!(logmap(&q).unwrap().norm(), angle, epsilon = 1e-12);
    }

    #[test]
    fn logmap_rejects_near_pi() {
        let q = expmap(&Vec3::new(std::f64::consts::PI, 0.0, 0.0));
        assert!(matches!(logmap(&q), Err(So3Error::NearPi { .. })));
    }

    #[test]
    fn dist_special_values() {
        let identity = RotationMatrix::identity();
        assert_eq!(dist(&identity, &identity), 0.0);
        // For a general Q the radicand 2(3 − ‖Q‖²_F) cancels to a few ulp
        // and the square root amplifies that to the √ε scale.
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..20 {
            let q = random_rotation(&mut rng);
            assert!(dist(&q, &q) <= 1e-7);
        }
        // tr(Q₁ᵀQ₂) = −1 is the extremal case, dist = 2√2.
        let q = RotationMatrix::try_new(Mat3::from_diagonal(&Vec3::new(-1.0, -1.0, 1.0))).unwrap();
        assert_relative_eq!(
            dist(&RotationMatrix::identity(), &q),
            2.0 * std::f64::consts::SQRT_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn dist_of_reference_initial_configuration_is_nearly_one() {
        // √(2(3 − 1 − 2 cos 0.7227)); frozen from an independent evaluation
        // of the closed form.
        let q = expmap(&Vec3::new(0.0, 0.7227, 0.0));
        let d = dist(&q, &RotationMatrix::identity());
        assert_relative_eq!(d, 0.9999546942547655, epsilon = 1e-12);
        assert!((d - 1.0).abs() < 1e-4);
    }

    #[test]
    fn constructor_rejects_bad_matrices() {
        let err = RotationMatrix::try_new(2.0 * Mat3::identity()).unwrap_err();
        assert!(matches!(err, So3Error::NotOrthogonal { .. }));

        // Orthogonal but improper (a reflection).
        let reflection = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        let err = RotationMatrix::try_new(reflection).unwrap_err();
        assert!(matches!(err, So3Error::NotSpecial { .. }));

        let mut m = Mat3::identity();
        m[(0, 0)] = f64::NAN;
        assert!(matches!(
            RotationMatrix::try_new(m),
            Err(So3Error::NonFinite)
        ));
    }

    fn vec3_strategy(scale: f64) -> impl Strategy<Value = Vec3> {
        (-scale..scale, -scale..scale, -scale..scale).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn prop_vee_hat_round_trip(v in vec3_strategy(10.0)) {
            prop_assert_eq!(vee(&hat(&v)).unwrap(), v);
        }

        #[test]
        fn prop_hat_acts_as_cross_product(v in vec3_strategy(10.0), w in vec3_strategy(10.0)) {
            let lhs = hat(&v) * w;
            let rhs = v.cross(&w);
            prop_assert!((lhs - rhs).norm() <= 1e-15 * (1.0 + rhs.norm()));
        }

        #[test]
        fn prop_cay_and_expmap_pass_group_invariants(x in vec3_strategy(10.0)) {
            for q in [cay(&x), expmap(&x)] {
                prop_assert!(q.orthogonality_defect() <= 1e-12);
                prop_assert!((q.matrix().determinant() - 1.0).abs() <= 1e-12);
            }
        }

        #[test]
        fn prop_cay_of_negation_is_transpose(x in vec3_strategy(10.0)) {
            let lhs = cay(&(-x));
            let rhs = cay(&x).transpose();
            let diff = (lhs.matrix() - rhs.matrix()).amax();
            prop_assert!(diff <= 1e-14);
        }

        #[test]
        fn prop_dist_is_a_metric(a in vec3_strategy(2.5), b in vec3_strategy(2.5), c in vec3_strategy(2.5)) {
            let (qa, qb, qc) = (expmap(&a), expmap(&b), expmap(&c));
            let dab = dist(&qa, &qb);
            prop_assert!(dab >= 0.0);
            prop_assert!(dab <= 2.0 * std::f64::consts::SQRT_2 + 1e-12);
            prop_assert_eq!(dab, dist(&qb, &qa));
            prop_assert!(dab <= dist(&qa, &qc) + dist(&qc, &qb) + 1e-12);
        }

        #[test]
        fn prop_dist_squared_is_frobenius_difference(a in vec3_strategy(2.5), b in vec3_strategy(2.5)) {
            let (qa, qb) = (expmap(&a), expmap(&b));
            let d2 = dist(&qa, &qb).powi(2);
            let f2 = (qb.matrix() - qa.matrix()).norm_squared();
            prop_assert!((d2 - f2).abs() <= 1e-10);
        }
    }
}
