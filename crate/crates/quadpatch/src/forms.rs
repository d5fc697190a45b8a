//! Point and tangential equations of the quadric, in the frame and in Cartesian coordinates.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::frame::{cross_tol, QuadricFrame};
use crate::projective::{Basis4, HPoint, SymForm4};
use crate::{Error, Result, Tolerances};

/// Names of the ten implicit coefficients, in order.
pub const MONOMIALS: [&str; 10] = ["x^2", "y^2", "z^2", "xy", "xz", "yz", "x", "y", "z", "1"];

/// `lambda` from the canonical weights, before and after snapping to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaEstimate {
    /// Zero when the numerator vanishes to within `tol_lambda` of its terms, else `raw`.
    pub value: f64,
    /// The closed-form quotient without snapping.
    pub raw: f64,
}

impl LambdaEstimate {
    /// The numerator sits inside the zero band although the quotient is defined.
    pub fn in_band(&self) -> bool {
        self.value == 0.0 && self.raw != 0.0
    }
}

/// `lambda` from the canonical weights, cross-checked against the value that
/// makes the quadric pass through `S`. Exactly zero when the numerator vanishes
/// to within `tol_lambda` of its terms.
pub fn compute_lambda(frame: &QuadricFrame, tol: &Tolerances) -> Result<f64> {
    Ok(estimate_lambda(frame, tol)?.value)
}

pub fn estimate_lambda(frame: &QuadricFrame, tol: &Tolerances) -> Result<LambdaEstimate> {
    let e = frame
        .edges
        .ok_or_else(|| Error::DegenerateFrame("lambda needs the edge weights of a canonical patch".into()))?;
    let (a, b, c) = (e.omega_u, e.omega_v, e.omega_w);
    let terms = [a * a, b * b, c * c, -2.0 * a * b, -2.0 * b * c, -2.0 * c * a];
    let numerator: f64 = terms.iter().sum();
    let size: f64 = terms.iter().map(|x| x.abs()).sum();
    let in_band = numerator.abs() <= tol.tol_lambda * size;
    let denominator = if frame.t_proper {
        2.0 * (if e.s_proper { 1.0 } else { 0.0 }) * a * b * c
            - frame.u.omega_tilde() * a
            - frame.v.omega_tilde() * b
            - frame.w.omega_tilde() * c
    } else {
        1.0
    };
    if denominator == 0.0 {
        return if in_band { Ok(LambdaEstimate { value: 0.0, raw: 0.0 }) } else { Err(Error::ZeroDenominator("computing lambda")) };
    }
    let raw = -numerator / (denominator * denominator);
    if in_band {
        return Ok(LambdaEstimate { value: 0.0, raw });
    }

    let s = frame.coordinates(&e.s.vector());
    let conic = point_form(frame, 0.0)?.eval(&s);
    if s[3].abs() > 1e-12 * s.abs().max() {
        let direct = -conic / (s[3] * s[3]);
        if (direct - raw).abs() > cross_tol(tol) * raw.abs().max(direct.abs()) {
            return Err(Error::InconsistentFrame(format!("lambda {raw} disagrees with the value {direct} forced by S")));
        }
    }
    Ok(LambdaEstimate { value: raw, raw })
}

/// Point form in the frame coordinates `(r, q, p, t)`.
pub fn point_form(frame: &QuadricFrame, lambda: f64) -> Result<SymForm4> {
    let inv = frame.omegas().map(|o| 1.0 / o);
    if inv.iter().any(|x| !x.is_finite()) {
        return Err(Error::ZeroDenominator("inverting a frame weight"));
    }
    let mut m = Matrix4::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let sign = if i == j { 1.0 } else { -1.0 };
            m[(i, j)] = sign * inv[i] * inv[j];
        }
    }
    m[(3, 3)] = lambda;
    Ok(SymForm4::new(m, Basis4::Frame))
}

/// Tangential form in the frame points `(U, V, W, T)`. The `T` term is dropped
/// for cones and cylinders.
pub fn tangential_form(frame: &QuadricFrame, lambda: f64) -> SymForm4 {
    let o = frame.omegas();
    let mut m = Matrix4::zeros();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                m[(i, j)] = 0.5 * o[i] * o[j];
            }
        }
    }
    m[(3, 3)] = if lambda == 0.0 { 0.0 } else { -1.0 / lambda };
    SymForm4::new(m, Basis4::FrameDual)
}

/// The quadric in Cartesian coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitQuadric {
    coeffs: [f64; 10],
    matrix: SymForm4,
    tangential: SymForm4,
}

impl ImplicitQuadric {
    /// `(A..J)` for `x^2, y^2, z^2, xy, xz, yz, x, y, z, 1`; largest magnitude one,
    /// first significant coefficient positive.
    pub fn coeffs(&self) -> [f64; 10] {
        self.coeffs
    }

    /// Symmetric matrix of the point form, scaled consistently with [`Self::coeffs`].
    pub fn matrix(&self) -> &SymForm4 {
        &self.matrix
    }

    /// Tangential form on Cartesian plane coefficients; `matrix * tangential = -I`
    /// for non-degenerate quadrics.
    pub fn tangential(&self) -> &SymForm4 {
        &self.tangential
    }

    /// `F(x, y, z)` with the normalized coefficients.
    pub fn eval(&self, x: f64, y: f64, z: f64) -> f64 {
        let c = &self.coeffs;
        c[0] * x * x + c[1] * y * y + c[2] * z * z + c[3] * x * y + c[4] * x * z + c[5] * y * z + c[6] * x + c[7] * y + c[8] * z + c[9]
    }

    /// `|F(X)| / (|coeffs| (1 + |X|^2))` for a proper point, `None` otherwise.
    pub fn residual(&self, point: &HPoint, tol_infinity: f64) -> Option<f64> {
        let x = point.to_cartesian(tol_infinity)?;
        let norm: f64 = self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        Some(self.eval(x.x, x.y, x.z).abs() / (norm * (1.0 + x.norm_squared())))
    }
}

fn coeffs_from_matrix(m: &Matrix4<f64>) -> [f64; 10] {
    [
        m[(0, 0)],
        m[(1, 1)],
        m[(2, 2)],
        2.0 * m[(0, 1)],
        2.0 * m[(0, 2)],
        2.0 * m[(1, 2)],
        2.0 * m[(0, 3)],
        2.0 * m[(1, 3)],
        2.0 * m[(2, 3)],
        m[(3, 3)],
    ]
}

/// Scale that makes the largest coefficient one and the first significant one positive.
fn normalizing_scale(c: &[f64; 10]) -> f64 {
    let max = c.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let lead = c.iter().find(|x| x.abs() > 1e-9 * max).copied().unwrap_or(1.0);
    lead.signum() / max
}

/// Substitutes the Cartesian coefficients of `r, q, p, t` into a frame point form.
pub fn to_cartesian(form: &SymForm4, frame: &QuadricFrame) -> Result<ImplicitQuadric> {
    if form.basis() != Basis4::Frame {
        return Err(Error::InvalidPatch("to_cartesian expects a point form in frame coordinates".into()));
    }
    let l = frame.forms_matrix();
    let raw = l.transpose() * form.matrix() * l;
    let coeffs = coeffs_from_matrix(&raw);
    if coeffs.iter().all(|c| *c == 0.0) {
        return Err(Error::DegenerateFrame("point form vanishes identically".into()));
    }
    let k = normalizing_scale(&coeffs);
    let lambda = form.matrix()[(3, 3)];
    let b = frame.basis_matrix();
    let tangential = b * tangential_form(frame, lambda).matrix() * b.transpose() / k;
    Ok(ImplicitQuadric {
        coeffs: coeffs.map(|c| c * k),
        matrix: SymForm4::new(raw * k, Basis4::Cartesian),
        tangential: SymForm4::new(tangential, Basis4::CartesianDual),
    })
}

/// Shape of a conic read off its rational quadratic weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConicKind {
    Ellipse,
    Parabola,
    Hyperbola,
}

/// Möbius-invariant weight `|w1| / sqrt(|w0 w2|)` and the conic type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConicWeight {
    pub value: f64,
    pub kind: ConicKind,
}

/// Classifies the arc with weights `(w0, w1, w2)` by the sign of `w1^2 - w0 w2`,
/// the discriminant of its denominator. When `w0 w2 < 0` the arc crosses
/// infinity between its end points and is a hyperbola whatever `w1` is.
pub fn canonical_conic_weight(w0: f64, w1: f64, w2: f64, tol: f64) -> Result<ConicWeight> {
    if w0 == 0.0 || w2 == 0.0 {
        return Err(Error::ZeroDenominator("canonical conic weight with a zero end weight"));
    }
    let value = w1.abs() / (w0 * w2).abs().sqrt();
    let disc = w1 * w1 - w0 * w2;
    let kind = if disc.abs() <= tol * (w1 * w1 + (w0 * w2).abs()) {
        ConicKind::Parabola
    } else if disc > 0.0 {
        ConicKind::Hyperbola
    } else {
        ConicKind::Ellipse
    };
    Ok(ConicWeight { value, kind })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn conic_weight_classes() {
        let tol = 1e-9;
        assert_eq!(canonical_conic_weight(1.0, FRAC_1_SQRT_2, 1.0, tol).unwrap().kind, ConicKind::Ellipse);
        assert_eq!(canonical_conic_weight(1.0, 1.0, 1.0, tol).unwrap().kind, ConicKind::Parabola);
        assert_eq!(canonical_conic_weight(1.0, -1.0, 1.0, tol).unwrap().kind, ConicKind::Parabola);
        assert_eq!(canonical_conic_weight(1.0, 2.0, 1.0, tol).unwrap().kind, ConicKind::Hyperbola);
        assert_eq!(canonical_conic_weight(1.0, 0.1, -1.0, tol).unwrap().kind, ConicKind::Hyperbola);
        let w = canonical_conic_weight(4.0, 1.0, 1.0, tol).unwrap();
        assert!((w.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conic_weight_is_mobius_invariant() {
        let (w0, w1, w2) = (0.7, 0.4, 1.9);
        let base = canonical_conic_weight(w0, w1, w2, 1e-9).unwrap().value;
        for rho in [0.3, 2.0, -1.5] {
            let moved = canonical_conic_weight(w0, rho * w1, rho * rho * w2, 1e-9).unwrap().value;
            assert!((moved - base).abs() < 1e-14);
        }
    }

    #[test]
    fn normalization_fixes_sign_and_scale() {
        let c = [0.0, -2.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 2.0];
        let k = normalizing_scale(&c);
        assert_eq!(c.map(|x| x * k), [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, -1.0]);
    }

    use crate::testutil::{frame_of, normalized10, FIXTURES};

    fn lambda_of(name: &str) -> f64 {
        let frame = frame_of(name);
        if frame.edges.is_none() {
            return 0.0;
        }
        compute_lambda(&frame, &Tolerances::default()).unwrap()
    }

    #[test]
    fn lambda_of_the_examples() {
        for (name, expected) in [
            ("ellipsoid", 207.0 / 49.0),
            ("two_sheets", 3.0 / 25.0),
            ("hyperbolic_paraboloid", -1.0),
            ("cone", 0.0),
            ("sphere", 2.0),
        ] {
            let got = lambda_of(name);
            assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1.0), "{name}: {got}");
        }
        assert_eq!(lambda_of("cone"), 0.0, "cone lambda is snapped to zero");
    }

    #[test]
    fn lambda_needs_edge_weights() {
        let frame = frame_of("parabolic_cylinder");
        assert!(matches!(compute_lambda(&frame, &Tolerances::default()), Err(Error::DegenerateFrame(_))));
    }

    #[test]
    fn implicit_equations_of_the_examples() {
        let cases: [(&str, [f64; 10]); 6] = [
            ("ellipsoid", [18.0, 81.0, 54.0, 45.0, 0.0, -81.0, -36.0, -90.0, 36.0, 0.0]),
            ("two_sheets", [4.0, 12.0, -1.0, 12.0, 0.0, 6.0, -8.0, -24.0, 8.0, 0.0]),
            ("hyperbolic_paraboloid", [-1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0]),
            ("parabolic_cylinder", [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0]),
            ("cone", [1.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            ("sphere", [1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]),
        ];
        for (name, expected) in cases {
            let frame = frame_of(name);
            let quadric = to_cartesian(&point_form(&frame, lambda_of(name)).unwrap(), &frame).unwrap();
            let expected = normalized10(expected);
            for (g, e) in quadric.coeffs().iter().zip(expected) {
                assert!((g - e).abs() < 1e-12, "{name}: {:?}", quadric.coeffs());
            }
        }
    }

    #[test]
    fn point_and_tangential_forms_are_inverse() {
        for name in FIXTURES {
            let lambda = lambda_of(name);
            if lambda == 0.0 {
                continue;
            }
            let frame = frame_of(name);
            let q = to_cartesian(&point_form(&frame, lambda).unwrap(), &frame).unwrap();
            let product = q.matrix().matrix() * q.tangential().matrix();
            assert!((product + Matrix4::identity()).norm() < 1e-10, "{name}: {product}");
        }
    }
}
