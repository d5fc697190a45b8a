//! Projective and affine type of the quadric.

use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use crate::euclid::adapted_basis;
use crate::forms::{canonical_conic_weight, point_form, ConicWeight};
use crate::frame::QuadricFrame;
use crate::projective::{HPoint, SymForm3};
use crate::{Error, Result, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadricKind {
    Ellipsoid,
    HyperboloidOneSheet,
    HyperboloidTwoSheets,
    EllipticParaboloid,
    HyperbolicParaboloid,
    Cone,
    EllipticCylinder,
    HyperbolicCylinder,
    ParabolicCylinder,
}

impl QuadricKind {
    pub fn is_paraboloid(self) -> bool {
        matches!(self, QuadricKind::EllipticParaboloid | QuadricKind::HyperbolicParaboloid)
    }

    pub fn is_cylinder(self) -> bool {
        matches!(self, QuadricKind::EllipticCylinder | QuadricKind::HyperbolicCylinder | QuadricKind::ParabolicCylinder)
    }

    /// Ellipsoids and hyperboloids.
    pub fn is_centered(self) -> bool {
        matches!(self, QuadricKind::Ellipsoid | QuadricKind::HyperboloidOneSheet | QuadricKind::HyperboloidTwoSheets)
    }

    pub fn label(self) -> &'static str {
        match self {
            QuadricKind::Ellipsoid => "ellipsoid",
            QuadricKind::HyperboloidOneSheet => "hyperboloid of one sheet",
            QuadricKind::HyperboloidTwoSheets => "hyperboloid of two sheets",
            QuadricKind::EllipticParaboloid => "elliptic paraboloid",
            QuadricKind::HyperbolicParaboloid => "hyperbolic paraboloid",
            QuadricKind::Cone => "cone",
            QuadricKind::EllipticCylinder => "elliptic cylinder",
            QuadricKind::HyperbolicCylinder => "hyperbolic cylinder",
            QuadricKind::ParabolicCylinder => "parabolic cylinder",
        }
    }
}

/// Pole of the plane at infinity. For cylinders, the center of the conic in
/// `t`; for cones, the apex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Center {
    /// `w = 1` when proper; otherwise the homogeneous combination itself.
    pub point: HPoint,
    pub proper: bool,
    /// Weight `Omega_Z` of the combination.
    pub omega: f64,
    /// `|Omega_Z|` relative to the weights of its terms.
    pub relative_omega: f64,
}

/// `Z` as a combination of the corners and `T`:
/// `eps_W Omega_W Omega_P P + eps_V Omega_V Omega_Q Q + eps_U Omega_U Omega_R R - (eps_T / lambda) T`.
/// The last term is absent when `lambda = 0`.
pub fn center(frame: &QuadricFrame, lambda: f64, tol: &Tolerances) -> Result<Center> {
    let [op, oq, or] = frame.corner_weights;
    let [pv, qv, rv] = frame.corners.map(|c| c.vector());
    let mut terms: Vec<Vector4<f64>> = vec![
        pv * (frame.w.omega_tilde() * op),
        qv * (frame.v.omega_tilde() * oq),
        rv * (frame.u.omega_tilde() * or),
    ];
    if lambda != 0.0 {
        terms.push(frame.t_point.vector() * (-frame.eps_t() / lambda));
    }
    let n: Vector4<f64> = terms.iter().sum();
    let size: f64 = terms.iter().map(|t| t[3].abs()).sum();
    let relative_omega = if size > 0.0 { n[3].abs() / size } else { 0.0 };
    let point = HPoint::from_vector(&n).map_err(|_| Error::Inconsistent("center combination vanishes".into()))?;
    let proper = relative_omega > tol.tol_center;
    Ok(Center { point: if proper { point.normalized(tol.tol_infinity) } else { point }, proper, omega: n[3], relative_omega })
}

/// Conic at infinity in the frame-adapted basis, with the closed-form
/// `det Z = lambda (~Omega_U ~Omega_V + ~Omega_V ~Omega_W + ~Omega_W ~Omega_U) - eps_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicAtInfinity {
    pub form: SymForm3,
    pub det_z: f64,
    /// `|det Z|` relative to the size of its terms.
    pub relative_det: f64,
}

pub fn conic_at_infinity(frame: &QuadricFrame, lambda: f64) -> Result<ConicAtInfinity> {
    let [u, v, w] = [frame.u.omega_tilde(), frame.v.omega_tilde(), frame.w.omega_tilde()];
    let pairs = [u * v, v * w, w * u];
    let det_z = lambda * pairs.iter().sum::<f64>() - frame.eps_t();
    let size = lambda.abs() * pairs.iter().map(|x| x.abs()).sum::<f64>() + frame.eps_t();
    let relative_det = if size > 0.0 { det_z.abs() / size } else { 0.0 };
    let basis = adapted_basis(frame)?;
    let form = basis.restrict(&point_form(frame, lambda)?);
    Ok(ConicAtInfinity { form, det_z, relative_det })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadricClass {
    pub kind: QuadricKind,
    pub lambda: f64,
    pub center: Center,
    pub infinity: ConicAtInfinity,
    /// Canonical weight of the conic in `t` for cylinders.
    pub section: Option<ConicWeight>,
    /// Decisions taken close to a threshold.
    pub borderline: Vec<String>,
}

/// Canonical weight of the conic in `t` from the first arc whose middle frame
/// point is proper: `(P, U, Q)`, `(P, V, R)` or `(Q, W, R)`.
fn section_weight(frame: &QuadricFrame, tol: &Tolerances) -> Result<ConicWeight> {
    let [op, oq, or] = frame.corner_weights;
    let arcs = [(op, &frame.u, oq), (op, &frame.v, or), (oq, &frame.w, or)];
    let (w0, mid, w2) = arcs
        .into_iter()
        .find(|(_, m, _)| m.proper)
        .ok_or_else(|| Error::Inconsistent("no proper frame point on the plane t".into()))?;
    canonical_conic_weight(w0, 0.5 * mid.omega, w2, tol.tol_compat)
}

/// Type of the quadric from the signs of `lambda` and `det Z` and the position of the center.
pub fn classify(frame: &QuadricFrame, lambda: f64, tol: &Tolerances) -> Result<QuadricClass> {
    let mut center = center(frame, lambda, tol)?;
    let infinity = conic_at_infinity(frame, lambda)?;
    let mut borderline = Vec::new();
    let mut section = None;

    let kind = if lambda == 0.0 {
        if frame.t_proper {
            center = Center { point: frame.t_point.normalized(tol.tol_infinity), proper: true, omega: 1.0, relative_omega: 1.0 };
            QuadricKind::Cone
        } else {
            let w = section_weight(frame, tol)?;
            section = Some(w);
            match w.kind {
                crate::forms::ConicKind::Ellipse => QuadricKind::EllipticCylinder,
                crate::forms::ConicKind::Hyperbola => QuadricKind::HyperbolicCylinder,
                crate::forms::ConicKind::Parabola => QuadricKind::ParabolicCylinder,
            }
        }
    } else {
        let det_zero = infinity.relative_det <= tol.tol_center;
        if det_zero == center.proper {
            let near = |r: f64| r <= 100.0 * tol.tol_center;
            if near(center.relative_omega) || near(infinity.relative_det) {
                borderline.push(format!(
                    "center weight ({:e}) and det Z ({:e}) straddle the paraboloid threshold",
                    center.relative_omega, infinity.relative_det
                ));
            } else {
                return Err(Error::Inconsistent(format!(
                    "center is {} but det Z = {}",
                    if center.proper { "proper" } else { "at infinity" },
                    infinity.det_z
                )));
            }
        }
        match (lambda > 0.0, center.proper) {
            (true, true) if infinity.det_z > 0.0 => QuadricKind::Ellipsoid,
            (true, true) => QuadricKind::HyperboloidTwoSheets,
            (true, false) => QuadricKind::EllipticParaboloid,
            (false, true) => QuadricKind::HyperboloidOneSheet,
            (false, false) => QuadricKind::HyperbolicParaboloid,
        }
    };
    Ok(QuadricClass { kind, lambda, center, infinity, section, borderline })
}
