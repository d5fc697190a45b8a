//! Common point of the boundary conics and the canonical weight normalization.
//!
//! For a patch on a non-degenerate quadric the three boundary conics meet in a
//! point `S` besides the corners. A Möbius reparametrization of each edge, done
//! by reweighting the net with `alpha^i beta^j gamma^k`, moves `S` to parameter
//! `-1` on all three conics. After that, `S` is an affine combination of the
//! end and middle control points of each conic, with weights `omega_u`,
//! `omega_v` and `omega_w`.

use nalgebra::{Vector3, Vector4};

use crate::forms::{point_form, to_cartesian, ImplicitQuadric};
use crate::frame::frame_degenerate;
use crate::patch::{eval_tri, tri_grid, BoundaryConic, TpPatch, TriPatch};
use crate::projective::{decompose, meet3, parallel, plane_through, HPoint};
use crate::{Error, Result, Tolerances};

/// Outcome of intersecting the boundary planes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CommonPoint {
    /// The planes meet in a point lying on all three boundary conics.
    Found(HPoint),
    /// The planes meet in a point off at least one conic, or at a corner,
    /// where the boundaries meet anyway.
    Missing {
        meet: HPoint,
        /// Largest relative conic residual among the three boundaries.
        conic_residual: f64,
        at_corner: bool,
    },
}

/// A triangular patch whose weights put `S` at parameter `-1` on every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalTri {
    /// The reweighted net.
    pub patch: TriPatch,
    /// Representative of `S`: `w = 1` when proper, else the `u`-edge combination.
    pub s: HPoint,
    pub s_proper: bool,
    pub omega_u: f64,
    pub omega_v: f64,
    pub omega_w: f64,
    /// Reweighting factors `(alpha, beta, gamma)` applied to the input net.
    pub rescale: [f64; 3],
}

/// Coordinates `(x0, x1, x2)` of `s` in the weighted control vectors of a conic,
/// and the conic residual `|x1^2 - 4 x0 x2| / |x|^2`.
///
/// The residual is scaled by `|x|^2` rather than by its own terms, which both
/// vanish to second order when `S` approaches an end of the arc.
fn conic_coordinates(conic: &BoundaryConic, s: &HPoint) -> (Vector3<f64>, f64) {
    let (x, _) = decompose(&s.vector(), conic.weighted());
    let scale = x.norm_squared();
    let residual = if scale > 0.0 { (x[1] * x[1] - 4.0 * x[0] * x[2]).abs() / scale } else { 1.0 };
    (x, residual)
}

/// Intersects the three boundary planes and tests the result against the conics.
pub fn find_common_point(patch: &TriPatch, tol: &Tolerances) -> Result<CommonPoint> {
    let conics = patch.boundaries();
    let planes = [conics[0].plane(tol.tol_rank)?, conics[1].plane(tol.tol_rank)?, conics[2].plane(tol.tol_rank)?];
    let meet = meet3(&planes[0], &planes[1], &planes[2], tol.tol_rank)?.normalized(tol.tol_infinity);
    let conic_residual = conics.iter().map(|c| conic_coordinates(c, &meet).1).fold(0.0_f64, f64::max);
    let corners = [patch.corner_p(), patch.corner_q(), patch.corner_r()];
    let at_corner = corners.iter().any(|c| c.same_point(&meet, tol.tol_compat));
    Ok(if conic_residual <= tol.tol_compat && !at_corner {
        CommonPoint::Found(meet)
    } else {
        CommonPoint::Missing { meet, conic_residual, at_corner }
    })
}

/// Möbius ratio `rho = -sigma` that sends `s` to parameter `-1` on the conic.
fn mobius_ratio(conic: &BoundaryConic, s: &HPoint) -> Result<f64> {
    let (x, _) = conic_coordinates(conic, s);
    let scale = x.abs().max();
    if x[1].abs() <= 1e-12 * scale {
        return Err(Error::ZeroDenominator("locating the common point on a boundary conic"));
    }
    // On the conic x1 / (2 x0) = 2 x2 / x1; use the form with the larger denominator.
    Ok(if x[0].abs() >= x[2].abs() { -x[1] / (2.0 * x[0]) } else { -2.0 * x[2] / x[1] })
}

fn largest_index(v: &Vector4<f64>) -> usize {
    v.iamax()
}

/// Reweights the net so that `S` sits at parameter `-1` on each boundary conic,
/// then computes the edge weights `omega_u`, `omega_v`, `omega_w`.
pub fn rescale_weights(patch: &TriPatch, s: &HPoint, tol: &Tolerances) -> Result<CanonicalTri> {
    let [cu, cv, cw] = patch.boundaries();
    let rho_u = mobius_ratio(&cu, s)?;
    let rho_v = mobius_ratio(&cv, s)?;
    let rho_w = mobius_ratio(&cw, s)?;
    let (alpha, beta, gamma) = (rho_v, rho_u, 1.0);
    let implied = alpha / beta;
    if (rho_w - implied).abs() > tol.tol_compat * rho_w.abs().max(implied.abs()) {
        return Err(Error::NotAQuadric(format!(
            "reparametrization ratios are incompatible: rho_w = {rho_w}, rho_v / rho_u = {implied}"
        )));
    }
    let patch = patch.reweighted(alpha, beta, gamma)?;

    let p = patch.weighted(0, 0, 2);
    let q = patch.weighted(0, 2, 0);
    let r = patch.weighted(2, 0, 0);
    let combo_u = p - patch.weighted(0, 1, 1) * 2.0 + q;
    let combo_v = p - patch.weighted(1, 0, 1) * 2.0 + r;
    let combo_w = q - patch.weighted(1, 1, 0) * 2.0 + r;
    for (name, combo) in [("u", &combo_u), ("v", &combo_v), ("w", &combo_w)] {
        if !parallel(combo, &s.vector(), tol.tol_compat) {
            return Err(Error::InconsistentFrame(format!("edge {name} does not reach S at parameter -1")));
        }
    }

    let s_proper = s.is_proper(tol.tol_infinity);
    let (s_rep, omega_u, omega_v, omega_w) = if s_proper {
        (s.normalized(tol.tol_infinity), combo_u[3], combo_v[3], combo_w[3])
    } else {
        let k = largest_index(&combo_u);
        let rep = HPoint::from_vector(&combo_u)?;
        (rep, 1.0, combo_v[k] / combo_u[k], combo_w[k] / combo_u[k])
    };
    for (name, w) in [("omega_u", omega_u), ("omega_v", omega_v), ("omega_w", omega_w)] {
        if w == 0.0 || !w.is_finite() {
            return Err(Error::ZeroDenominator(match name {
                "omega_u" => "computing omega_u",
                "omega_v" => "computing omega_v",
                _ => "computing omega_w",
            }));
        }
    }
    Ok(CanonicalTri { patch, s: s_rep, s_proper, omega_u, omega_v, omega_w, rescale: [alpha, beta, gamma] })
}

/// Result of testing a patch for a cone or cylinder through the tangent-plane frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateCheck {
    /// The patch lies on the degenerate quadric built from its corner tangent planes.
    pub is_degenerate: bool,
    /// Centers of the three boundary conics are collinear (projectively).
    pub centers_collinear: bool,
    /// Largest normalized residual of the candidate quadric on sampled patch points.
    pub max_residual: f64,
    /// The candidate quadric, when a consistent frame exists.
    pub quadric: Option<ImplicitQuadric>,
}

/// Decides whether a patch without a common point `S` lies on a cone or cylinder.
///
/// The tangent planes at the corners determine the vertex `T`, the plane `t`
/// and the points `U`, `V`, `W`. When the corner configuration admits a conic
/// inscribed in `U V W` touching at `P`, `Q`, `R`, the cone or cylinder over
/// that conic is the only candidate; the patch is accepted when the candidate
/// vanishes on a grid of `grid` points per edge.
pub fn detect_ruled_degenerate(patch: &TriPatch, grid: usize, tol: &Tolerances) -> Result<DegenerateCheck> {
    let centers = patch.boundaries().map(|c| c.center());
    let centers_collinear = plane_through(
        &HPoint::from_vector(&centers[0])?,
        &HPoint::from_vector(&centers[1])?,
        &HPoint::from_vector(&centers[2])?,
        tol.tol_compat,
    )
    .is_err();

    let frame = match frame_degenerate(patch, tol) {
        Ok(f) => f,
        Err(Error::DegenerateFrame(_) | Error::InconsistentFrame(_) | Error::DependentPlanes | Error::CollinearInput) => {
            return Ok(DegenerateCheck { is_degenerate: false, centers_collinear, max_residual: f64::INFINITY, quadric: None })
        }
        Err(e) => return Err(e),
    };
    let quadric = to_cartesian(&point_form(&frame, 0.0)?, &frame)?;
    let max_residual = tri_grid(grid)
        .iter()
        .filter_map(|&[u, v, w]| eval_tri(patch, u, v, w).ok())
        .filter_map(|x| quadric.residual(&x, tol.tol_infinity))
        .fold(0.0_f64, f64::max);
    Ok(DegenerateCheck {
        is_degenerate: max_residual <= tol.tol_residual,
        centers_collinear,
        max_residual,
        quadric: Some(quadric),
    })
}

/// Parameter `sigma != 0` at which the conic meets the plane of the other edge.
fn second_intersection(conic: &BoundaryConic, other_plane: &crate::projective::LinForm) -> Result<f64> {
    let [_, a1, a2] = conic.weighted();
    let (d1, d2) = (other_plane.eval_vec(&a1), other_plane.eval_vec(&a2));
    let scale = a1.norm().max(a2.norm());
    if d1.abs() <= 1e-12 * scale || d2.abs() <= 1e-12 * scale {
        return Err(Error::NoSecondIntersection);
    }
    Ok(-2.0 * d1 / d2)
}

/// Reduces a biquadratic patch on a quadric to a triangular one on the same
/// quadric, sharing the corners `c00`, `c02`, `c20` and the two boundary conics
/// through `c00`.
///
/// The missing middle control point `c110` and its weight come from the
/// tangent planes at `c02` and `c20` of the tensor net, through the frame
/// relations that tie `U`, `V`, `W` to the corner weights.
pub fn tp_to_tri(tp: &TpPatch, tol: &Tolerances) -> Result<CanonicalTri> {
    let conic_u = tp.conic_u();
    let conic_v = tp.conic_v();
    let plane_u = conic_u.plane(tol.tol_rank)?;
    let plane_v = conic_v.plane(tol.tol_rank)?;

    let sigma_u = second_intersection(&conic_u, &plane_v)?;
    let sigma_v = second_intersection(&conic_v, &plane_u)?;
    let at = |c: &BoundaryConic, s: f64| {
        let [a0, a1, a2] = c.weighted();
        a0 + a1 * (2.0 * s) + a2 * (s * s)
    };
    let s_from_u = at(&conic_u, sigma_u);
    if !parallel(&s_from_u, &at(&conic_v, sigma_v), tol.tol_compat) {
        return Err(Error::NotAQuadric("boundary conics through c00 have no common second point".into()));
    }
    let s = HPoint::from_vector(&s_from_u)?;

    let (rho_u, rho_v) = (-sigma_u, -sigma_v);
    let w002 = tp.weight(0, 0);
    let w011 = rho_u * tp.weight(0, 1);
    let w020 = rho_u * rho_u * tp.weight(0, 2);
    let w101 = rho_v * tp.weight(1, 0);
    let w200 = rho_v * rho_v * tp.weight(2, 0);
    let (p, q, r) = (tp.hpoint(0, 0).vector(), tp.hpoint(0, 2).vector(), tp.hpoint(2, 0).vector());
    let combo_u = p * w002 - tp.hpoint(0, 1).vector() * (2.0 * w011) + q * w020;
    let combo_v = p * w002 - tp.hpoint(1, 0).vector() * (2.0 * w101) + r * w200;

    let s_proper = s.is_proper(tol.tol_infinity);
    let (s_rep, omega_u, omega_v) = if s_proper {
        (s.normalized(tol.tol_infinity).vector(), combo_u[3], combo_v[3])
    } else {
        let k = largest_index(&combo_u);
        (combo_u, 1.0, combo_v[k] / combo_u[k])
    };

    let tangent_p = plane_through(&tp.hpoint(0, 0), &tp.hpoint(0, 1), &tp.hpoint(1, 0), tol.tol_rank)?;
    let tangent_q = plane_through(&tp.hpoint(0, 2), &tp.hpoint(0, 1), &tp.hpoint(1, 2), tol.tol_rank)?;
    let tangent_r = plane_through(&tp.hpoint(2, 0), &tp.hpoint(1, 0), &tp.hpoint(2, 1), tol.tol_rank)?;
    let plane_t = plane_through(&tp.hpoint(0, 0), &tp.hpoint(0, 2), &tp.hpoint(2, 0), tol.tol_rank)?;
    let u_pt = meet3(&tangent_p, &tangent_q, &plane_t, tol.tol_rank)?;
    let v_pt = meet3(&tangent_p, &tangent_r, &plane_t, tol.tol_rank)?;
    let w_pt = meet3(&tangent_q, &tangent_r, &plane_t, tol.tol_rank)?;

    // Each of U, V, W is proportional to a signed combination of the corner
    // weights `(w002 omega_w, w020 omega_v, w200 omega_u)`; the Q and R parts
    // are known, which fixes the scale and then the P part gives omega_w.
    let known_q = w020 * omega_v;
    let known_r = w200 * omega_u;
    let mut estimates = Vec::with_capacity(3);
    for (pt, signs) in [(u_pt, [1.0, 1.0, -1.0]), (v_pt, [1.0, -1.0, 1.0]), (w_pt, [-1.0, 1.0, 1.0])] {
        let (c, _) = decompose(&pt.vector(), [p, q, r]);
        let (kq, kr) = (signs[1] * known_q, signs[2] * known_r);
        let denom = c[1] * c[1] + c[2] * c[2];
        if denom == 0.0 {
            continue;
        }
        let kappa = (c[1] * kq + c[2] * kr) / denom;
        let misfit = (kappa * c[1] - kq).abs().max((kappa * c[2] - kr).abs());
        if misfit > tol.tol_compat.sqrt() * kq.abs().max(kr.abs()) {
            return Err(Error::NotAQuadric("tangent planes at the corners are inconsistent with the boundary conics".into()));
        }
        estimates.push(signs[0] * kappa * c[0] / w002);
    }
    let omega_w = *estimates.first().ok_or(Error::DegenerateFrame("U, V and W are undefined".into()))?;
    if estimates.iter().any(|e| (e - omega_w).abs() > tol.tol_compat.sqrt() * omega_w.abs().max(1.0)) {
        return Err(Error::NotAQuadric(format!("frame points disagree on omega_w: {estimates:?}")));
    }

    let middle = (r * w200 + q * w020 - s_rep * omega_w) * 0.5;
    let w110 = middle[3];
    if w110.abs() <= tol.tol_infinity * middle.abs().max() {
        return Err(Error::NotAQuadric("reconstructed middle control point lies at infinity".into()));
    }
    let c110 = HPoint::from_vector(&middle)?;
    for plane in [&tangent_q, &tangent_r] {
        if plane.eval(&c110).abs() > tol.tol_compat.sqrt() * plane.normal().norm() * middle.norm() {
            return Err(Error::NotAQuadric("reconstructed c110 is off the corner tangent planes".into()));
        }
    }
    let c110 = c110.to_cartesian(tol.tol_infinity).expect("checked proper");
    let points = [
        tp.point(0, 0),
        tp.point(0, 1),
        tp.point(0, 2),
        tp.point(1, 0),
        c110,
        tp.point(2, 0),
    ];
    let weights = [w002, w011, w020, w101, w110, w200];
    let tri = TriPatch::new(points, weights)?;
    let mut canon = rescale_weights(&tri, &s, tol)?;
    canon.rescale = [rho_v * canon.rescale[0], rho_u * canon.rescale[1], canon.rescale[2]];
    Ok(canon)
}
