//! The projective frame `U, V, W, T` attached to a quadric patch.
//!
//! The tangent planes `p`, `q`, `r` at the corners `P`, `Q`, `R` and the plane
//! `t` through the corners cut out the frame points: `U = p∩q∩t`,
//! `V = p∩r∩t`, `W = q∩r∩t` and `T = p∩q∩r`. Each of `U`, `V`, `W` is also a
//! signed combination of the corners, and its weight `Omega` is the only
//! quantity the quadric equation needs from it.

use nalgebra::{Matrix4, Vector4};

use crate::canonical::CanonicalTri;
use crate::patch::TriPatch;
use crate::projective::{decompose, meet3, plane_through, HPoint, LinForm};
use crate::{Error, Result, Tolerances};

/// One of the frame points `U`, `V`, `W` with its weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePoint {
    /// Representative: `w = 1` when proper, otherwise a direction such that
    /// `omega * point` is the corner combination defining it.
    pub point: HPoint,
    pub proper: bool,
    /// `Omega`; equal to one for improper points on the canonical route.
    pub omega: f64,
}

impl FramePoint {
    /// `1.0` when proper, `0.0` otherwise.
    pub fn eps(&self) -> f64 {
        if self.proper {
            1.0
        } else {
            0.0
        }
    }

    /// `eps * Omega`.
    pub fn omega_tilde(&self) -> f64 {
        self.eps() * self.omega
    }
}

/// Edge weights of a canonical patch, kept in the frame for the closed formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeWeights {
    pub omega_u: f64,
    pub omega_v: f64,
    pub omega_w: f64,
    /// Representative of the common point `S`.
    pub s: HPoint,
    pub s_proper: bool,
}

impl EdgeWeights {
    fn from_canonical(c: &CanonicalTri) -> Self {
        Self { omega_u: c.omega_u, omega_v: c.omega_v, omega_w: c.omega_w, s: c.s, s_proper: c.s_proper }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadricFrame {
    /// Tangent plane at `P`, scaled so that `p(W) = 1`.
    pub p: LinForm,
    /// Tangent plane at `Q`, scaled so that `q(V) = 1`.
    pub q: LinForm,
    /// Tangent plane at `R`, scaled so that `r(U) = 1`.
    pub r: LinForm,
    /// Plane through the corners, scaled so that `t(T) = 1`.
    pub t: LinForm,
    pub u: FramePoint,
    pub v: FramePoint,
    pub w: FramePoint,
    pub t_point: HPoint,
    pub t_proper: bool,
    /// Corners `P`, `Q`, `R`.
    pub corners: [HPoint; 3],
    /// Corner weights on the conic in `t`: `(w002 omega_w, w020 omega_v, w200 omega_u)`
    /// on the canonical route.
    pub corner_weights: [f64; 3],
    /// Present on the canonical route only.
    pub edges: Option<EdgeWeights>,
    /// Conditioning notes for quantities close to a decision threshold.
    pub warnings: Vec<String>,
}

impl QuadricFrame {
    /// Columns `U, V, W, T`.
    pub fn basis_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_columns(&[self.u.point.vector(), self.v.point.vector(), self.w.point.vector(), self.t_point.vector()])
    }

    /// Rows `r, q, p, t`: the coordinate functions dual to `U, V, W, T`.
    pub fn forms_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_rows(&[
            self.r.vector().transpose(),
            self.q.vector().transpose(),
            self.p.vector().transpose(),
            self.t.vector().transpose(),
        ])
    }

    /// Coordinates `(r(X), q(X), p(X), t(X))` of a homogeneous vector.
    pub fn coordinates(&self, x: &Vector4<f64>) -> Vector4<f64> {
        self.forms_matrix() * x
    }

    pub fn eps_t(&self) -> f64 {
        if self.t_proper {
            1.0
        } else {
            0.0
        }
    }

    /// `(Omega_U, Omega_V, Omega_W)`.
    pub fn omegas(&self) -> [f64; 3] {
        [self.u.omega, self.v.omega, self.w.omega]
    }
}

/// Slack for cross-checks between two independent constructions of the same
/// quantity, whose rounding errors compound.
pub(crate) fn cross_tol(tol: &Tolerances) -> f64 {
    tol.tol_compat.sqrt()
}

fn frame_point(combo: Vector4<f64>, name: &str, tol: &Tolerances, warnings: &mut Vec<String>) -> Result<FramePoint> {
    let point = HPoint::from_vector(&combo).map_err(|_| Error::DegenerateFrame(format!("{name} vanishes")))?;
    note_near_threshold(&point, name, tol, warnings);
    Ok(if point.is_proper(tol.tol_infinity) {
        FramePoint { point: point.normalized(tol.tol_infinity), proper: true, omega: combo[3] }
    } else {
        FramePoint { point, proper: false, omega: 1.0 }
    })
}

fn note_near_threshold(point: &HPoint, name: &str, tol: &Tolerances, warnings: &mut Vec<String>) {
    let ratio = point.properness();
    if ratio > 0.0 && ratio <= 10.0 * tol.tol_infinity && ratio > 0.1 * tol.tol_infinity {
        warnings.push(format!("{name} is within a factor 10 of the point-at-infinity threshold (|w|/max = {ratio:e})"));
    }
}

fn tangent_plane(a: &HPoint, b: &HPoint, c: &HPoint, corner: &str, tol: &Tolerances) -> Result<LinForm> {
    plane_through(a, b, c, tol.tol_rank).map_err(|_| Error::DegenerateFrame(format!("tangent plane at {corner} is undefined")))
}

/// Tangent planes `p, q, r` at the corners and the corner plane `t`.
fn corner_planes(patch: &TriPatch, tol: &Tolerances) -> Result<[LinForm; 4]> {
    let (pp, qq, rr) = (patch.corner_p(), patch.corner_q(), patch.corner_r());
    let (c011, c101, c110) = (patch.hpoint(0, 1, 1), patch.hpoint(1, 0, 1), patch.hpoint(1, 1, 0));
    Ok([
        tangent_plane(&pp, &c011, &c101, "P", tol)?,
        tangent_plane(&qq, &c011, &c110, "Q", tol)?,
        tangent_plane(&rr, &c101, &c110, "R", tol)?,
        plane_through(&pp, &qq, &rr, tol.tol_rank).map_err(|_| Error::DegenerateFrame("corners are collinear".into()))?,
    ])
}

fn normalize_on(form: &LinForm, point: &HPoint, name: &str) -> Result<LinForm> {
    let value = form.eval(point);
    let scale = form.vector().norm() * point.vector().norm();
    if value.abs() <= 1e-12 * scale {
        return Err(Error::DegenerateFrame(format!("form {name} vanishes on its dual frame point")));
    }
    Ok(form.scaled(1.0 / value))
}

fn check_dependent(forms: &[LinForm; 4], tol: &Tolerances) -> Result<()> {
    let m = Matrix4::from_rows(&forms.map(|f| f.normalized().vector().transpose()));
    if m.determinant().abs() <= tol.tol_rank {
        return Err(Error::DependentForms);
    }
    Ok(())
}

/// Closed-form `T` from the canonical weights.
pub fn point_t(canon: &CanonicalTri, tol: &Tolerances) -> Result<HPoint> {
    let patch = &canon.patch;
    let (ou, ov, ow) = (canon.omega_u, canon.omega_v, canon.omega_w);
    let n = patch.corner_p().vector() * (patch.weight(0, 0, 2) * ow * (ou + ov - ow))
        + patch.corner_q().vector() * (patch.weight(0, 2, 0) * ov * (ou - ov + ow))
        + patch.corner_r().vector() * (patch.weight(2, 0, 0) * ou * (-ou + ov + ow))
        - canon.s.vector() * (2.0 * ou * ov * ow);
    let t = HPoint::from_vector(&n).map_err(|_| Error::DegenerateFrame("T vanishes".into()))?;
    Ok(if t.is_proper(tol.tol_infinity) { t.normalized(tol.tol_infinity) } else { t })
}

/// Frame of a canonical patch: `U`, `V`, `W` from the corner combinations,
/// `T` from its closed formula, checked against the tangent planes.
pub fn build_frame(canon: &CanonicalTri, tol: &Tolerances) -> Result<QuadricFrame> {
    let patch = &canon.patch;
    let mut warnings = Vec::new();
    let corners = [patch.corner_p(), patch.corner_q(), patch.corner_r()];
    let [pv, qv, rv] = corners.map(|c| c.vector());
    let cw = [
        patch.weight(0, 0, 2) * canon.omega_w,
        patch.weight(0, 2, 0) * canon.omega_v,
        patch.weight(2, 0, 0) * canon.omega_u,
    ];
    let u = frame_point(pv * cw[0] + qv * cw[1] - rv * cw[2], "U", tol, &mut warnings)?;
    let v = frame_point(pv * cw[0] - qv * cw[1] + rv * cw[2], "V", tol, &mut warnings)?;
    let w = frame_point(-pv * cw[0] + qv * cw[1] + rv * cw[2], "W", tol, &mut warnings)?;

    let [p, q, r, t] = corner_planes(patch, tol)?;
    let slack = cross_tol(tol);
    for (form, pt, what) in [
        (&p, &u, "p(U)"),
        (&p, &v, "p(V)"),
        (&q, &u, "q(U)"),
        (&q, &w, "q(W)"),
        (&r, &v, "r(V)"),
        (&r, &w, "r(W)"),
        (&t, &u, "t(U)"),
        (&t, &v, "t(V)"),
        (&t, &w, "t(W)"),
    ] {
        let scale = form.vector().norm() * pt.point.vector().norm();
        if form.eval(&pt.point).abs() > slack * scale {
            return Err(Error::InconsistentFrame(format!("{what} is not zero")));
        }
    }

    let t_point = point_t(canon, tol)?;
    note_near_threshold(&t_point, "T", tol, &mut warnings);
    let t_meet = meet3(&p, &q, &r, tol.tol_rank)?;
    if !t_point.same_point(&t_meet, slack) {
        return Err(Error::InconsistentFrame("closed-form T differs from the meet of the tangent planes".into()));
    }
    let t_proper = t_point.is_proper(tol.tol_infinity);

    let forms = [
        normalize_on(&p, &w.point, "p")?,
        normalize_on(&q, &v.point, "q")?,
        normalize_on(&r, &u.point, "r")?,
        normalize_on(&t, &t_point, "t")?,
    ];
    check_dependent(&forms, tol)?;
    let [p, q, r, t] = forms;
    Ok(QuadricFrame {
        p,
        q,
        r,
        t,
        u,
        v,
        w,
        t_point,
        t_proper,
        corners,
        corner_weights: cw,
        edges: Some(EdgeWeights::from_canonical(canon)),
        warnings,
    })
}

/// Frame of a patch on a cone or cylinder, where the boundary conics share
/// no point besides the corners.
///
/// `U`, `V`, `W` come straight from the plane intersections. Their weights
/// follow from writing each corner as the far point of the conic arc spanned
/// by the other two corners and the frame point between them; the three
/// relations must agree on the corner weights, which holds exactly when the
/// lines `PW`, `QV`, `RU` are concurrent.
pub fn frame_degenerate(patch: &TriPatch, tol: &Tolerances) -> Result<QuadricFrame> {
    let mut warnings = Vec::new();
    let corners = [patch.corner_p(), patch.corner_q(), patch.corner_r()];
    let [pv, qv, rv] = corners.map(|c| c.vector());
    let [p, q, r, t] = corner_planes(patch, tol)?;
    let pick = |a: &LinForm, b: &LinForm, c: &LinForm, name: &str, warnings: &mut Vec<String>| -> Result<HPoint> {
        let x = meet3(a, b, c, tol.tol_rank).map_err(|_| Error::DegenerateFrame(format!("{name} is undefined")))?;
        note_near_threshold(&x, name, tol, warnings);
        Ok(x.normalized(tol.tol_infinity))
    };
    let t_point = pick(&p, &q, &r, "T", &mut warnings)?;
    let u_pt = pick(&p, &q, &t, "U", &mut warnings)?;
    let v_pt = pick(&p, &r, &t, "V", &mut warnings)?;
    let w_pt = pick(&q, &r, &t, "W", &mut warnings)?;

    let (x, _) = decompose(&rv, [pv, u_pt.vector(), qv]);
    let (y, _) = decompose(&qv, [pv, v_pt.vector(), rv]);
    let (z, _) = decompose(&pv, [qv, w_pt.vector(), rv]);
    let scale = x.abs().max();
    if y[0].abs() <= 1e-12 * y.abs().max() || z[0].abs() <= 1e-12 * z.abs().max() || scale == 0.0 {
        return Err(Error::DegenerateFrame("corner lies on the opposite tangent line".into()));
    }
    let (omega_p, omega_u, omega_q) = (x[0], -x[1], x[2]);
    let k2 = omega_p / y[0];
    let (omega_v, omega_r) = (-k2 * y[1], k2 * y[2]);
    let k3 = omega_q / z[0];
    let (omega_w, omega_r_alt) = (-k3 * z[1], k3 * z[2]);
    if (omega_r - omega_r_alt).abs() > cross_tol(tol) * omega_r.abs().max(omega_r_alt.abs()) {
        return Err(Error::InconsistentFrame(format!(
            "corner weights of R disagree ({omega_r} vs {omega_r_alt}); no conic touches the frame triangle at the corners"
        )));
    }
    let as_frame_point = |pt: HPoint, omega: f64| FramePoint { point: pt, proper: pt.is_proper(tol.tol_infinity), omega };
    let (u, v, w) = (as_frame_point(u_pt, omega_u), as_frame_point(v_pt, omega_v), as_frame_point(w_pt, omega_w));
    if [omega_u, omega_v, omega_w].iter().any(|o| *o == 0.0 || !o.is_finite()) {
        return Err(Error::DegenerateFrame("a frame weight vanishes".into()));
    }

    let forms = [
        normalize_on(&p, &w.point, "p")?,
        normalize_on(&q, &v.point, "q")?,
        normalize_on(&r, &u.point, "r")?,
        normalize_on(&t, &t_point, "t")?,
    ];
    check_dependent(&forms, tol)?;
    let [p, q, r, t] = forms;
    Ok(QuadricFrame {
        p,
        q,
        r,
        t,
        u,
        v,
        w,
        t_proper: t_point.is_proper(tol.tol_infinity),
        t_point,
        corners,
        corner_weights: [omega_p, omega_q, 0.5 * (omega_r + omega_r_alt)],
        edges: None,
        warnings,
    })
}
