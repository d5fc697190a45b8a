//! Principal planes, axes, vertices and revolution tests.
//!
//! Principal directions are the generalized eigenvectors of the conic at
//! infinity against the Gram matrix of a frame-adapted basis of directions.
//! The eigenvalues `mu` are the roots of the cubic `det(Q - mu G)`.

use nalgebra::{Matrix3, SymmetricEigen, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::classify::{center, QuadricClass, QuadricKind};
use crate::forms::{point_form, ImplicitQuadric};
use crate::frame::{cross_tol, QuadricFrame};
use crate::projective::{Basis3, Cubic, HPoint, LinForm, Root, SymForm3, SymForm4};
use crate::{Error, Result, Tolerances};

/// Three independent directions built from the frame points.
///
/// With `T` proper the vectors are `TU`, `TV`, `TW` (an improper frame point
/// is already a direction). With `T` improper they are `WU`, `WV` and `T`,
/// switching the origin to `U` or `V` when `W` is itself at infinity. When
/// these arrows are numerically dependent the coordinate axes are used.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedBasis {
    labels: [&'static str; 3],
    /// Frame coordinates `(r, q, p, t)` of each vector.
    coords: [Vector4<f64>; 3],
    /// Cartesian components.
    vectors: [Vector3<f64>; 3],
}

const E_U: usize = 0;
const E_V: usize = 1;
const E_W: usize = 2;
const E_T: usize = 3;

pub fn adapted_basis(frame: &QuadricFrame) -> Result<AdaptedBasis> {
    let unit = |i: usize| Vector4::from_fn(|k, _| if k == i { 1.0 } else { 0.0 });
    let point = |i: usize| match i {
        E_U => (frame.u.point.vector(), frame.u.proper),
        E_V => (frame.v.point.vector(), frame.v.proper),
        E_W => (frame.w.point.vector(), frame.w.proper),
        _ => (frame.t_point.vector(), frame.t_proper),
    };
    // Vector from `origin` to `target`, or `target` itself when it is a direction.
    let arrow = |target: usize, origin: usize| {
        let (x, proper) = point(target);
        let eps = if proper { 1.0 } else { 0.0 };
        let (o, _) = point(origin);
        (x - o * eps, unit(target) - unit(origin) * eps)
    };
    let (labels, parts) = if frame.t_proper {
        (["TU", "TV", "TW"], [arrow(E_U, E_T), arrow(E_V, E_T), arrow(E_W, E_T)])
    } else if frame.w.proper {
        (["WU", "WV", "T"], [arrow(E_U, E_W), arrow(E_V, E_W), (point(E_T).0, unit(E_T))])
    } else if frame.u.proper {
        (["UV", "W", "T"], [arrow(E_V, E_U), (point(E_W).0, unit(E_W)), (point(E_T).0, unit(E_T))])
    } else if frame.v.proper {
        (["U", "W", "T"], [(point(E_U).0, unit(E_U)), (point(E_W).0, unit(E_W)), (point(E_T).0, unit(E_T))])
    } else {
        return Err(Error::DegenerateBasis);
    };
    let vectors = parts.map(|(x, _)| Vector3::new(x[0], x[1], x[2]));
    let coords = parts.map(|(_, c)| c);
    let basis = AdaptedBasis { labels, coords, vectors };
    if well_conditioned(&basis) {
        return Ok(basis);
    }
    // A far-away T (or nearly parallel frame arrows) makes the basis above
    // numerically flat; the coordinate axes span the same directions.
    let forms = frame.forms_matrix();
    let axes = AdaptedBasis {
        labels: ["x", "y", "z"],
        coords: [0, 1, 2].map(|i| forms * unit(i)),
        vectors: [Vector3::x(), Vector3::y(), Vector3::z()],
    };
    if !axes.coords.iter().all(|c| c.iter().all(|x| x.is_finite())) {
        return Err(Error::DegenerateBasis);
    }
    Ok(axes)
}

fn well_conditioned(basis: &AdaptedBasis) -> bool {
    let scale: f64 = basis.vectors.iter().map(|v| v.norm_squared()).product();
    scale > 0.0 && basis.gram_matrix().determinant().abs() > 1e-12 * scale
}

impl AdaptedBasis {
    pub fn labels(&self) -> [&'static str; 3] {
        self.labels
    }

    pub fn vectors(&self) -> &[Vector3<f64>; 3] {
        &self.vectors
    }

    fn gram_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.vectors[i].dot(&self.vectors[j]))
    }

    /// Gram matrix of the basis vectors.
    pub fn gram(&self) -> SymForm3 {
        SymForm3::new(self.gram_matrix(), Basis3::FrameAdapted)
    }

    /// Restriction of a frame point form to the span of the basis.
    pub fn restrict(&self, form: &SymForm4) -> SymForm3 {
        let m = form.matrix();
        SymForm3::new(Matrix3::from_fn(|i, j| self.coords[i].dot(&(m * self.coords[j]))), Basis3::FrameAdapted)
    }

    /// Frame coordinates of `sum c_i e_i`.
    pub fn frame_coords(&self, c: &Vector3<f64>) -> Vector4<f64> {
        self.coords[0] * c[0] + self.coords[1] * c[1] + self.coords[2] * c[2]
    }

    /// Cartesian direction `sum c_i e_i`.
    pub fn cartesian(&self, c: &Vector3<f64>) -> Vector3<f64> {
        self.vectors[0] * c[0] + self.vectors[1] * c[1] + self.vectors[2] * c[2]
    }
}

/// Gram matrix of the frame-adapted basis.
pub fn gram(frame: &QuadricFrame) -> Result<SymForm3> {
    Ok(adapted_basis(frame)?.gram())
}

/// Polar plane of a principal direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipalPlane {
    /// Unit-norm Cartesian plane `ax + by + cz + d`.
    pub cartesian: LinForm,
    /// Coefficients on the frame forms `(p, q, r, t)`.
    pub frame: [f64; 4],
    /// False for the plane at infinity.
    pub proper: bool,
}

/// Principal directions sharing one root `mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalFamily {
    pub mu: f64,
    pub multiplicity: u8,
    /// Unit Cartesian directions spanning the eigenspace.
    pub poles: Vec<[f64; 3]>,
    /// Polar planes of the poles; a pole in the kernel of the form has none.
    pub planes: Vec<PrincipalPlane>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalSystem {
    pub basis: AdaptedBasis,
    /// Conic at infinity in the adapted basis.
    pub conic: SymForm3,
    pub gram: SymForm3,
    /// `det(A - mu I)` for the Cartesian quadratic part `A`; it has the
    /// roots of `det(conic - mu gram)`.
    pub cubic: Cubic,
    pub roots: Vec<Root>,
    pub families: Vec<PrincipalFamily>,
}

/// `det(A - mu B) = det A - mu tr(adj(A) B) + mu^2 tr(A adj(B)) - mu^3 det B`.
pub fn pencil_cubic(a: &SymForm3, b: &SymForm3) -> Cubic {
    let (am, bm) = (a.matrix(), b.matrix());
    Cubic::new(
        -bm.determinant(),
        (am * b.adjugate().matrix()).trace(),
        -(a.adjugate().matrix() * bm).trace(),
        am.determinant(),
    )
}

/// Quadratic part of the point form in Cartesian directions.
fn cartesian_quadratic_part(frame: &QuadricFrame, form: &SymForm4) -> SymForm3 {
    let f = frame.forms_matrix();
    let a = (f.transpose() * form.matrix() * f).fixed_view::<3, 3>(0, 0).into_owned();
    SymForm3::new(a, Basis3::Cartesian)
}

/// Orthonormal eigenvectors of a Cartesian form; its eigenvalues are the
/// roots of the pencil cubic.
fn principal_directions(a: &SymForm3) -> (Vector3<f64>, Matrix3<f64>) {
    let eigen = SymmetricEigen::new(*a.matrix());
    jacobi_polish(a.matrix(), eigen.eigenvectors)
}

/// Cyclic Jacobi sweeps on `V^T A V`. The QL iteration stops once the
/// off-diagonal entries are small next to their own diagonal pair, which
/// leaves eigenvectors of nearly vanishing eigenvalues visibly mixed.
fn jacobi_polish(a: &Matrix3<f64>, mut v: Matrix3<f64>) -> (Vector3<f64>, Matrix3<f64>) {
    let mut b = v.transpose() * a * v;
    let floor = f64::EPSILON * a.norm();
    for _ in 0..10 {
        if b[(0, 1)].abs().max(b[(0, 2)].abs()).max(b[(1, 2)].abs()) <= floor {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if b[(p, q)] == 0.0 {
                continue;
            }
            let theta = (b[(q, q)] - b[(p, p)]) / (2.0 * b[(p, q)]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let mut j = Matrix3::identity();
            j[(p, p)] = c;
            j[(q, q)] = c;
            j[(p, q)] = t * c;
            j[(q, p)] = -t * c;
            b = j.transpose() * b * j;
            v *= j;
        }
    }
    (b.diagonal(), v)
}

/// Groups eigenvalues closer than `tol_cluster` times the largest magnitude,
/// in descending order. Each group becomes one root of the pencil cubic.
fn cluster_eigenvalues(values: &Vector3<f64>, tol_cluster: f64) -> Vec<(Root, Vec<usize>)> {
    let mut order = [0, 1, 2];
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let radius = tol_cluster * values.amax();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in order {
        match groups.last_mut() {
            Some(g) if (values[g[0]] - values[i]).abs() <= radius => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let mean = g.iter().map(|&i| values[i]).sum::<f64>() / g.len() as f64;
            (Root { value: mean, multiplicity: g.len() as u8 }, g)
        })
        .collect()
}

/// Solves the principal-plane eigenproblem and takes the polar planes of the
/// eigenvectors. Eigenspaces of dimension two or three yield families of
/// planes spanned by the listed generators.
pub fn principal_planes(frame: &QuadricFrame, lambda: f64, quadric: &ImplicitQuadric, tol: &Tolerances) -> Result<PrincipalSystem> {
    let basis = adapted_basis(frame)?;
    let form = point_form(frame, lambda)?;
    let conic = basis.restrict(&form);
    let gram = basis.gram();
    // The same pencil in the orthonormal Cartesian basis, where the Gram
    // matrix is the identity: a nearly dependent adapted basis would
    // otherwise leak its conditioning into the cubic.
    let quadratic = cartesian_quadratic_part(frame, &form);
    let cubic = pencil_cubic(&quadratic, &SymForm3::new(Matrix3::identity(), Basis3::Cartesian));
    if cubic.degree().is_none() {
        return Err(Error::DegeneratePolynomial);
    }

    let (values, vectors) = principal_directions(&quadratic);
    let (scaled, m) = cubic.scaled();
    let clusters = cluster_eigenvalues(&values, tol.tol_cluster);
    let mut roots = Vec::with_capacity(clusters.len());
    let mut families = Vec::with_capacity(clusters.len());
    for (root, members) in clusters {
        if scaled.eval(root.value / m).abs() > cross_tol(tol) {
            return Err(Error::Inconsistent(format!(
                "eigenvalue {} of the quadratic part is not a root of the pencil cubic",
                root.value
            )));
        }
        let mut poles = Vec::new();
        let mut planes = Vec::new();
        for i in members {
            let mut dir: Vector3<f64> = vectors.column(i).into_owned();
            if dir[dir.iamax()] < 0.0 {
                dir = -dir;
            }
            poles.push([dir.x, dir.y, dir.z]);
            let polar = quadric.matrix().matrix() * Vector4::new(dir.x, dir.y, dir.z, 0.0);
            if polar.norm() <= tol.tol_rank.sqrt() * quadric.matrix().norm() {
                continue;
            }
            let fc = form.matrix() * frame.forms_matrix() * Vector4::new(dir.x, dir.y, dir.z, 0.0);
            let plane = LinForm::from_vector(&polar);
            planes.push(PrincipalPlane {
                proper: plane.normal().norm() > tol.tol_rank.sqrt() * polar.norm(),
                cartesian: plane.normalized(),
                frame: [fc[2], fc[1], fc[0], fc[3]],
            });
        }
        families.push(PrincipalFamily { mu: root.value, multiplicity: root.multiplicity, poles, planes });
        roots.push(root);
    }
    Ok(PrincipalSystem { basis, conic, gram, cubic, roots, families })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevolutionTest {
    pub is_revolution: bool,
    pub is_sphere: bool,
    /// Discriminant of the root-scaled, unit-norm cubic.
    pub discriminant: f64,
    /// Set when the discriminant band and the root clustering disagree near the threshold.
    pub borderline: Option<String>,
}

/// Revolution: a nonzero double root. Sphere: a triple root. Both the root
/// clustering and the discriminant band must agree.
pub fn revolution_sphere(system: &PrincipalSystem, tol: &Tolerances) -> Result<RevolutionTest> {
    let scale = system.roots.iter().fold(0.0_f64, |m, r| m.max(r.value.abs()));
    let nonzero = |r: &Root| r.value.abs() > tol.tol_cluster * scale;
    let clustered_double = system.roots.iter().any(|r| r.multiplicity >= 2 && nonzero(r));
    let clustered_triple = system.roots.iter().any(|r| r.multiplicity == 3 && nonzero(r));
    let discriminant = system.cubic.normalized_discriminant();
    let disc_zero = discriminant.abs() <= tol.tol_discriminant;
    let any_multiple = system.roots.iter().any(|r| r.multiplicity >= 2);

    if any_multiple && !disc_zero {
        return Err(Error::InconsistentDetection(format!(
            "roots cluster but the discriminant is {discriminant:e}"
        )));
    }
    let inflection_ok = !clustered_triple || {
        let (p, m) = system.cubic.scaled();
        let x = system.roots[0].value / m;
        (3.0 * p.a3 * x + p.a2).abs() <= (tol.tol_cluster.max((1000.0 * f64::EPSILON).cbrt())) * (3.0 * p.a3 * x).abs().max(p.a2.abs()).max(1.0)
    };
    let borderline = (disc_zero && !any_multiple).then(|| {
        format!("discriminant {discriminant:e} is inside the band but the roots are separated")
    });
    Ok(RevolutionTest {
        is_revolution: clustered_double && disc_zero,
        is_sphere: clustered_triple && disc_zero && inflection_ok,
        discriminant,
        borderline,
    })
}

/// Vertex of a paraboloid: the contact point of the tangent plane orthogonal
/// to the axis direction.
///
/// With `T` proper this uses the closed form in the frame; otherwise, and as a
/// cross-check, the tangent plane is found from the Cartesian tangential form.
pub fn paraboloid_vertex(frame: &QuadricFrame, lambda: f64, quadric: &ImplicitQuadric, tol: &Tolerances) -> Result<HPoint> {
    let z = center(frame, lambda, tol)?;
    if z.proper || lambda == 0.0 {
        return Err(Error::NotAParaboloid);
    }
    let direct = vertex_from_tangential(quadric, &z.point.spatial(), tol)?;
    let basis = adapted_basis(frame)?;
    // The closed form is written in the basis `TU, TV, TW`.
    if basis.labels() != ["TU", "TV", "TW"] {
        return Ok(direct);
    }
    let closed = vertex_closed_form(frame, &basis, lambda, tol)?;
    if !closed.same_point(&direct, cross_tol(tol)) {
        return Err(Error::Inconsistent(format!(
            "paraboloid vertex routes disagree: {:?} vs {:?}",
            closed.coords(),
            direct.coords()
        )));
    }
    Ok(closed)
}

fn vertex_from_tangential(quadric: &ImplicitQuadric, axis: &Vector3<f64>, tol: &Tolerances) -> Result<HPoint> {
    let t = quadric.tangential().matrix();
    let n = Vector4::new(axis.x, axis.y, axis.z, 0.0);
    let e = Vector4::new(0.0, 0.0, 0.0, 1.0);
    let (quad, lin) = (n.dot(&(t * n)), n.dot(&(t * e)));
    if lin == 0.0 {
        return Err(Error::ZeroDenominator("locating the paraboloid vertex"));
    }
    let plane = n + e * (-quad / (2.0 * lin));
    HPoint::from_vector(&(t * plane)).map(|p| p.normalized(tol.tol_infinity))
}

fn vertex_closed_form(frame: &QuadricFrame, basis: &AdaptedBasis, lambda: f64, tol: &Tolerances) -> Result<HPoint> {
    let (ou, ov, ow) = (frame.u.omega, frame.v.omega, frame.w.omega);
    let (tu, tv, tw) = (frame.u.omega_tilde(), frame.v.omega_tilde(), frame.w.omega_tilde());
    let (eu, ev, ew) = (frame.u.eps(), frame.v.eps(), frame.w.eps());
    let axis = Vector3::new(ou * (tv + tw), ov * (tw + tu), ow * (tu + tv));
    let g = basis.gram();
    let proj = g.matrix() * axis;
    let (c, b, a) = (proj[0], proj[1], proj[2]);
    let num = ou * ov * b * c + ov * ow * a * b + ow * ou * a * c;
    let den = ou * ov * (eu * b + ev * c) + ov * ow * (ev * a + ew * b) + ow * ou * (eu * a + ew * c);
    if den == 0.0 {
        return Err(Error::ZeroDenominator("the closed-form paraboloid vertex"));
    }
    let d = -num / den;
    let (a, b, c) = (a + ew * d, b + ev * d, c + eu * d);
    let o = frame.u.point.vector() * (ou * (b * ov + a * ow))
        + frame.v.point.vector() * (ov * (c * ou + a * ow))
        + frame.w.point.vector() * (ow * (c * ou + b * ov))
        - frame.t_point.vector() * (2.0 * d / lambda);
    HPoint::from_vector(&o).map(|p| p.normalized(tol.tol_infinity))
}

/// Axis of a cylinder: a point on it and its direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderAxis {
    pub point: HPoint,
    pub direction: Vector3<f64>,
    /// Set for parabolic cylinders, whose axis is the line of vertices of the
    /// cross-section rather than a line of centers.
    pub best_effort: bool,
}

/// Center line of an elliptic or hyperbolic cylinder through the center of the
/// conic in `t`, parallel to `T`. For a parabolic cylinder the line of vertices.
pub fn cylinder_axis(frame: &QuadricFrame, lambda: f64, quadric: &ImplicitQuadric, tol: &Tolerances) -> Result<CylinderAxis> {
    if lambda != 0.0 || frame.t_proper {
        return Err(Error::NotACylinder);
    }
    let direction = frame.t_point.spatial().normalize();
    let zt = center(frame, 0.0, tol)?;
    if zt.proper {
        return Ok(CylinderAxis { point: zt.point, direction, best_effort: false });
    }
    let m = quadric.matrix().matrix();
    let a3 = m.fixed_view::<3, 3>(0, 0).into_owned();
    let b = Vector3::new(m[(0, 3)], m[(1, 3)], m[(2, 3)]);
    let c = m[(3, 3)];
    let eig = a3.symmetric_eigen();
    let i = eig.eigenvalues.iamax();
    let (mu, e) = (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned());
    let n = e.cross(&direction).normalize();
    let (be, bn) = (b.dot(&e), b.dot(&n));
    if bn.abs() <= tol.tol_rank.sqrt() * b.norm().max(mu.abs()) {
        return Err(Error::NotACylinder);
    }
    let s = -be / mu;
    let k = -(c - be * be / mu) / (2.0 * bn);
    Ok(CylinderAxis { point: HPoint::from_cartesian(&(e * s + n * k)), direction, best_effort: true })
}

/// A line given by a point and a direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub point: HPoint,
    pub direction: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanElements {
    pub principal: PrincipalSystem,
    pub revolution: RevolutionTest,
    pub axes: Vec<Axis>,
    /// Vertex of a paraboloid.
    pub vertex: Option<HPoint>,
    /// Apex of a cone.
    pub apex: Option<HPoint>,
    pub cylinder_axis: Option<CylinderAxis>,
}

/// Collects the Euclidean elements relevant to the quadric's type.
pub fn euclidean_elements(frame: &QuadricFrame, class: &QuadricClass, quadric: &ImplicitQuadric, tol: &Tolerances) -> Result<EuclideanElements> {
    let lambda = class.lambda;
    let principal = principal_planes(frame, lambda, quadric, tol)?;
    let revolution = revolution_sphere(&principal, tol)?;
    let scale = principal.roots.iter().fold(0.0_f64, |m, r| m.max(r.value.abs()));
    let nonzero_poles = || {
        principal
            .families
            .iter()
            .filter(|f| f.mu.abs() > tol.tol_cluster * scale)
            .flat_map(|f| f.poles.iter().map(|p| Vector3::from(*p)))
            .collect::<Vec<_>>()
    };

    let mut axes = Vec::new();
    let mut vertex = None;
    let mut apex = None;
    let mut cyl = None;
    match class.kind {
        k if k.is_centered() => {
            axes = nonzero_poles().into_iter().map(|d| Axis { point: class.center.point, direction: d }).collect();
        }
        QuadricKind::Cone => {
            let t = frame.t_point.normalized(tol.tol_infinity);
            apex = Some(t);
            axes = nonzero_poles().into_iter().map(|d| Axis { point: t, direction: d }).collect();
        }
        k if k.is_paraboloid() => {
            let o = paraboloid_vertex(frame, lambda, quadric, tol)?;
            vertex = Some(o);
            axes.push(Axis { point: o, direction: class.center.point.spatial().normalize() });
        }
        _ => {
            let c = cylinder_axis(frame, lambda, quadric, tol)?;
            axes.push(Axis { point: c.point, direction: c.direction });
            cyl = Some(c);
        }
    }
    Ok(EuclideanElements { principal, revolution, axes, vertex, apex, cylinder_axis: cyl })
}
