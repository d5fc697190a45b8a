//! Homogeneous points, plane forms and symmetric forms on projective 3-space.
//!
//! Points carry four coordinates `(x, y, z, w)`. A point is proper when `w` is
//! not negligible against the other coordinates, and improper (a direction,
//! or point at infinity) otherwise. Plane forms act on points by the dot product.

mod cubic;

pub use cubic::{Cubic, Root};

use nalgebra::{Matrix3, Matrix4, SymmetricEigen, Vector3, Vector4, SVD};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A nonzero homogeneous 4-vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct HPoint([f64; 4]);

impl TryFrom<[f64; 4]> for HPoint {
    type Error = Error;
    fn try_from(c: [f64; 4]) -> Result<Self> {
        HPoint::new(c)
    }
}

impl From<HPoint> for [f64; 4] {
    fn from(p: HPoint) -> Self {
        p.0
    }
}

impl HPoint {
    pub fn new(coords: [f64; 4]) -> Result<Self> {
        if coords.iter().all(|c| *c == 0.0) || coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::ZeroVector);
        }
        Ok(Self(coords))
    }

    /// The proper point with Cartesian coordinates `(x, y, z)`.
    pub fn point(x: f64, y: f64, z: f64) -> Self {
        Self([x, y, z, 1.0])
    }

    /// The improper point in direction `(x, y, z)`.
    pub fn direction(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new([x, y, z, 0.0])
    }

    pub fn from_cartesian(p: &Vector3<f64>) -> Self {
        Self::point(p.x, p.y, p.z)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Result<Self> {
        Self::new([v[0], v[1], v[2], v[3]])
    }

    pub fn coords(&self) -> [f64; 4] {
        self.0
    }

    pub fn vector(&self) -> Vector4<f64> {
        Vector4::from(self.0)
    }

    pub fn w(&self) -> f64 {
        self.0[3]
    }

    pub fn spatial(&self) -> Vector3<f64> {
        Vector3::new(self.0[0], self.0[1], self.0[2])
    }

    fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn is_proper(&self, tol_infinity: f64) -> bool {
        self.w().abs() > tol_infinity * self.max_abs()
    }

    /// `1.0` for proper points and `0.0` for improper ones.
    pub fn epsilon(&self, tol_infinity: f64) -> f64 {
        if self.is_proper(tol_infinity) {
            1.0
        } else {
            0.0
        }
    }

    /// Ratio `|w| / max|coord|`; zero for exact directions.
    pub fn properness(&self) -> f64 {
        self.w().abs() / self.max_abs()
    }

    pub fn to_cartesian(&self, tol_infinity: f64) -> Option<Vector3<f64>> {
        self.is_proper(tol_infinity).then(|| self.spatial() / self.w())
    }

    /// Representative with `w = 1` for proper points, or unit spatial part with
    /// the first significant coordinate positive for improper ones.
    pub fn normalized(&self, tol_infinity: f64) -> Self {
        if self.is_proper(tol_infinity) {
            let w = self.w();
            Self([self.0[0] / w, self.0[1] / w, self.0[2] / w, 1.0])
        } else {
            let d = self.spatial();
            let n = d.norm();
            let d = if n > 0.0 { d / n } else { d };
            let d = sign_canonical(d.as_slice());
            Self([d[0], d[1], d[2], 0.0])
        }
    }

    /// Projective equality: the two vectors are parallel up to `tol`.
    pub fn same_point(&self, other: &HPoint, tol: f64) -> bool {
        parallel(&self.vector(), &other.vector(), tol)
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::from_vector(&(self.vector() * k))
    }
}

/// A linear form on homogeneous coordinates; as a point set, a plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinForm([f64; 4]);

impl LinForm {
    pub fn new(coeffs: [f64; 4]) -> Self {
        Self(coeffs)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self([v[0], v[1], v[2], v[3]])
    }

    pub fn coeffs(&self) -> [f64; 4] {
        self.0
    }

    pub fn vector(&self) -> Vector4<f64> {
        Vector4::from(self.0)
    }

    pub fn eval(&self, p: &HPoint) -> f64 {
        self.vector().dot(&p.vector())
    }

    pub fn eval_vec(&self, v: &Vector4<f64>) -> f64 {
        self.vector().dot(v)
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::from_vector(&(self.vector() * k))
    }

    /// Cartesian normal `(a, b, c)` of `ax + by + cz + d`.
    pub fn normal(&self) -> Vector3<f64> {
        Vector3::new(self.0[0], self.0[1], self.0[2])
    }

    /// Unit-norm representative whose first significant coefficient is positive.
    pub fn normalized(&self) -> Self {
        let n = self.vector().norm();
        let v: Vec<f64> = self.0.iter().map(|c| c / n).collect();
        let v = sign_canonical(&v);
        Self([v[0], v[1], v[2], v[3]])
    }

    pub fn same_plane(&self, other: &LinForm, tol: f64) -> bool {
        parallel(&self.vector(), &other.vector(), tol)
    }
}

/// Flips the sign so that the first coefficient that is not negligible
/// (relative to the largest) is positive.
fn sign_canonical(v: &[f64]) -> Vec<f64> {
    let max = v.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let lead = v.iter().find(|c| c.abs() > 1e-12 * max).copied().unwrap_or(1.0);
    let s = if lead < 0.0 { -1.0 } else { 1.0 };
    v.iter().map(|c| s * c).collect()
}

/// True when `a` and `b` span at most a line: every 2x2 minor is small
/// relative to `|a| |b|`.
pub fn parallel(a: &Vector4<f64>, b: &Vector4<f64>, tol: f64) -> bool {
    let scale = a.norm() * b.norm();
    if scale == 0.0 {
        return false;
    }
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in (i + 1)..4 {
            worst = worst.max((a[i] * b[j] - a[j] * b[i]).abs());
        }
    }
    worst <= tol * scale
}

/// Least-squares coordinates of `target` in the span of three 4-vectors,
/// with the residual relative to `|target|`.
pub fn decompose(target: &Vector4<f64>, basis: [Vector4<f64>; 3]) -> (Vector3<f64>, f64) {
    let m = nalgebra::Matrix4x3::from_columns(&basis);
    let x = SVD::new(m, true, true)
        .solve(target, 1e-14 * m.norm())
        .unwrap_or_else(|_| Vector3::zeros());
    let residual = (m * x - target).norm() / target.norm().max(f64::MIN_POSITIVE);
    (x, residual)
}

/// Unit null vector of three homogeneous 4-vectors, or `None` when they are
/// dependent to within `tol_rank`.
fn null_vector(rows: [Vector4<f64>; 3], tol_rank: f64) -> Option<Vector4<f64>> {
    let scaled: Vec<Vector4<f64>> = rows
        .iter()
        .map(|r| {
            let n = r.norm();
            if n > 0.0 {
                r / n
            } else {
                *r
            }
        })
        .collect();
    let m = Matrix4::from_rows(&[
        scaled[0].transpose(),
        scaled[1].transpose(),
        scaled[2].transpose(),
        Vector4::zeros().transpose(),
    ]);
    let svd = SVD::new(m, false, true);
    let v_t = svd.v_t?;
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let s = &svd.singular_values;
    if s[order[0]] == 0.0 || s[order[2]] <= tol_rank * s[order[0]] {
        return None;
    }
    Some(v_t.row(order[3]).transpose())
}

/// The plane through three homogeneous points.
pub fn plane_through(a: &HPoint, b: &HPoint, c: &HPoint, tol_rank: f64) -> Result<LinForm> {
    null_vector([a.vector(), b.vector(), c.vector()], tol_rank)
        .map(|v| LinForm::from_vector(&v))
        .ok_or(Error::CollinearInput)
}

/// The common point of three planes.
pub fn meet3(a: &LinForm, b: &LinForm, c: &LinForm, tol_rank: f64) -> Result<HPoint> {
    null_vector([a.vector(), b.vector(), c.vector()], tol_rank)
        .ok_or(Error::DependentPlanes)
        .and_then(|v| HPoint::from_vector(&v))
}

/// Which coordinates a 4x4 symmetric form is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis4 {
    /// Point form in Cartesian homogeneous coordinates `(x, y, z, 1)`.
    Cartesian,
    /// Tangential form acting on Cartesian plane coefficients.
    CartesianDual,
    /// Point form in the frame forms `(r, q, p, t)`.
    Frame,
    /// Tangential form in the frame points `(U, V, W, T)`.
    FrameDual,
}

impl Basis4 {
    fn dual(self) -> Self {
        match self {
            Basis4::Cartesian => Basis4::CartesianDual,
            Basis4::CartesianDual => Basis4::Cartesian,
            Basis4::Frame => Basis4::FrameDual,
            Basis4::FrameDual => Basis4::Frame,
        }
    }
}

/// Which coordinates a 3x3 symmetric form is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis3 {
    /// Cartesian directions `(x, y, z)`.
    Cartesian,
    /// The frame-adapted basis of the plane at infinity used for principal planes.
    FrameAdapted,
}

/// Counts of positive, negative and zero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

fn signature_of(eigs: &[f64], tol_rank: f64) -> Signature {
    let scale = eigs.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    let mut sig = Signature { positive: 0, negative: 0, zero: 0 };
    for &e in eigs {
        if scale == 0.0 || e.abs() <= tol_rank * scale {
            sig.zero += 1;
        } else if e > 0.0 {
            sig.positive += 1;
        } else {
            sig.negative += 1;
        }
    }
    sig
}

/// Symmetric 4x4 form with its basis tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymForm4 {
    m: Matrix4<f64>,
    basis: Basis4,
}

impl SymForm4 {
    /// Builds a form from any square matrix by symmetrizing it.
    pub fn new(m: Matrix4<f64>, basis: Basis4) -> Self {
        Self { m: (m + m.transpose()) * 0.5, basis }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    pub fn basis(&self) -> Basis4 {
        self.basis
    }

    pub fn rows(&self) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.m[(i, j)];
            }
        }
        out
    }

    pub fn eval(&self, x: &Vector4<f64>) -> f64 {
        x.dot(&(self.m * x))
    }

    /// Classical adjugate (transpose of the cofactor matrix), tagged with the dual basis.
    pub fn adjugate(&self) -> Self {
        let mut adj = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let minor = self.m.remove_row(i).remove_column(j).determinant();
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                adj[(j, i)] = sign * minor;
            }
        }
        Self::new(adj, self.basis.dual())
    }

    pub fn eigenvalues(&self) -> Vector4<f64> {
        SymmetricEigen::new(self.m).eigenvalues
    }

    pub fn signature(&self, tol_rank: f64) -> Signature {
        signature_of(self.eigenvalues().as_slice(), tol_rank)
    }

    /// Frobenius norm of the matrix.
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }
}

/// Symmetric 3x3 form with its basis tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymForm3 {
    m: Matrix3<f64>,
    basis: Basis3,
}

impl SymForm3 {
    pub fn new(m: Matrix3<f64>, basis: Basis3) -> Self {
        Self { m: (m + m.transpose()) * 0.5, basis }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn basis(&self) -> Basis3 {
        self.basis
    }

    pub fn adjugate(&self) -> Self {
        let m = &self.m;
        let c = |a: usize, b: usize, c: usize, d: usize| m[(a, c)] * m[(b, d)] - m[(a, d)] * m[(b, c)];
        let cof = Matrix3::new(
            c(1, 2, 1, 2),
            -c(1, 2, 0, 2),
            c(1, 2, 0, 1),
            -c(0, 2, 1, 2),
            c(0, 2, 0, 2),
            -c(0, 2, 0, 1),
            c(0, 1, 1, 2),
            -c(0, 1, 0, 2),
            c(0, 1, 0, 1),
        );
        Self::new(cof.transpose(), self.basis)
    }

    pub fn eigenvalues(&self) -> Vector3<f64> {
        SymmetricEigen::new(self.m).eigenvalues
    }

    pub fn signature(&self, tol_rank: f64) -> Signature {
        signature_of(self.eigenvalues().as_slice(), tol_rank)
    }
}
