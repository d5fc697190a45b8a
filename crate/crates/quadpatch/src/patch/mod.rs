//! Quadratic rational Bézier control nets: triangular and biquadratic.

mod file;

pub use file::{Patch, PatchFile, PatchKind};

use nalgebra::{Vector3, Vector4};

use crate::projective::{plane_through, HPoint, LinForm};
use crate::{Error, Result};

/// Multi-indices `(i, j, k)` of a quadratic triangular net in storage order.
///
/// The order is the row layout `c002 c011 c020 / c101 c110 / c200`. The first
/// index pairs with barycentric `u`, the second with `v`, the third with `w`.
pub const TRI_INDICES: [(usize, usize, usize); 6] = [(0, 0, 2), (0, 1, 1), (0, 2, 0), (1, 0, 1), (1, 1, 0), (2, 0, 0)];

fn tri_slot(i: usize, j: usize, k: usize) -> usize {
    TRI_INDICES
        .iter()
        .position(|&t| t == (i, j, k))
        .unwrap_or_else(|| panic!("({i}, {j}, {k}) is not a quadratic multi-index"))
}

/// Tolerance on `|u + v + w - 1|` for barycentric input.
const BARYCENTRIC_SLACK: f64 = 1e-9;

fn check_net(points: &[Vector3<f64>], weights: &[f64]) -> Result<()> {
    if points.iter().any(|p| p.iter().any(|c| !c.is_finite())) {
        return Err(Error::InvalidPatch("control point with a non-finite coordinate".into()));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w == 0.0) {
        return Err(Error::InvalidPatch(format!("weight {w} must be finite and nonzero")));
    }
    Ok(())
}

fn distinct(points: &[Vector3<f64>]) -> bool {
    let scale = points.iter().fold(1.0_f64, |m, p| m.max(p.norm()));
    points
        .iter()
        .enumerate()
        .all(|(i, a)| points[i + 1..].iter().all(|b| (a - b).norm() > 1e-12 * scale))
}

fn bernstein2(t: f64) -> [f64; 3] {
    let s = 1.0 - t;
    [s * s, 2.0 * s * t, t * t]
}

/// Quadratic rational triangular Bézier patch.
#[derive(Debug, Clone, PartialEq)]
pub struct TriPatch {
    points: [Vector3<f64>; 6],
    weights: [f64; 6],
}

impl TriPatch {
    /// Control points and weights in the order of [`TRI_INDICES`].
    pub fn new(points: [Vector3<f64>; 6], weights: [f64; 6]) -> Result<Self> {
        check_net(&points, &weights)?;
        if !distinct(&[points[0], points[2], points[5]]) {
            return Err(Error::InvalidPatch("corner control points coincide".into()));
        }
        Ok(Self { points, weights })
    }

    pub fn points(&self) -> &[Vector3<f64>; 6] {
        &self.points
    }

    pub fn weights(&self) -> &[f64; 6] {
        &self.weights
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> Vector3<f64> {
        self.points[tri_slot(i, j, k)]
    }

    pub fn weight(&self, i: usize, j: usize, k: usize) -> f64 {
        self.weights[tri_slot(i, j, k)]
    }

    /// Control point `c_ijk` as a proper homogeneous point.
    pub fn hpoint(&self, i: usize, j: usize, k: usize) -> HPoint {
        HPoint::from_cartesian(&self.point(i, j, k))
    }

    /// Weighted homogeneous control vector `w_ijk (c_ijk, 1)`.
    pub fn weighted(&self, i: usize, j: usize, k: usize) -> Vector4<f64> {
        self.hpoint(i, j, k).vector() * self.weight(i, j, k)
    }

    /// Same net with weights multiplied by `alpha^i beta^j gamma^k`.
    pub fn reweighted(&self, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let mut weights = self.weights;
        for (w, &(i, j, k)) in weights.iter_mut().zip(TRI_INDICES.iter()) {
            *w *= alpha.powi(i as i32) * beta.powi(j as i32) * gamma.powi(k as i32);
        }
        Self::new(self.points, weights)
    }

    /// Corner `P = c002`.
    pub fn corner_p(&self) -> HPoint {
        self.hpoint(0, 0, 2)
    }

    /// Corner `Q = c020`.
    pub fn corner_q(&self) -> HPoint {
        self.hpoint(0, 2, 0)
    }

    /// Corner `R = c200`.
    pub fn corner_r(&self) -> HPoint {
        self.hpoint(2, 0, 0)
    }

    /// The three boundary conics, on `u = 0`, `v = 0` and `w = 0`.
    pub fn boundaries(&self) -> [BoundaryConic; 3] {
        let conic = |side, idx: [(usize, usize, usize); 3]| BoundaryConic {
            side,
            points: idx.map(|(i, j, k)| self.hpoint(i, j, k)),
            weights: idx.map(|(i, j, k)| self.weight(i, j, k)),
        };
        [
            conic(Side::U, [(0, 0, 2), (0, 1, 1), (0, 2, 0)]),
            conic(Side::V, [(0, 0, 2), (1, 0, 1), (2, 0, 0)]),
            conic(Side::W, [(0, 2, 0), (1, 1, 0), (2, 0, 0)]),
        ]
    }
}

/// Evaluates the triangular patch at barycentric `(u, v, w)`.
///
/// Inputs whose sum is within `1e-9` of one are renormalized; others are rejected.
pub fn eval_tri(patch: &TriPatch, u: f64, v: f64, w: f64) -> Result<HPoint> {
    let sum = u + v + w;
    if (sum - 1.0).abs() > BARYCENTRIC_SLACK {
        return Err(Error::NotBarycentric(u, v, w));
    }
    let (u, v, w) = (u / sum, v / sum, w / sum);
    let mut x = Vector4::zeros();
    for &(i, j, k) in TRI_INDICES.iter() {
        let multinomial = 2.0 / (fact(i) * fact(j) * fact(k));
        let b = multinomial * u.powi(i as i32) * v.powi(j as i32) * w.powi(k as i32);
        x += patch.weighted(i, j, k) * b;
    }
    HPoint::from_vector(&x)
}

fn fact(n: usize) -> f64 {
    (1..=n).product::<usize>() as f64
}

/// Barycentric sample points with `n` points per edge.
pub fn tri_grid(n: usize) -> Vec<[f64; 3]> {
    let d = (n.max(2) - 1) as f64;
    let mut out = Vec::new();
    for i in 0..n.max(2) {
        for j in 0..(n.max(2) - i) {
            let u = i as f64 / d;
            let v = j as f64 / d;
            out.push([u, v, (1.0 - u - v).max(0.0)]);
        }
    }
    out
}

/// Parameter sample points `(u, v)` on an `n x n` grid over the unit square.
pub fn square_grid(n: usize) -> Vec<[f64; 2]> {
    let d = (n.max(2) - 1) as f64;
    (0..n.max(2)).flat_map(|i| (0..n.max(2)).map(move |j| [i as f64 / d, j as f64 / d])).collect()
}

/// Quadratic rational tensor-product (biquadratic) Bézier patch.
#[derive(Debug, Clone, PartialEq)]
pub struct TpPatch {
    points: [[Vector3<f64>; 3]; 3],
    weights: [[f64; 3]; 3],
}

impl TpPatch {
    /// Control points `c_ij` indexed `[i][j]`; `i` pairs with parameter `u`.
    pub fn new(points: [[Vector3<f64>; 3]; 3], weights: [[f64; 3]; 3]) -> Result<Self> {
        let flat_p: Vec<Vector3<f64>> = points.iter().flatten().copied().collect();
        let flat_w: Vec<f64> = weights.iter().flatten().copied().collect();
        check_net(&flat_p, &flat_w)?;
        if !distinct(&[points[0][0], points[0][2], points[2][0], points[2][2]]) {
            return Err(Error::InvalidPatch("corner control points coincide".into()));
        }
        Ok(Self { points, weights })
    }

    pub fn point(&self, i: usize, j: usize) -> Vector3<f64> {
        self.points[i][j]
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i][j]
    }

    pub fn hpoint(&self, i: usize, j: usize) -> HPoint {
        HPoint::from_cartesian(&self.points[i][j])
    }

    pub fn weights(&self) -> &[[f64; 3]; 3] {
        &self.weights
    }

    pub fn points(&self) -> &[[Vector3<f64>; 3]; 3] {
        &self.points
    }

    /// The same surface, with the rotated net at `(u, v)` tracing the original at
    /// `(v, 1 - u)`; corner `c02` moves to `c00`.
    pub fn rotated(&self) -> Self {
        let points = [0, 1, 2].map(|i| [0, 1, 2].map(|j| self.points[j][2 - i]));
        let weights = [0, 1, 2].map(|i| [0, 1, 2].map(|j| self.weights[j][2 - i]));
        Self { points, weights }
    }

    /// Boundary conic `c00, c01, c02` (the edge `u = 0`).
    pub fn conic_u(&self) -> BoundaryConic {
        BoundaryConic {
            side: Side::U,
            points: [0, 1, 2].map(|j| self.hpoint(0, j)),
            weights: [0, 1, 2].map(|j| self.weights[0][j]),
        }
    }

    /// Boundary conic `c00, c10, c20` (the edge `v = 0`).
    pub fn conic_v(&self) -> BoundaryConic {
        BoundaryConic {
            side: Side::V,
            points: [0, 1, 2].map(|i| self.hpoint(i, 0)),
            weights: [0, 1, 2].map(|i| self.weights[i][0]),
        }
    }
}

/// Evaluates the biquadratic patch at `(u, v)`.
pub fn eval_tp(patch: &TpPatch, u: f64, v: f64) -> Result<HPoint> {
    let bu = bernstein2(u);
    let bv = bernstein2(v);
    let mut x = Vector4::zeros();
    for (i, bi) in bu.iter().enumerate() {
        for (j, bj) in bv.iter().enumerate() {
            x += patch.hpoint(i, j).vector() * (patch.weights[i][j] * bi * bj);
        }
    }
    HPoint::from_vector(&x)
}

/// Which boundary of the triangle a conic lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    U,
    V,
    W,
}

/// Parameter on a boundary conic; `Infinity` is the limit point at `s -> oo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConicParam {
    At(f64),
    Infinity,
}

/// A quadratic rational Bézier arc `b0, b1, b2` with weights `w0, w1, w2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConic {
    pub side: Side,
    pub points: [HPoint; 3],
    pub weights: [f64; 3],
}

impl BoundaryConic {
    /// Weighted homogeneous control vectors `w_i b_i`.
    pub fn weighted(&self) -> [Vector4<f64>; 3] {
        [0, 1, 2].map(|i| self.points[i].vector() * self.weights[i])
    }

    pub fn plane(&self, tol_rank: f64) -> Result<LinForm> {
        plane_through(&self.points[0], &self.points[1], &self.points[2], tol_rank)
    }

    /// Homogeneous center of the conic: the pole of the line at infinity of its plane.
    pub fn center(&self) -> Vector4<f64> {
        let [w0, w1, w2] = self.weights;
        let [b0, b1, b2] = self.points.map(|p| p.vector());
        (b0 + b2) * (w0 * w2) - b1 * (2.0 * w1 * w1)
    }
}

/// Point of the arc at parameter `s`, as an unnormalized homogeneous vector.
pub fn eval_conic(conic: &BoundaryConic, s: ConicParam) -> Result<HPoint> {
    let [a0, a1, a2] = conic.weighted();
    let x = match s {
        ConicParam::At(s) => {
            let b = bernstein2(s);
            a0 * b[0] + a1 * b[1] + a2 * b[2]
        }
        ConicParam::Infinity => a0 - a1 * 2.0 + a2,
    };
    HPoint::from_vector(&x)
}
