//! Test support: random quadric patches from known quadrics, an independent
//! rational Bernstein evaluator and a brute-force least-squares fitter.
#![allow(dead_code)]

use nalgebra::{DMatrix, Isometry3, Matrix4, Translation3, UnitQuaternion, Vector3, Vector4};
use quadpatch::classify::QuadricKind;
use quadpatch::patch::{TpPatch, TriPatch};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

/// Barycentric exponents in storage order `c002, c011, c020, c101, c110, c200`.
const TRI: [(i32, i32, i32); 6] = [(0, 0, 2), (0, 1, 1), (0, 2, 0), (1, 0, 1), (1, 1, 0), (2, 0, 0)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Ellipsoid,
    Sphere,
    OneSheet,
    TwoSheets,
    EllipticParaboloid,
    HyperbolicParaboloid,
    Cone,
    EllipticCylinder,
    HyperbolicCylinder,
    /// Polynomial patch on a parabolic cylinder; its boundary parabolas share no point.
    ParabolicCylinder,
}

pub const FAMILIES: [Family; 10] = [
    Family::Ellipsoid,
    Family::Sphere,
    Family::OneSheet,
    Family::TwoSheets,
    Family::EllipticParaboloid,
    Family::HyperbolicParaboloid,
    Family::Cone,
    Family::EllipticCylinder,
    Family::HyperbolicCylinder,
    Family::ParabolicCylinder,
];

impl Family {
    pub fn kind(self) -> QuadricKind {
        match self {
            Family::Ellipsoid | Family::Sphere => QuadricKind::Ellipsoid,
            Family::OneSheet => QuadricKind::HyperboloidOneSheet,
            Family::TwoSheets => QuadricKind::HyperboloidTwoSheets,
            Family::EllipticParaboloid => QuadricKind::EllipticParaboloid,
            Family::HyperbolicParaboloid => QuadricKind::HyperbolicParaboloid,
            Family::Cone => QuadricKind::Cone,
            Family::EllipticCylinder => QuadricKind::EllipticCylinder,
            Family::HyperbolicCylinder => QuadricKind::HyperbolicCylinder,
            Family::ParabolicCylinder => QuadricKind::ParabolicCylinder,
        }
    }
}

/// A generated patch together with the quadric it was drawn from.
#[derive(Debug, Clone)]
pub struct Sample {
    pub family: Family,
    /// Cartesian point form of the source quadric.
    pub quadric: Matrix4<f64>,
    pub patch: TriPatch,
}

#[derive(Debug, Clone)]
pub struct TpSample {
    pub family: Family,
    pub quadric: Matrix4<f64>,
    pub patch: TpPatch,
}

fn axis_scales(rng: &mut TestRng) -> [f64; 3] {
    [0, 1, 2].map(|_| rng.gen_range(0.6..2.0))
}

/// Point form of the family in its standard position.
fn standard_quadric(rng: &mut TestRng, family: Family) -> Matrix4<f64> {
    let [a, b, c] = axis_scales(rng).map(|s| 1.0 / (s * s));
    let diag = |d: [f64; 4]| Matrix4::from_diagonal(&Vector4::from(d));
    match family {
        Family::Ellipsoid => diag([a, b, c, -1.0]),
        Family::Sphere => diag([1.0, 1.0, 1.0, -1.0 / a]),
        Family::OneSheet => diag([a, b, -c, -1.0]),
        Family::TwoSheets => diag([-a, -b, c, -1.0]),
        Family::EllipticParaboloid | Family::HyperbolicParaboloid => {
            let sign = if family == Family::EllipticParaboloid { 1.0 } else { -1.0 };
            let mut m = diag([a, sign * b, 0.0, 0.0]);
            m[(2, 3)] = -0.5;
            m[(3, 2)] = -0.5;
            m
        }
        Family::Cone => diag([a, b, -c, 0.0]),
        Family::EllipticCylinder => diag([a, b, 0.0, -1.0]),
        Family::HyperbolicCylinder => diag([a, -b, 0.0, -1.0]),
        Family::ParabolicCylinder => {
            let mut m = diag([0.0, a, 0.0, -1.0]);
            m[(0, 3)] = 0.5;
            m[(3, 0)] = 0.5;
            m
        }
    }
}

pub fn random_motion(rng: &mut TestRng) -> Isometry3<f64> {
    let q = nalgebra::Quaternion::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let rotation = UnitQuaternion::from_quaternion(q);
    let shift = Translation3::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
    Isometry3::from_parts(shift, rotation)
}

fn random_point(rng: &mut TestRng, r: f64) -> Vector3<f64> {
    Vector3::new(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// A point of the quadric on a random line, away from its singular point.
fn point_on(rng: &mut TestRng, q: &Matrix4<f64>) -> Vector4<f64> {
    loop {
        let p = random_point(rng, 2.0).push(1.0);
        let d = random_point(rng, 1.0).push(0.0);
        let (a, b, c) = (d.dot(&(q * d)), d.dot(&(q * p)), p.dot(&(q * p)));
        let disc = b * b - a * c;
        if a.abs() < 1e-3 || disc < 0.0 {
            continue;
        }
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let x = p + d * ((-b + sign * disc.sqrt()) / a);
        let gradient = (q * x).xyz().norm();
        if x.xyz().norm() < 4.0 && gradient > 0.2 {
            return x;
        }
    }
}

/// Second intersection of the line `s0 x` with the quadric; quadratic in `x`.
fn project(q: &Matrix4<f64>, s0: &Vector4<f64>, x: &Vector4<f64>) -> Vector4<f64> {
    s0 * x.dot(&(q * x)) - x * (2.0 * s0.dot(&(q * x)))
}

fn bernstein_tri(u: f64, v: f64, w: f64) -> [f64; 6] {
    TRI.map(|(i, j, k)| {
        let multinomial = 2.0 / [1.0, 1.0, 2.0][i as usize] / [1.0, 1.0, 2.0][j as usize] / [1.0, 1.0, 2.0][k as usize];
        multinomial * u.powi(i) * v.powi(j) * w.powi(k)
    })
}

fn bernstein2(t: f64) -> [f64; 3] {
    [(1.0 - t) * (1.0 - t), 2.0 * t * (1.0 - t), t * t]
}

/// Least-squares fit of homogeneous Bernstein coefficients to samples of `f`.
fn fit(rows: Vec<(Vec<f64>, Vector4<f64>)>) -> Vec<Vector4<f64>> {
    let n = rows[0].0.len();
    let a = DMatrix::from_fn(rows.len(), n, |r, c| rows[r].0[c]);
    let b = DMatrix::from_fn(rows.len(), 4, |r, c| rows[r].1[c]);
    let x = a.svd(true, true).solve(&b, 1e-14).expect("full rank design");
    (0..n).map(|i| Vector4::new(x[(i, 0)], x[(i, 1)], x[(i, 2)], x[(i, 3)])).collect()
}

pub fn fit_tri(f: impl Fn(f64, f64, f64) -> Vector4<f64>) -> [Vector4<f64>; 6] {
    let n = 8;
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n - i {
            let (u, v) = (i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64);
            let w = 1.0 - u - v;
            rows.push((bernstein_tri(u, v, w).to_vec(), f(u, v, w)));
        }
    }
    fit(rows).try_into().unwrap()
}

pub fn fit_tp(f: impl Fn(f64, f64) -> Vector4<f64>) -> [[Vector4<f64>; 3]; 3] {
    let n = 7;
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (u, v) = (i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64);
            let (bu, bv) = (bernstein2(u), bernstein2(v));
            let basis: Vec<f64> = (0..9).map(|k| bu[k / 3] * bv[k % 3]).collect();
            rows.push((basis, f(u, v)));
        }
    }
    let c = fit(rows);
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| c[3 * i + j]))
}

/// Splits homogeneous coefficients into points and weights when the net is
/// well shaped: weights of one sign within a bounded ratio, points in a box.
fn split(coeffs: &[Vector4<f64>]) -> Option<(Vec<Vector3<f64>>, Vec<f64>)> {
    let sign = coeffs[0][3].signum();
    let weights: Vec<f64> = coeffs.iter().map(|c| c[3] * sign).collect();
    let (lo, hi) = weights.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &w| (lo.min(w), hi.max(w)));
    if lo <= 0.0 || hi / lo > 30.0 {
        return None;
    }
    let points: Vec<Vector3<f64>> = coeffs.iter().map(|c| c.xyz() / c[3]).collect();
    if points.iter().any(|p| p.norm() > 15.0) {
        return None;
    }
    let scale = hi;
    Some((points, weights.iter().map(|w| w / scale).collect()))
}

fn not_collinear(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> bool {
    let (e1, e2) = (b - a, c - a);
    e1.cross(&e2).norm() > 1e-2 * e1.norm().max(e2.norm()).powi(2).max(1e-6) && e1.norm() > 0.05 && e2.norm() > 0.05
}

/// Rigid motion as a homogeneous matrix.
pub fn motion_matrix(m: &Isometry3<f64>) -> Matrix4<f64> {
    m.to_homogeneous()
}

/// Point form of the quadric after moving space by `m`.
pub fn moved_quadric(q: &Matrix4<f64>, m: &Matrix4<f64>) -> Matrix4<f64> {
    let inv = m.try_inverse().expect("rigid motions invert");
    inv.transpose() * q * inv
}

fn polynomial_cylinder(rng: &mut TestRng, q_scale: f64) -> Option<[Vector4<f64>; 6]> {
    // On y^2 = (1 - x) / k: y is affine in (u, v, w), z is an arbitrary quadratic.
    let k = q_scale;
    let ly = [0, 1, 2].map(|_| rng.gen_range(-1.2..1.2));
    let lz: [f64; 6] = [0, 1, 2, 3, 4, 5].map(|_| rng.gen_range(-2.0..2.0));
    let coeffs = fit_tri(|u, v, w| {
        let y = ly[0] * u + ly[1] * v + ly[2] * w;
        let z = lz[0] * u * u + lz[1] * v * v + lz[2] * w * w + lz[3] * u * v + lz[4] * v * w + lz[5] * w * u;
        Vector4::new(1.0 - k * y * y, y, z, 1.0)
    });
    let spread = (ly[0] - ly[1]).abs().min((ly[1] - ly[2]).abs()).min((ly[2] - ly[0]).abs());
    (spread > 0.2).then_some(coeffs)
}

/// A triangular patch on a random member of `family`, moved rigidly into general position.
pub fn random_tri(rng: &mut TestRng, family: Family) -> Sample {
    for _ in 0..10_000 {
        let q0 = standard_quadric(rng, family);
        let coeffs = if family == Family::ParabolicCylinder {
            match polynomial_cylinder(rng, q0[(1, 1)]) {
                Some(c) => c,
                None => continue,
            }
        } else {
            let s0 = point_on(rng, &q0);
            let corners = [0, 1, 2].map(|_| (s0.xyz() + random_point(rng, 1.5)).push(1.0));
            fit_tri(|u, v, w| project(&q0, &s0, &(corners[0] * u + corners[1] * v + corners[2] * w)))
        };
        let motion = motion_matrix(&random_motion(rng));
        let moved: Vec<Vector4<f64>> = coeffs.iter().map(|c| motion * c).collect();
        let Some((points, weights)) = split(&moved) else { continue };
        let p: [Vector3<f64>; 6] = points.try_into().unwrap();
        let edges = [(0, 1, 2), (0, 3, 5), (2, 4, 5)];
        if !edges.iter().all(|&(a, b, c)| not_collinear(&p[a], &p[b], &p[c])) || !not_collinear(&p[0], &p[2], &p[5]) {
            continue;
        }
        let Ok(patch) = TriPatch::new(p, weights.try_into().unwrap()) else { continue };
        return Sample { family, quadric: moved_quadric(&q0, &motion), patch };
    }
    panic!("no acceptable {family:?} patch in 10000 draws");
}

/// A biquadratic patch on a random member of `family` (not the polynomial cylinder).
pub fn random_tp(rng: &mut TestRng, family: Family) -> TpSample {
    assert_ne!(family, Family::ParabolicCylinder);
    for _ in 0..10_000 {
        let q0 = standard_quadric(rng, family);
        let s0 = point_on(rng, &q0);
        let c = [0, 1, 2, 3].map(|_| (s0.xyz() + random_point(rng, 1.5)).push(1.0));
        let coeffs = fit_tp(|u, v| {
            let x = c[0] * ((1.0 - u) * (1.0 - v)) + c[1] * ((1.0 - u) * v) + c[2] * (u * (1.0 - v)) + c[3] * (u * v);
            project(&q0, &s0, &x)
        });
        let motion = motion_matrix(&random_motion(rng));
        let flat: Vec<Vector4<f64>> = coeffs.iter().flatten().map(|c| motion * c).collect();
        let Some((points, weights)) = split(&flat) else { continue };
        let rows = [[0, 1, 2], [3, 4, 5], [6, 7, 8], [0, 3, 6], [2, 5, 8], [0, 2, 6]];
        if !rows.iter().all(|r| not_collinear(&points[r[0]], &points[r[1]], &points[r[2]])) {
            continue;
        }
        let pts = [0, 1, 2].map(|i| [0, 1, 2].map(|j| points[3 * i + j]));
        let ws = [0, 1, 2].map(|i| [0, 1, 2].map(|j| weights[3 * i + j]));
        let Ok(patch) = TpPatch::new(pts, ws) else { continue };
        return TpSample { family, quadric: moved_quadric(&q0, &motion), patch };
    }
    panic!("no acceptable {family:?} tensor patch in 10000 draws");
}

/// `n` patches cycling through all families, reproducible from `seed`.
pub fn batch(seed: u64, n: usize) -> Vec<Sample> {
    let mut rng = TestRng::seed_from_u64(seed);
    (0..n).map(|i| random_tri(&mut rng, FAMILIES[i % FAMILIES.len()])).collect()
}

/// Independent evaluation of a triangular net at barycentric `(u, v, w)`.
pub fn eval_tri_ref(patch: &TriPatch, u: f64, v: f64, w: f64) -> Vector3<f64> {
    let b = bernstein_tri(u, v, w);
    let (mut num, mut den) = (Vector3::zeros(), 0.0);
    for (k, bk) in b.iter().enumerate() {
        num += patch.points()[k] * (patch.weights()[k] * bk);
        den += patch.weights()[k] * bk;
    }
    num / den
}

pub fn eval_tp_ref(patch: &TpPatch, u: f64, v: f64) -> Vector3<f64> {
    let (bu, bv) = (bernstein2(u), bernstein2(v));
    let (mut num, mut den) = (Vector3::zeros(), 0.0);
    for (i, bi) in bu.iter().enumerate() {
        for (j, bj) in bv.iter().enumerate() {
            let b = patch.weights()[i][j] * bi * bj;
            num += patch.points()[i][j] * b;
            den += b;
        }
    }
    num / den
}

/// `n x n` samples over the triangle, mapped from the unit square.
pub fn tri_samples(patch: &TriPatch, n: usize) -> Vec<Vector3<f64>> {
    let d = (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let u = i as f64 / d;
            let v = (1.0 - u) * j as f64 / d;
            out.push(eval_tri_ref(patch, u, v, (1.0 - u - v).max(0.0)));
        }
    }
    out
}

pub fn tp_samples(patch: &TpPatch, n: usize) -> Vec<Vector3<f64>> {
    let d = (n - 1) as f64;
    (0..n).flat_map(|i| (0..n).map(move |j| (i as f64 / d, j as f64 / d))).map(|(u, v)| eval_tp_ref(patch, u, v)).collect()
}

/// Ten coefficients `x^2, y^2, z^2, xy, xz, yz, x, y, z, 1` of a point form.
pub fn coeffs_of(m: &Matrix4<f64>) -> [f64; 10] {
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

/// Largest coefficient `1`, first nonzero coefficient positive.
pub fn normalized(c: [f64; 10]) -> [f64; 10] {
    let max = c.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let lead = c.iter().find(|x| x.abs() > 1e-9 * max).copied().expect("nonzero coefficients");
    c.map(|x| x * lead.signum() / max)
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `|F(x)| / (|c| (1 + |x|^2))`.
pub fn residual(c: &[f64; 10], x: &Vector3<f64>) -> f64 {
    let (px, py, pz) = (x.x, x.y, x.z);
    let f = c[0] * px * px + c[1] * py * py + c[2] * pz * pz + c[3] * px * py + c[4] * px * pz + c[5] * py * pz
        + c[6] * px
        + c[7] * py
        + c[8] * pz
        + c[9];
    let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    f.abs() / (norm * (1.0 + x.norm_squared()))
}

/// Fixture file names and the patches they hold.
pub fn fixtures() -> Vec<(&'static str, quadpatch::patch::Patch)> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    ["ellipsoid", "two_sheets", "hyperbolic_paraboloid", "parabolic_cylinder", "cone", "sphere"]
        .into_iter()
        .map(|name| {
            let file = quadpatch::patch::PatchFile::load(&dir.join(format!("{name}.toml"))).unwrap();
            (name, file.to_patch().unwrap())
        })
        .collect()
}
