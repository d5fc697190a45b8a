//! Real roots of polynomials of degree at most three, with multiplicities.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Factor applied to machine epsilon when estimating how far a k-fold root is
/// smeared by rounding in the coefficients: roughly `(K eps)^(1/k)`.
const SMEAR_FACTOR: f64 = 1000.0;

/// `a3 x^3 + a2 x^2 + a1 x + a0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cubic {
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

/// A real root together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: f64,
    pub multiplicity: u8,
}

impl Cubic {
    pub fn new(a3: f64, a2: f64, a1: f64, a0: f64) -> Self {
        Self { a3, a2, a1, a0 }
    }

    /// Coefficients from the constant term upwards.
    fn ascending(&self) -> [f64; 4] {
        [self.a0, self.a1, self.a2, self.a3]
    }

    pub fn eval(&self, x: f64) -> f64 {
        ((self.a3 * x + self.a2) * x + self.a1) * x + self.a0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (3.0 * self.a3 * x + 2.0 * self.a2) * x + self.a1
    }

    /// Index of the highest exactly-nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.ascending().iter().rposition(|c| *c != 0.0)
    }

    /// Discriminant of the cubic as written (zero leading terms included).
    pub fn discriminant(&self) -> f64 {
        let Cubic { a3, a2, a1, a0 } = *self;
        18.0 * a3 * a2 * a1 * a0 - 4.0 * a2.powi(3) * a0 + a2 * a2 * a1 * a1
            - 4.0 * a3 * a1.powi(3)
            - 27.0 * a3 * a3 * a0 * a0
    }

    /// Magnitude of the largest root, up to a small factor.
    pub fn root_scale(&self) -> f64 {
        let Some(n) = self.degree() else { return 1.0 };
        let c = self.ascending();
        let lead = c[n];
        let m = (0..n)
            .map(|i| (c[i] / lead).abs().powf(1.0 / (n - i) as f64))
            .fold(0.0_f64, f64::max);
        if m > 0.0 {
            m
        } else {
            1.0
        }
    }

    /// The cubic in `x = mu / root_scale`, divided by its largest coefficient.
    pub fn scaled(&self) -> (Cubic, f64) {
        let m = self.root_scale();
        let b = [self.a0, self.a1 * m, self.a2 * m * m, self.a3 * m * m * m];
        let top = b.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()));
        let top = if top > 0.0 { top } else { 1.0 };
        (Cubic::new(b[3] / top, b[2] / top, b[1] / top, b[0] / top), m)
    }

    /// Discriminant of [`Cubic::scaled`]; its coefficient vector has unit max-norm.
    pub fn normalized_discriminant(&self) -> f64 {
        self.scaled().0.discriminant()
    }

    /// Real roots in descending order with multiplicities.
    ///
    /// Roots are the eigenvalues of the companion matrix of the root-scaled
    /// polynomial. Two roots closer than `tol_cluster * max(1, |x_i| + |x_j|)`
    /// in scaled units form a double root, relocated to the nearby critical
    /// point. A triple root uses the wider radius `(K eps)^(1/3)` because
    /// rounding in the coefficients alone separates it by about that much.
    pub fn solve(&self, tol_cluster: f64) -> Result<Vec<Root>> {
        let n = match self.degree() {
            None | Some(0) => return Err(Error::DegeneratePolynomial),
            Some(n) => n,
        };
        let (p, m) = self.scaled();
        let c = p.ascending();
        let r2 = tol_cluster.max((SMEAR_FACTOR * f64::EPSILON).sqrt());
        let r3 = tol_cluster.max((SMEAR_FACTOR * f64::EPSILON).cbrt());
        let close = |a: Complex<f64>, b: Complex<f64>, r: f64| (a - b).norm() <= r * 1f64.max(a.norm() + b.norm());

        let roots: Vec<Root> = if n == 1 {
            vec![Root { value: -c[0] / c[1], multiplicity: 1 }]
        } else {
            let z = companion_roots(&c[..=n]);
            if n == 3 && close(z[0], z[1], r3) && close(z[1], z[2], r3) && close(z[0], z[2], r3) {
                vec![Root { value: -c[2] / (3.0 * c[3]), multiplicity: 3 }]
            } else if let Some((i, j)) = closest_pair(&z).filter(|&(i, j)| close(z[i], z[j], r2)) {
                let mean = 0.5 * (z[i].re + z[j].re);
                if n == 2 {
                    vec![Root { value: -c[1] / (2.0 * c[2]), multiplicity: 2 }]
                } else {
                    let double = nearest_critical_point(&p, mean);
                    let single = -c[2] / c[3] - 2.0 * double;
                    vec![
                        Root { value: double, multiplicity: 2 },
                        Root { value: polish(&p, single), multiplicity: 1 },
                    ]
                }
            } else {
                z.iter()
                    .filter(|r| r.im.abs() <= r2 * 1f64.max(r.norm()))
                    .map(|r| Root { value: polish_degree(&p, n, r.re), multiplicity: 1 })
                    .collect()
            }
        };

        let mut out: Vec<Root> = roots.into_iter().map(|r| Root { value: r.value * m, ..r }).collect();
        out.sort_by(|a, b| b.value.total_cmp(&a.value));
        Ok(out)
    }
}

fn companion_roots(ascending: &[f64]) -> Vec<Complex<f64>> {
    let n = ascending.len() - 1;
    let lead = ascending[n];
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -ascending[i] / lead;
    }
    comp.complex_eigenvalues().iter().copied().collect()
}

fn closest_pair(z: &[Complex<f64>]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..z.len() {
        for j in (i + 1)..z.len() {
            let d = (z[i] - z[j]).norm();
            if best.is_none_or(|b| d < b.2) {
                best = Some((i, j, d));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Root of the derivative closest to `near`; falls back to the inflection
/// point when rounding makes the derivative's discriminant negative.
fn nearest_critical_point(p: &Cubic, near: f64) -> f64 {
    let (a, b, c) = (3.0 * p.a3, 2.0 * p.a2, p.a1);
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return -b / (2.0 * a);
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut cands = vec![q / a];
    if q != 0.0 {
        cands.push(c / q);
    }
    cands.into_iter().min_by(|x, y| (x - near).abs().total_cmp(&(y - near).abs())).unwrap_or(near)
}

fn polish_degree(p: &Cubic, n: usize, x: f64) -> f64 {
    if n == 3 {
        polish(p, x)
    } else {
        polish(&Cubic::new(0.0, p.a2, p.a1, p.a0), x)
    }
}

/// A few Newton steps, each kept only if it reduces the residual.
fn polish(p: &Cubic, mut x: f64) -> f64 {
    for _ in 0..3 {
        let (f, d) = (p.eval(x), p.derivative(x));
        if d == 0.0 {
            break;
        }
        let next = x - f / d;
        if p.eval(next).abs() < f.abs() {
            x = next;
        } else {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_roots(k: f64, r: [f64; 3]) -> Cubic {
        let [a, b, c] = r;
        Cubic::new(k, -k * (a + b + c), k * (a * b + b * c + c * a), -k * a * b * c)
    }

    fn values(roots: &[Root]) -> Vec<(f64, u8)> {
        roots.iter().map(|r| (r.value, r.multiplicity)).collect()
    }

    #[test]
    fn three_simple_roots() {
        let roots = from_roots(2.0, [1.0, -2.0, 3.5]).solve(1e-6).unwrap();
        let v = values(&roots);
        assert_eq!(v.len(), 3);
        for ((got, m), want) in v.iter().zip([3.5, 1.0, -2.0]) {
            assert_eq!(*m, 1);
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_double_root() {
        let roots = from_roots(-0.75, [16.0 / 3.0, 16.0 / 3.0, -16.0 / 3.0]).solve(1e-6).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].multiplicity, 2);
        assert!((roots[0].value - 16.0 / 3.0).abs() < 1e-12);
        assert!((roots[1].value + 16.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn double_zero_root() {
        let roots = from_roots(1.0, [0.0, 0.0, 4.0]).solve(1e-6).unwrap();
        assert_eq!(values(&roots), vec![(4.0, 1), (0.0, 2)]);
    }

    #[test]
    fn triple_root() {
        let roots = from_roots(3.0, [0.7, 0.7, 0.7]).solve(1e-6).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 3);
        assert!((roots[0].value - 0.7).abs() < 1e-14);
    }

    #[test]
    fn nearly_double_roots_cluster() {
        let roots = from_roots(1.0, [1.0, 1.0 + 1e-9, -1.0]).solve(1e-6).unwrap();
        assert_eq!(roots[0].multiplicity, 2);
    }

    #[test]
    fn separated_roots_do_not_cluster() {
        let roots = from_roots(1.0, [1.0, 1.0 + 1e-4, -1.0]).solve(1e-6).unwrap();
        assert_eq!(roots.len(), 3);
    }

    #[test]
    fn complex_pair_is_dropped() {
        let roots = Cubic::new(1.0, 0.0, 1.0, 0.0).solve(1e-6).unwrap();
        assert_eq!(values(&roots), vec![(0.0, 1)]);
    }

    #[test]
    fn lower_degrees() {
        assert_eq!(values(&Cubic::new(0.0, 0.0, 2.0, -1.0).solve(1e-6).unwrap()), vec![(0.5, 1)]);
        let q = Cubic::new(0.0, 1.0, -2.0, 1.0).solve(1e-6).unwrap();
        assert_eq!(values(&q), vec![(1.0, 2)]);
        assert_eq!(Cubic::new(0.0, 0.0, 0.0, 1.0).solve(1e-6), Err(Error::DegeneratePolynomial));
    }

    #[test]
    fn discriminant_vanishes_on_double_root() {
        let c = from_roots(1.0, [2.0, 2.0, -1.0]);
        assert!(c.normalized_discriminant().abs() < 1e-14);
        assert!(from_roots(1.0, [2.0, 1.0, -1.0]).normalized_discriminant().abs() > 1e-3);
    }

    proptest! {
        #[test]
        fn separated_real_roots_are_recovered(
            a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0, k in 0.1f64..10.0,
        ) {
            let mut r = [a, b, c];
            r.sort_by(|x, y| y.total_cmp(x));
            prop_assume!(r[0] - r[1] > 1e-2 && r[1] - r[2] > 1e-2);
            let roots = from_roots(k, r).solve(1e-6).unwrap();
            prop_assert_eq!(roots.len(), 3);
            for (got, want) in roots.iter().zip(r) {
                prop_assert!((got.value - want).abs() <= 1e-8 * (1.0 + want.abs()));
            }
        }

        #[test]
        fn multiplicities_sum_to_degree(a in -5.0f64..5.0, b in -5.0f64..5.0, k in 0.1f64..10.0) {
            let roots = from_roots(k, [a, a, b]).solve(1e-6).unwrap();
            let total: u8 = roots.iter().map(|r| r.multiplicity).sum();
            prop_assert_eq!(total, 3);
        }
    }
}
