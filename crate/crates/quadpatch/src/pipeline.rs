//! End-to-end analysis of a control net.

use crate::canonical::{detect_ruled_degenerate, find_common_point, rescale_weights, tp_to_tri, CanonicalTri, CommonPoint};
use crate::classify::{classify, QuadricClass};
use crate::euclid::{euclidean_elements, EuclideanElements};
use crate::forms::{estimate_lambda, point_form, to_cartesian, ImplicitQuadric, LambdaEstimate};
use crate::frame::{build_frame, frame_degenerate, QuadricFrame};
use crate::patch::{eval_tp, eval_tri, square_grid, tri_grid, Patch, TpPatch, TriPatch};
use crate::projective::HPoint;
use crate::{Error, Result, Tolerances};

/// How the frame was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Triangular net with a common point of the boundary conics.
    Canonical,
    /// Biquadratic net reduced to a triangular one.
    TensorReduction,
    /// Cone or cylinder without a common point; frame from tangent planes only.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub tol: Tolerances,
    /// Sample points per edge (triangles) or per side (tensor nets) for the residual check.
    pub grid: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self { tol: Tolerances::default(), grid: 15 }
    }
}

/// Everything computed for one patch.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub route: Route,
    pub canonical: Option<CanonicalTri>,
    pub frame: QuadricFrame,
    pub lambda: f64,
    pub quadric: ImplicitQuadric,
    pub class: QuadricClass,
    pub elements: EuclideanElements,
    /// Largest normalized residual of the implicit equation on the sample grid.
    pub max_residual: f64,
    pub samples: usize,
    /// Set when `lambda` fell inside the zero band and the samples settled its value.
    pub lambda_note: Option<String>,
}

impl Analysis {
    /// Conditioning notes collected along the way.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = self.frame.warnings.clone();
        w.extend(self.lambda_note.iter().cloned());
        w.extend(self.class.borderline.iter().cloned());
        w.extend(self.elements.revolution.borderline.iter().cloned());
        if self.elements.cylinder_axis.is_some_and(|c| c.best_effort) {
            w.push("parabolic cylinder: axis reported as the line of vertices".into());
        }
        w
    }
}

fn canonical_frame(patch: &TriPatch, tol: &Tolerances) -> Result<Option<(CanonicalTri, QuadricFrame, LambdaEstimate)>> {
    let s = match find_common_point(patch, tol) {
        Ok(CommonPoint::Found(s)) => s,
        Ok(CommonPoint::Missing { .. }) | Err(Error::DependentPlanes) => return Ok(None),
        Err(e) => return Err(e),
    };
    let canon = rescale_weights(patch, &s, tol)?;
    let frame = build_frame(&canon, tol)?;
    let lambda = estimate_lambda(&frame, tol)?;
    Ok(Some((canon, frame, lambda)))
}

/// Implicit equation for `lambda` and its largest residual on the samples.
fn fit(frame: &QuadricFrame, lambda: f64, samples: &[HPoint], tol: &Tolerances) -> Result<(ImplicitQuadric, Vec<f64>)> {
    let quadric = to_cartesian(&point_form(frame, lambda)?, frame)?;
    let residuals = samples.iter().filter_map(|x| quadric.residual(x, tol.tol_infinity)).collect();
    Ok((quadric, residuals))
}

fn worst(residuals: &[f64]) -> f64 {
    residuals.iter().copied().fold(0.0_f64, f64::max)
}

/// Snapped residuals below this fraction of `tol_residual` are accepted as
/// they are: a patch this close to a cone or cylinder cannot tell them apart.
const SNAP_FRACTION: f64 = 1e-3;

fn finish(
    route: Route,
    canonical: Option<CanonicalTri>,
    frame: QuadricFrame,
    lambda: LambdaEstimate,
    samples: Vec<HPoint>,
    tol: &Tolerances,
) -> Result<Analysis> {
    let (mut quadric, mut residuals) = fit(&frame, lambda.value, &samples, tol)?;
    let mut chosen = lambda.value;
    let mut lambda_note = None;
    if lambda.in_band() {
        // The numerator test cannot tell the quotient from zero; the patch can.
        let (alt, alt_residuals) = fit(&frame, lambda.raw, &samples, tol)?;
        let (snapped, unsnapped) = (worst(&residuals), worst(&alt_residuals));
        if snapped > 10.0 * unsnapped.max(SNAP_FRACTION * tol.tol_residual) {
            lambda_note = Some(format!(
                "lambda = {:e} is inside the zero band, but the degenerate quadric leaves a residual of {snapped:e} on the patch",
                lambda.raw
            ));
            chosen = lambda.raw;
            quadric = alt;
            residuals = alt_residuals;
        }
    }
    let lambda = chosen;
    let max_residual = worst(&residuals);
    if max_residual > tol.tol_residual {
        return Err(Error::NotAQuadric(format!("implicit equation leaves a residual of {max_residual:e} on the patch")));
    }
    let class = classify(&frame, lambda, tol)?;
    let elements = euclidean_elements(&frame, &class, &quadric, tol)?;
    Ok(Analysis { route, canonical, frame, lambda, quadric, class, elements, max_residual, samples: residuals.len(), lambda_note })
}

fn tri_samples(patch: &TriPatch, grid: usize) -> Vec<HPoint> {
    tri_grid(grid).iter().filter_map(|&[u, v, w]| eval_tri(patch, u, v, w).ok()).collect()
}

fn tp_samples(patch: &TpPatch, grid: usize) -> Vec<HPoint> {
    square_grid(grid).iter().filter_map(|&[u, v]| eval_tp(patch, u, v).ok()).collect()
}

/// Analyzes a triangular net: canonical route when the boundary conics share
/// a point, otherwise the cone/cylinder test.
pub fn analyze_tri(patch: &TriPatch, opts: &Options) -> Result<Analysis> {
    let tol = &opts.tol;
    let samples = tri_samples(patch, opts.grid);
    let canonical = match canonical_frame(patch, tol) {
        Ok(found) => found,
        Err(err @ Error::NotAQuadric(_)) => {
            if detect_ruled_degenerate(patch, opts.grid, tol)?.is_degenerate {
                None
            } else {
                return Err(err);
            }
        }
        Err(e) => return Err(e),
    };
    if let Some((canon, frame, lambda)) = canonical {
        return finish(Route::Canonical, Some(canon), frame, lambda, samples, tol);
    }
    let check = detect_ruled_degenerate(patch, opts.grid, tol)?;
    if !check.is_degenerate {
        return Err(Error::NotAQuadric(format!(
            "boundary conics share no point and the patch is not on a cone or cylinder (residual {:e})",
            check.max_residual
        )));
    }
    let frame = frame_degenerate(patch, tol)?;
    finish(Route::Degenerate, None, frame, LambdaEstimate { value: 0.0, raw: 0.0 }, samples, tol)
}

/// Analyzes a biquadratic net through its triangular reduction; residuals are
/// checked on the tensor patch itself.
///
/// The reduction is anchored at corner `c00`. When that fails, the other
/// three corners are tried in turn, since a poorly conditioned corner
/// triangle can lose the equation away from its own region.
pub fn analyze_tp(patch: &TpPatch, opts: &Options) -> Result<Analysis> {
    let samples = tp_samples(patch, opts.grid);
    let mut net = patch.clone();
    let mut first_error = None;
    for turns in 0..4 {
        match reduce_tp(&net, samples.clone(), &opts.tol) {
            Ok(mut analysis) => {
                if turns > 0 {
                    analysis.frame.warnings.push(format!(
                        "triangular reduction anchored at a rotated net ({turns} quarter turns): {}",
                        first_error.as_ref().map(Error::to_string).unwrap_or_default()
                    ));
                }
                return Ok(analysis);
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
        net = net.rotated();
    }
    Err(first_error.expect("at least one attempt"))
}

fn reduce_tp(net: &TpPatch, samples: Vec<HPoint>, tol: &Tolerances) -> Result<Analysis> {
    let canon = tp_to_tri(net, tol)?;
    let frame = build_frame(&canon, tol)?;
    let lambda = estimate_lambda(&frame, tol)?;
    finish(Route::TensorReduction, Some(canon), frame, lambda, samples, tol)
}

pub fn analyze(patch: &Patch, opts: &Options) -> Result<Analysis> {
    match patch {
        Patch::Triangular(t) => analyze_tri(t, opts),
        Patch::Tensor(t) => analyze_tp(t, opts),
    }
}
