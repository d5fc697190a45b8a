//! Fixture loading shared by the unit tests.

use crate::patch::{Patch, PatchFile, TpPatch, TriPatch};

pub(crate) fn fixture(name: &str) -> Patch {
    let text = match name {
        "ellipsoid" => include_str!("../fixtures/ellipsoid.toml"),
        "two_sheets" => include_str!("../fixtures/two_sheets.toml"),
        "hyperbolic_paraboloid" => include_str!("../fixtures/hyperbolic_paraboloid.toml"),
        "parabolic_cylinder" => include_str!("../fixtures/parabolic_cylinder.toml"),
        "cone" => include_str!("../fixtures/cone.toml"),
        "sphere" => include_str!("../fixtures/sphere.toml"),
        other => panic!("no fixture named {other}"),
    };
    PatchFile::parse(text).unwrap().to_patch().unwrap()
}

pub(crate) fn tri(name: &str) -> TriPatch {
    match fixture(name) {
        Patch::Triangular(t) => t,
        Patch::Tensor(_) => panic!("{name} is a tensor net"),
    }
}

pub(crate) fn tensor(name: &str) -> TpPatch {
    match fixture(name) {
        Patch::Tensor(t) => t,
        Patch::Triangular(_) => panic!("{name} is a triangular net"),
    }
}

pub(crate) fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

/// Frame of a fixture along the route the pipeline would take.
pub(crate) fn frame_of(name: &str) -> crate::frame::QuadricFrame {
    use crate::canonical::{find_common_point, rescale_weights, tp_to_tri, CommonPoint};
    use crate::frame::{build_frame, frame_degenerate};
    let tol = crate::Tolerances::default();
    match fixture(name) {
        Patch::Tensor(tp) => build_frame(&tp_to_tri(&tp, &tol).unwrap(), &tol).unwrap(),
        Patch::Triangular(t) => match find_common_point(&t, &tol).unwrap() {
            CommonPoint::Found(s) => build_frame(&rescale_weights(&t, &s, &tol).unwrap(), &tol).unwrap(),
            CommonPoint::Missing { .. } => frame_degenerate(&t, &tol).unwrap(),
        },
    }
}

/// Coefficients scaled so that the largest one is `1` and the first nonzero one is positive.
pub(crate) fn normalized10(c: [f64; 10]) -> [f64; 10] {
    let max = c.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let lead = c.iter().find(|x| x.abs() > 1e-9 * max).copied().unwrap();
    c.map(|x| x * lead.signum() / max)
}

pub(crate) const FIXTURES: [&str; 6] =
    ["ellipsoid", "two_sheets", "hyperbolic_paraboloid", "parabolic_cylinder", "cone", "sphere"];
