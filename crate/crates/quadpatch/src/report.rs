//! Serializable summary of an [`Analysis`].

use serde::{Deserialize, Serialize};

use crate::classify::QuadricKind;
use crate::euclid::PrincipalFamily;
use crate::forms::{ConicWeight, MONOMIALS};
use crate::patch::PatchFile;
use crate::pipeline::{Analysis, Route};
use crate::projective::{Cubic, HPoint, LinForm, Root};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub input: PatchFile,
    pub route: Route,
    pub canonical: Option<CanonicalReport>,
    pub frame: FrameReport,
    pub classification: ClassReport,
    pub implicit: ImplicitReport,
    pub elements: ElementsReport,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalReport {
    /// Reweighted triangular net, row order `c002 c011 c020 c101 c110 c200`.
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// `(alpha, beta, gamma)`.
    pub rescale: [f64; 3],
    pub s: HPoint,
    pub s_proper: bool,
    pub omega_u: f64,
    pub omega_v: f64,
    pub omega_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FramePointReport {
    pub point: HPoint,
    pub proper: bool,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub u: FramePointReport,
    pub v: FramePointReport,
    pub w: FramePointReport,
    pub t: HPoint,
    pub t_proper: bool,
    /// Weights of `P`, `Q`, `R` on the conic in `t`.
    pub corner_weights: [f64; 3],
    pub p_form: LinForm,
    pub q_form: LinForm,
    pub r_form: LinForm,
    pub t_form: LinForm,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub kind: QuadricKind,
    pub lambda: f64,
    pub center: HPoint,
    pub center_proper: bool,
    pub omega_z: f64,
    pub det_z: f64,
    pub section: Option<ConicWeight>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicitReport {
    pub monomials: Vec<String>,
    pub coeffs: [f64; 10],
    pub matrix: [[f64; 4]; 4],
    pub tangential: [[f64; 4]; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineReport {
    pub point: HPoint,
    pub direction: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderReport {
    pub point: HPoint,
    pub direction: [f64; 3],
    pub best_effort: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementsReport {
    pub mu: Vec<Root>,
    pub cubic: Cubic,
    pub discriminant: f64,
    pub is_revolution: bool,
    pub is_sphere: bool,
    pub principal: Vec<PrincipalFamily>,
    pub axes: Vec<LineReport>,
    pub vertex: Option<HPoint>,
    pub apex: Option<HPoint>,
    pub cylinder_axis: Option<CylinderReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_residual: f64,
    pub samples: usize,
    pub warnings: Vec<String>,
}

fn arr(v: &nalgebra::Vector3<f64>) -> [f64; 3] {
    [v.x, v.y, v.z]
}

impl Report {
    pub fn new(analysis: &Analysis, input: &PatchFile) -> Self {
        let f = &analysis.frame;
        let fp = |p: &crate::frame::FramePoint| FramePointReport { point: p.point, proper: p.proper, omega: p.omega };
        let class = &analysis.class;
        let el = &analysis.elements;
        Report {
            schema_version: SCHEMA_VERSION,
            input: input.clone(),
            route: analysis.route,
            canonical: analysis.canonical.as_ref().map(|c| CanonicalReport {
                points: c.patch.points().iter().map(arr).collect(),
                weights: c.patch.weights().to_vec(),
                rescale: c.rescale,
                s: c.s,
                s_proper: c.s_proper,
                omega_u: c.omega_u,
                omega_v: c.omega_v,
                omega_w: c.omega_w,
            }),
            frame: FrameReport {
                u: fp(&f.u),
                v: fp(&f.v),
                w: fp(&f.w),
                t: f.t_point,
                t_proper: f.t_proper,
                corner_weights: f.corner_weights,
                p_form: f.p,
                q_form: f.q,
                r_form: f.r,
                t_form: f.t,
                lambda: analysis.lambda,
            },
            classification: ClassReport {
                kind: class.kind,
                lambda: class.lambda,
                center: class.center.point,
                center_proper: class.center.proper,
                omega_z: class.center.omega,
                det_z: class.infinity.det_z,
                section: class.section,
            },
            implicit: ImplicitReport {
                monomials: MONOMIALS.iter().map(|s| s.to_string()).collect(),
                coeffs: analysis.quadric.coeffs(),
                matrix: analysis.quadric.matrix().rows(),
                tangential: analysis.quadric.tangential().rows(),
            },
            elements: ElementsReport {
                mu: el.principal.roots.clone(),
                cubic: el.principal.cubic,
                discriminant: el.revolution.discriminant,
                is_revolution: el.revolution.is_revolution,
                is_sphere: el.revolution.is_sphere,
                principal: el.principal.families.clone(),
                axes: el.axes.iter().map(|a| LineReport { point: a.point, direction: arr(&a.direction) }).collect(),
                vertex: el.vertex,
                apex: el.apex,
                cylinder_axis: el.cylinder_axis.map(|c| CylinderReport {
                    point: c.point,
                    direction: arr(&c.direction),
                    best_effort: c.best_effort,
                }),
            },
            diagnostics: Diagnostics {
                max_residual: analysis.max_residual,
                samples: analysis.samples,
                warnings: analysis.warnings(),
            },
        }
    }

    /// Short prose summary for terminals.
    pub fn human(&self) -> String {
        let mut out = String::new();
        let c = &self.classification;
        out.push_str(&format!("type: {}\n", c.kind.label()));
        out.push_str(&format!("lambda: {}\n", fmt(c.lambda)));
        out.push_str(&format!("center: {}\n", point_text(&c.center)));
        out.push_str(&format!("implicit: {} = 0\n", equation(&self.implicit.coeffs)));
        let mus: Vec<String> = self
            .elements
            .mu
            .iter()
            .map(|r| if r.multiplicity > 1 { format!("{} (x{})", fmt(r.value), r.multiplicity) } else { fmt(r.value) })
            .collect();
        out.push_str(&format!("mu: {}\n", mus.join(", ")));
        for fam in &self.elements.principal {
            for pl in fam.planes.iter().filter(|p| p.proper) {
                let [a, b, cc, d] = pl.cartesian.coeffs();
                out.push_str(&format!(
                    "principal plane (mu {}): {}\n",
                    fmt(fam.mu),
                    equation(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, a, b, cc, d])
                ));
            }
        }
        if self.elements.is_sphere {
            out.push_str("sphere\n");
        } else if self.elements.is_revolution {
            out.push_str("surface of revolution\n");
        }
        if let Some(v) = &self.elements.vertex {
            out.push_str(&format!("vertex: {}\n", point_text(v)));
        }
        if let Some(a) = &self.elements.apex {
            out.push_str(&format!("apex: {}\n", point_text(a)));
        }
        if let Some(ax) = &self.elements.cylinder_axis {
            out.push_str(&format!(
                "axis: through {} along ({}, {}, {}){}\n",
                point_text(&ax.point),
                fmt(ax.direction[0]),
                fmt(ax.direction[1]),
                fmt(ax.direction[2]),
                if ax.best_effort { " (line of vertices)" } else { "" }
            ));
        }
        out.push_str(&format!("max residual: {:e} over {} samples\n", self.diagnostics.max_residual, self.diagnostics.samples));
        for w in &self.diagnostics.warnings {
            out.push_str(&format!("note: {w}\n"));
        }
        out
    }
}

fn fmt(x: f64) -> String {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn point_text(p: &HPoint) -> String {
    let c = p.coords();
    if c[3] == 1.0 {
        format!("({}, {}, {})", fmt(c[0]), fmt(c[1]), fmt(c[2]))
    } else {
        format!("direction ({}, {}, {})", fmt(c[0]), fmt(c[1]), fmt(c[2]))
    }
}

fn equation(c: &[f64; 10]) -> String {
    let mut terms = Vec::new();
    for (k, m) in c.iter().zip(MONOMIALS) {
        if k.abs() < 1e-9 {
            continue;
        }
        let mag = fmt(k.abs());
        let body = match (m, mag.as_str()) {
            ("1", _) => mag.clone(),
            (_, "1") => m.to_string(),
            _ => format!("{mag} {m}"),
        };
        let sign = if *k < 0.0 { "-" } else { "+" };
        terms.push((sign, body));
    }
    let mut s = String::new();
    for (i, (sign, body)) in terms.iter().enumerate() {
        match (i, *sign) {
            (0, "-") => s.push_str(&format!("-{body}")),
            (0, _) => s.push_str(body),
            _ => s.push_str(&format!(" {sign} {body}")),
        }
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patch::Patch;
    use crate::testutil::{fixture, FIXTURES};
    use crate::{analyze, Options};

    fn report(name: &str) -> Report {
        let patch = fixture(name);
        let input = match &patch {
            Patch::Triangular(_) | Patch::Tensor(_) => patch.to_file(),
        };
        Report::new(&analyze(&patch, &Options::default()).unwrap(), &input)
    }

    #[test]
    fn json_round_trip_is_lossless() {
        for name in FIXTURES {
            let r = report(name);
            let text = serde_json::to_string(&r).unwrap();
            let back: Report = serde_json::from_str(&text).unwrap();
            assert_eq!(back, r, "{name}");
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = serde_json::to_string(&report("two_sheets")).unwrap();
        let b = serde_json::to_string(&report("two_sheets")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn human_summary_names_the_type() {
        let text = report("cone").human();
        assert!(text.starts_with("type: cone\n"), "{text}");
        assert!(text.contains("lambda: 0"));
    }

    #[test]
    fn schema_version_is_recorded() {
        let v: serde_json::Value = serde_json::to_value(report("sphere")).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["classification"]["kind"], "ellipsoid");
        assert_eq!(v["elements"]["is_sphere"], true);
    }
}
