use serde::{Deserialize, Serialize};

/// Numerical thresholds used throughout the pipeline.
///
/// All values are relative unless stated otherwise. They can be overridden
/// from a TOML document whose keys match the field names.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// A homogeneous point is improper when `|w| <= tol_infinity * max|x,y,z,w|`.
    pub tol_infinity: f64,
    /// Singular-value ratio below which a set of points or planes is dependent.
    pub tol_rank: f64,
    /// Relative residual for polynomial roots and root-based tests.
    pub tol_root: f64,
    /// Relative radius under which two cubic roots are one multiple root.
    pub tol_cluster: f64,
    /// Relative test for the common point lying on the boundary conics and for
    /// the compatibility of the reparametrization ratios.
    pub tol_compat: f64,
    /// `lambda` is zero when its numerator is below this fraction of its term sizes.
    pub tol_lambda: f64,
    /// Relative test for the center weight and `det Z` vanishing.
    pub tol_center: f64,
    /// Band for the cubic discriminant, relative to the fourth power of the
    /// coefficient norm after root-scale normalization.
    pub tol_discriminant: f64,
    /// Residual of the implicit equation on sampled surface points.
    pub tol_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_infinity: 1e-9,
            tol_rank: 1e-9,
            tol_root: 1e-10,
            tol_cluster: 1e-6,
            tol_compat: 1e-8,
            tol_lambda: 1e-9,
            tol_center: 1e-7,
            tol_discriminant: 1e-8,
            tol_residual: 1e-8,
        }
    }
}

impl Tolerances {
    /// Parses a TOML document; missing keys keep their defaults.
    pub fn from_toml(text: &str) -> crate::Result<Self> {
        toml::from_str(text).map_err(|e| crate::Error::Parse(e.to_string()))
    }
}
