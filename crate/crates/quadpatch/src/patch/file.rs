//! Text representation of a control net.
//!
//! A patch document has three fields. `type` is `triangular` or `tensor`.
//! `points` lists `[x, y, z]` rows in net row order: `c002 c011 c020 c101
//! c110 c200` for triangles, and `c00 c01 c02 c10 .. c22` for tensor nets.
//! `weights` follows the same order. Documents may be TOML or JSON; JSON is
//! recognized by a leading `{`.

use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{TpPatch, TriPatch};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatchKind {
    Triangular,
    Tensor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchFile {
    #[serde(rename = "type")]
    pub kind: PatchKind,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

/// A validated control net of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Patch {
    Triangular(TriPatch),
    Tensor(TpPatch),
}

impl PatchFile {
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("patch documents always serialize")
    }

    pub fn to_patch(&self) -> Result<Patch> {
        let expected = match self.kind {
            PatchKind::Triangular => 6,
            PatchKind::Tensor => 9,
        };
        if self.points.len() != expected || self.weights.len() != expected {
            return Err(Error::InvalidPatch(format!(
                "{:?} net needs {expected} points and weights, got {} and {}",
                self.kind,
                self.points.len(),
                self.weights.len()
            )));
        }
        let pts: Vec<Vector3<f64>> = self.points.iter().map(|p| Vector3::from(*p)).collect();
        match self.kind {
            PatchKind::Triangular => {
                let points: [Vector3<f64>; 6] = pts.try_into().expect("length checked");
                let weights: [f64; 6] = self.weights.clone().try_into().expect("length checked");
                TriPatch::new(points, weights).map(Patch::Triangular)
            }
            PatchKind::Tensor => {
                let points = [0, 1, 2].map(|i| [0, 1, 2].map(|j| pts[3 * i + j]));
                let weights = [0, 1, 2].map(|i| [0, 1, 2].map(|j| self.weights[3 * i + j]));
                TpPatch::new(points, weights).map(Patch::Tensor)
            }
        }
    }
}

impl Patch {
    pub fn to_file(&self) -> PatchFile {
        match self {
            Patch::Triangular(t) => PatchFile {
                kind: PatchKind::Triangular,
                points: t.points().iter().map(|p| [p.x, p.y, p.z]).collect(),
                weights: t.weights().to_vec(),
            },
            Patch::Tensor(t) => PatchFile {
                kind: PatchKind::Tensor,
                points: t.points().iter().flatten().map(|p| [p.x, p.y, p.z]).collect(),
                weights: t.weights().iter().flatten().copied().collect(),
            },
        }
    }
}
