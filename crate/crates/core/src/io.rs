//! JSON and CSV file formats.
//!
//! Complex numbers are `[re, im]`, matrices are row-major nested arrays and
//! points of G are `[s1_re, s1_im, s2_re, s2_im]`. Floats are printed in
//! shortest round-trip form.

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::geometry::GPoint;
use crate::modelbuild::GModel;
use crate::numerics::{CMatrix, HermitianMatrix, C64};
use crate::pick::{PickCertificate, PickProblem};
use crate::realize::Colligation;
use crate::spectral::CommutingPair;

pub type Point = [f64; 4];
pub type Matrix = Vec<Vec<C64>>;

pub fn point_to_wire(s: &GPoint) -> Point {
    [s.s1.re, s.s1.im, s.s2.re, s.s2.im]
}

pub fn point_from_wire(p: &Point) -> GPoint {
    GPoint::new(C64::new(p[0], p[1]), C64::new(p[2], p[3]))
}

pub fn matrix_to_wire(m: &CMatrix) -> Matrix {
    m.to_rows()
}

pub fn matrix_from_wire(m: &Matrix) -> Result<CMatrix, String> {
    if m.is_empty() {
        return Ok(CMatrix::zeros(0, 0));
    }
    CMatrix::from_rows(m).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub nodes: Vec<Point>,
    pub targets: Vec<C64>,
}

impl ProblemFile {
    pub fn from_problem(p: &PickProblem) -> Self {
        Self { nodes: p.nodes.iter().map(point_to_wire).collect(), targets: p.targets.clone() }
    }

    /// Unvalidated problem; validation happens in the pipeline.
    pub fn to_problem(&self) -> PickProblem {
        PickProblem { nodes: self.nodes.iter().map(point_from_wire).collect(), targets: self.targets.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub a1: Matrix,
    pub a2: Matrix,
    pub residual: f64,
    pub min_eig: f64,
}

impl CertificateFile {
    pub fn from_certificate(c: &PickCertificate) -> Self {
        Self {
            a1: matrix_to_wire(c.a1.as_matrix()),
            a2: matrix_to_wire(c.a2.as_matrix()),
            residual: c.residual,
            min_eig: c.min_eig,
        }
    }

    pub fn to_certificate(&self) -> Result<PickCertificate, String> {
        let h = |m: &Matrix| -> Result<HermitianMatrix, String> {
            HermitianMatrix::try_from_matrix(&matrix_from_wire(m)?, 1e-12).map_err(|e| e.to_string())
        };
        Ok(PickCertificate { a1: h(&self.a1)?, a2: h(&self.a2)?, residual: self.residual, min_eig: self.min_eig })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColligationFile {
    /// State-space dimension.
    pub dim: usize,
    #[serde(rename = "A")]
    pub a: C64,
    pub beta: Vec<C64>,
    pub gamma: Vec<C64>,
    #[serde(rename = "D")]
    pub d: Matrix,
    #[serde(rename = "T")]
    pub t: Matrix,
}

impl ColligationFile {
    pub fn from_colligation(c: &Colligation) -> Self {
        Self {
            dim: c.dim(),
            a: c.a,
            beta: c.beta.clone(),
            gamma: c.gamma.clone(),
            d: matrix_to_wire(&c.d),
            t: matrix_to_wire(&c.t),
        }
    }

    pub fn to_colligation(&self) -> Result<Colligation, String> {
        let n = self.beta.len();
        if self.gamma.len() != n || self.dim != n {
            return Err(format!("dim = {} but beta and gamma have lengths {} and {}", self.dim, n, self.gamma.len()));
        }
        let d = if n == 0 { CMatrix::zeros(0, 0) } else { matrix_from_wire(&self.d)? };
        let t = if n == 0 { CMatrix::zeros(0, 0) } else { matrix_from_wire(&self.t)? };
        Ok(Colligation { a: self.a, beta: self.beta.clone(), gamma: self.gamma.clone(), d, t })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GModelFile {
    pub dim: usize,
    #[serde(rename = "T")]
    pub t: Matrix,
    pub nodes: Vec<Point>,
    pub vectors: Vec<Vec<C64>>,
    pub residual: f64,
}

impl GModelFile {
    pub fn from_gmodel(g: &GModel) -> Self {
        Self {
            dim: g.dim,
            t: matrix_to_wire(&g.t),
            nodes: g.nodes.iter().map(point_to_wire).collect(),
            vectors: g.v.clone(),
            residual: g.residual,
        }
    }

    pub fn to_gmodel(&self) -> Result<GModel, String> {
        Ok(GModel {
            dim: self.dim,
            t: matrix_from_wire(&self.t)?,
            nodes: self.nodes.iter().map(point_from_wire).collect(),
            v: self.vectors.clone(),
            residual: self.residual,
        })
    }
}

/// Outcome of `solve`. Fields that do not apply to the outcome are omitted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: String,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_eig: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram_mismatch: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isometry_defect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitarity_defect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_mismatch: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gmodel_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lsharp_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundedness_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

/// Evaluation points: either `{"nodes": [...]}` (e.g. a problem file) or a bare list.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PointsFile {
    Object { nodes: Vec<Point> },
    List(Vec<Point>),
}

impl PointsFile {
    pub fn points(&self) -> Vec<GPoint> {
        match self {
            PointsFile::Object { nodes } | PointsFile::List(nodes) => nodes.iter().map(point_from_wire).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFile {
    #[serde(rename = "S1")]
    pub s1: Matrix,
    #[serde(rename = "S2")]
    pub s2: Matrix,
}

impl PairFile {
    pub fn to_pair(&self) -> Result<CommutingPair, String> {
        CommutingPair::new(matrix_from_wire(&self.s1)?, matrix_from_wire(&self.s2)?).map_err(|e| e.to_string())
    }
}

pub const VALUES_HEADER: &str = "s1_re,s1_im,s2_re,s2_im,phi_re,phi_im,abs_phi";

/// One CSV row; `None` marks a point that could not be evaluated.
pub fn values_row(s: &GPoint, phi: Option<C64>) -> String {
    let (re, im, abs) = match phi {
        Some(z) => (z.re, z.im, z.norm()),
        None => (f64::NAN, f64::NAN, f64::NAN),
    };
    format!("{},{},{},{},{},{},{}", s.s1.re, s.s1.im, s.s2.re, s.s2.im, re, im, abs)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("wire types serialize");
    s.push('\n');
    s
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, serde_json::Error> {
    serde_json::from_str(text)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
