//! Simplicial polytopes as integer-weighted chains of oriented facets.
//!
//! A polytope in `R^n` is a simplicial `(n - 1)`-cycle: facets are ordered
//! `n`-tuples of vertex indices carrying nonzero integer weights, and the
//! signed boundary of the chain vanishes. Coning every facet over an apex
//! turns the cycle into a weighted sum of `n`-simplices, and every center is
//! a volume-weighted average over that sum.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::simplex::{Simplex, DEGENERACY_FACTOR};

pub mod generators;

/// Seed of the fallback apex drawn when the vertex mean yields a degenerate cone.
const RETRY_APEX_SEED: u64 = 0x5eed_cafe_f00d;

/// An oriented facet with its multiplicity in the chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    pub indices: Vec<usize>,
    #[serde(default = "unit_weight")]
    pub weight: i64,
}

fn unit_weight() -> i64 {
    1
}

impl Facet {
    pub fn new(indices: Vec<usize>, weight: i64) -> Self {
        Facet { indices, weight }
    }

    pub fn unit(indices: Vec<usize>) -> Self {
        Facet { indices, weight: 1 }
    }
}

/// A face of the boundary whose signed multiplicity does not cancel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleViolation {
    /// Sorted vertex indices of the `(n - 2)`-face.
    pub face: Vec<usize>,
    /// Net multiplicity relative to the sorted orientation.
    pub multiplicity: i64,
}

impl std::fmt::Display for CycleViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "face {:?} has net multiplicity {}", self.face, self.multiplicity)
    }
}

/// Weighted chain of oriented `(n - 1)`-simplices in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeFile", into = "PolytopeFile")]
pub struct SimplicialPolytope {
    dim: usize,
    vertices: Vec<Vector>,
    facets: Vec<Facet>,
}

/// On-disk layout: `{"dim", "vertices", "facets": [{"indices", "weight"}]}`.
#[derive(Serialize, Deserialize)]
struct PolytopeFile {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Facet>,
}

impl TryFrom<PolytopeFile> for SimplicialPolytope {
    type Error = Error;
    fn try_from(f: PolytopeFile) -> Result<Self> {
        SimplicialPolytope::new(f.dim, f.vertices.into_iter().map(Vector::new).collect(), f.facets)
    }
}

impl From<SimplicialPolytope> for PolytopeFile {
    fn from(p: SimplicialPolytope) -> Self {
        PolytopeFile {
            dim: p.dim,
            vertices: p.vertices.into_iter().map(Vector::into_inner).collect(),
            facets: p.facets,
        }
    }
}

impl SimplicialPolytope {
    /// Checks structure only; call [`validate_cycle`](Self::validate_cycle) for the cycle condition.
    pub fn new(dim: usize, vertices: Vec<Vector>, facets: Vec<Facet>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Malformed(format!("dimension must be at least 2, got {dim}")));
        }
        for v in &vertices {
            v.check_dim(dim)?;
            if !v.is_finite() {
                return Err(Error::NonFiniteInput("polytope vertex"));
            }
        }
        for (k, facet) in facets.iter().enumerate() {
            if facet.indices.len() != dim {
                return Err(Error::Malformed(format!(
                    "facet {k} has {} indices, expected {dim}",
                    facet.indices.len()
                )));
            }
            if facet.weight == 0 {
                return Err(Error::Malformed(format!("facet {k} has zero weight")));
            }
            if let Some(&bad) = facet.indices.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::Malformed(format!(
                    "facet {k} references vertex {bad}, but only {} exist",
                    vertices.len()
                )));
            }
            let mut sorted = facet.indices.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Malformed(format!("facet {k} repeats a vertex")));
            }
        }
        Ok(SimplicialPolytope {
            dim,
            vertices,
            facets,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polytope serializes")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Same facet structure over a new vertex pool of equal size.
    pub fn with_vertices(&self, vertices: Vec<Vector>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::Malformed(format!(
                "vertex pool has {} points, expected {}",
                vertices.len(),
                self.vertices.len()
            )));
        }
        Self::new(self.dim, vertices, self.facets.clone())
    }

    /// Signed boundary faces that fail to cancel. Empty iff the chain is a cycle.
    pub fn validate_cycle(&self) -> Vec<CycleViolation> {
        let mut boundary: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
        for facet in &self.facets {
            for skip in 0..facet.indices.len() {
                let mut face: Vec<usize> = facet
                    .indices
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &i)| i)
                    .collect();
                let parity = sort_with_parity(&mut face);
                let sign = if skip % 2 == 0 { 1 } else { -1 } * parity;
                *boundary.entry(face).or_insert(0) += sign * facet.weight;
            }
        }
        boundary
            .into_iter()
            .filter(|&(_, m)| m != 0)
            .map(|(face, multiplicity)| CycleViolation { face, multiplicity })
            .collect()
    }

    /// Mean of the vertex pool (the origin for an empty pool).
    pub fn mean_vertex(&self) -> Vector {
        if self.vertices.is_empty() {
            return Vector::zeros(self.dim);
        }
        Vector::mean(&self.vertices)
    }

    /// Lower and upper corners of the vertex bounding box.
    pub fn bounding_box(&self) -> (Vector, Vector) {
        let mut lo = Vector::new(vec![f64::INFINITY; self.dim]);
        let mut hi = Vector::new(vec![f64::NEG_INFINITY; self.dim]);
        for v in &self.vertices {
            for i in 0..self.dim {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    /// Bounding-box diagonal; the length scale of every tolerance on polytopes.
    pub fn diameter(&self) -> f64 {
        if self.vertices.is_empty() {
            return 0.0;
        }
        let (lo, hi) = self.bounding_box();
        hi.distance(&lo)
    }

    pub fn volume_threshold(&self) -> f64 {
        DEGENERACY_FACTOR * self.diameter().powi(self.dim as i32)
    }

    fn facet_simplex(&self, apex: &Vector, facet: &Facet) -> Simplex {
        let mut vertices = Vec::with_capacity(self.dim + 1);
        vertices.push(apex.clone());
        vertices.extend(facet.indices.iter().map(|&i| self.vertices[i].clone()));
        Simplex::new(vertices).expect("facet simplices are well-formed")
    }

    /// Cones every facet over `apex` without checking for degenerate simplices.
    pub fn cone_simplices(&self, apex: &Vector) -> Result<Vec<(Simplex, i64)>> {
        apex.check_dim(self.dim)?;
        Ok(self
            .facets
            .iter()
            .map(|f| (self.facet_simplex(apex, f), f.weight))
            .collect())
    }

    /// Cone triangulation over `apex`; fails if any simplex is degenerate.
    pub fn cone_triangulation(&self, apex: &Vector) -> Result<Triangulation> {
        let simplices = self.cone_simplices(apex)?;
        let degenerate: Vec<usize> = simplices
            .iter()
            .enumerate()
            .filter(|(_, (s, _))| s.is_degenerate())
            .map(|(k, _)| k)
            .collect();
        if !degenerate.is_empty() {
            return Err(Error::DegenerateTriangulation {
                indices: degenerate,
            });
        }
        Ok(Triangulation {
            simplices,
            scale: self.diameter(),
        })
    }

    /// Cones over the vertex mean, retrying once from a seeded point in the bounding box.
    pub fn triangulate(&self) -> Result<Triangulation> {
        match self.cone_triangulation(&self.mean_vertex()) {
            Err(Error::DegenerateTriangulation { .. }) => {
                let mut rng = ChaCha8Rng::seed_from_u64(RETRY_APEX_SEED);
                self.cone_triangulation(&self.random_apex(&mut rng))
            }
            other => other,
        }
    }

    /// Uniform point in the bounding box.
    pub fn random_apex<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        let (lo, hi) = self.bounding_box();
        Vector::new(
            (0..self.dim)
                .map(|i| lo[i] + (hi[i] - lo[i]) * rng.gen::<f64>())
                .collect(),
        )
    }

    /// Algebraic volume, `sum weight * vol(apex, facet)`. Any apex gives the same value.
    pub fn volume_from(&self, apex: &Vector) -> Result<f64> {
        Ok(self
            .cone_simplices(apex)?
            .iter()
            .map(|(s, w)| *w as f64 * s.signed_volume())
            .sum())
    }

    pub fn volume(&self) -> f64 {
        self.volume_from(&self.mean_vertex())
            .expect("mean vertex has the polytope dimension")
    }

    pub fn center_of_mass(&self) -> Result<Vector> {
        self.triangulate()?.center_of_mass()
    }

    pub fn circumcenter_of_mass(&self) -> Result<Vector> {
        self.triangulate()?.circumcenter_of_mass()
    }

    pub fn mobius_center(&self) -> Result<Vector> {
        self.triangulate()?.mobius_center()
    }

    /// All three centers from the default triangulation.
    pub fn centers(&self) -> Result<CenterReport> {
        self.triangulate()?.centers()
    }

    /// All three centers from the cone over `apex`.
    pub fn centers_from(&self, apex: &Vector) -> Result<CenterReport> {
        self.cone_triangulation(apex)?.centers()
    }

    pub fn apply_similarity(&self, phi: &Similarity) -> Result<Self> {
        if phi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: phi.dim(),
            });
        }
        self.with_vertices(self.vertices.iter().map(|v| phi.apply(v)).collect())
    }

    /// Same chain with every weight negated; the volume changes sign.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for f in &mut out.facets {
            f.weight = -f.weight;
        }
        out
    }

    /// Chain with every weight multiplied by `k != 0`.
    pub fn scaled_weights(&self, k: i64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("weight multiplier must be nonzero".into()));
        }
        let mut out = self.clone();
        for f in &mut out.facets {
            f.weight *= k;
        }
        Ok(out)
    }

    /// Group sum: concatenates the vertex pools and facet lists.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        let offset = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices.iter().cloned());
        let mut facets = self.facets.clone();
        facets.extend(other.facets.iter().map(|f| Facet {
            indices: f.indices.iter().map(|i| i + offset).collect(),
            weight: f.weight,
        }));
        Self::new(self.dim, vertices, facets)
    }
}

/// Sorts in place and returns the sign of the sorting permutation.
fn sort_with_parity(v: &mut [usize]) -> i64 {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    sign
}

/// Weighted sum of nondegenerate `n`-simplices.
#[derive(Debug, Clone)]
pub struct Triangulation {
    simplices: Vec<(Simplex, i64)>,
    /// Diameter of the source polytope.
    scale: f64,
}

/// The three centers of one polytope and the cross-route check between them.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterReport {
    pub vol: f64,
    pub cm: Vector,
    pub ccm: Vector,
    pub m: Vector,
    /// Largest coordinate of `ccm - ((n + 1) cm - n m)`.
    pub residual_euler: f64,
}

impl Triangulation {
    pub fn simplices(&self) -> &[(Simplex, i64)] {
        &self.simplices
    }

    pub fn volume(&self) -> f64 {
        self.simplices
            .iter()
            .map(|(s, w)| *w as f64 * s.signed_volume())
            .sum()
    }

    fn dim(&self) -> usize {
        self.simplices.first().map_or(0, |(s, _)| s.dim())
    }

    /// `sum weight * vol(s) * point(s) / sum weight * vol(s)`
    fn weighted_average(&self, point: impl Fn(&Simplex) -> Result<Vector>) -> Result<Vector> {
        let n = self.dim();
        let volume = self.volume();
        let threshold = DEGENERACY_FACTOR * self.scale.powi(n as i32);
        if self.simplices.is_empty() || volume.abs() <= threshold {
            return Err(Error::ZeroVolume { volume, threshold });
        }
        let mut acc = Vector::zeros(n);
        for (s, w) in &self.simplices {
            acc.axpy(*w as f64 * s.signed_volume(), &point(s)?);
        }
        Ok(acc.scale(1.0 / volume))
    }

    pub fn center_of_mass(&self) -> Result<Vector> {
        self.weighted_average(|s| Ok(s.centroid()))
    }

    pub fn circumcenter_of_mass(&self) -> Result<Vector> {
        self.weighted_average(Simplex::circumcenter)
    }

    pub fn mobius_center(&self) -> Result<Vector> {
        self.weighted_average(Simplex::mobius_center)
    }

    pub fn centers(&self) -> Result<CenterReport> {
        let n = self.dim() as f64;
        let cm = self.center_of_mass()?;
        let ccm = self.circumcenter_of_mass()?;
        let m = self.mobius_center()?;
        let euler = &cm.scale(n + 1.0) - &m.scale(n);
        Ok(CenterReport {
            vol: self.volume(),
            residual_euler: (&ccm - &euler).max_abs(),
            cm,
            ccm,
            m,
        })
    }
}

/// `x -> scale * R x + translation` with `R` orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Similarity {
    rotation: Matrix,
    scale: f64,
    translation: Vector,
}

impl Similarity {
    pub const ORTHOGONALITY_TOL: f64 = 1e-10;

    pub fn new(rotation: Matrix, scale: f64, translation: Vector) -> Result<Self> {
        translation.check_dim(rotation.dim())?;
        if !(scale.is_finite() && scale != 0.0) {
            return Err(Error::InvalidSimilarity(format!("scale {scale} must be finite and nonzero")));
        }
        let gram = rotation.transpose().mul_mat(&rotation);
        let defect = gram.sub(&Matrix::identity(rotation.dim())).max_abs();
        if defect > Self::ORTHOGONALITY_TOL {
            return Err(Error::InvalidSimilarity(format!(
                "rotation is not orthogonal (|R^T R - I| = {defect:e})"
            )));
        }
        Ok(Similarity {
            rotation,
            scale,
            translation,
        })
    }

    pub fn identity(n: usize) -> Self {
        Similarity {
            rotation: Matrix::identity(n),
            scale: 1.0,
            translation: Vector::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.rotation.dim()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.rotation.mul_vec(x).scale(self.scale) + &self.translation
    }
}
