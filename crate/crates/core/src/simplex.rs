//! Per-simplex constructions: signed volume, centroid, circumcenter, medial
//! simplex and the Möbius center.
//!
//! The Möbius center of a simplex is the circumcenter of its medial simplex,
//! the simplex spanned by the centroids of its facets. For a triangle this is
//! the nine-point center.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// A simplex is degenerate when `|signed volume| <= DEGENERACY_FACTOR * diameter^n`.
pub const DEGENERACY_FACTOR: f64 = 1e-12;

/// An ordered `(n + 1)`-tuple of points in `R^n`. Vertex order is the orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    vertices: Vec<Vector>,
}

/// Circumscribed sphere of a simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Circumsphere {
    pub center: Vector,
    pub radius: f64,
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

impl Simplex {
    pub fn new(vertices: Vec<Vector>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Malformed(format!(
                "a simplex in R^n (n >= 2) needs n + 1 >= 3 vertices, got {}",
                vertices.len()
            )));
        }
        let n = vertices.len() - 1;
        for v in &vertices {
            v.check_dim(n)?;
            if !v.is_finite() {
                return Err(Error::NonFiniteInput("simplex vertex"));
            }
        }
        Ok(Simplex { vertices })
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vector> {
        self.vertices
    }

    /// Edge vectors `v_i - v_0`, `i = 1..=n`.
    pub fn edges(&self) -> Vec<Vector> {
        let v0 = &self.vertices[0];
        self.vertices[1..].iter().map(|v| v - v0).collect()
    }

    /// Matrix whose rows are the edge vectors from `v_0`.
    pub fn edge_matrix(&self) -> Matrix {
        Matrix::from_row_vectors(&self.edges()).expect("edges are square and finite")
    }

    /// `det(v_1 - v_0, ..., v_n - v_0) / n!`
    pub fn signed_volume(&self) -> f64 {
        self.edge_matrix().determinant() / factorial(self.dim())
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.distance(b));
            }
        }
        d
    }

    pub fn degeneracy_threshold(&self) -> f64 {
        DEGENERACY_FACTOR * self.diameter().powi(self.dim() as i32)
    }

    pub fn is_degenerate(&self) -> bool {
        self.signed_volume().abs() <= self.degeneracy_threshold()
    }

    pub fn centroid(&self) -> Vector {
        Vector::mean(&self.vertices)
    }

    /// Solves `<p, v_i - v_0> = (|v_i|^2 - |v_0|^2) / 2` for the circumcenter `p`.
    ///
    /// The system is assembled relative to `v_0`, which leaves the solution
    /// unchanged and keeps the right-hand side small for translated input.
    pub fn circumsphere(&self) -> Result<Circumsphere> {
        let volume = self.signed_volume();
        let threshold = self.degeneracy_threshold();
        if volume.abs() <= threshold {
            return Err(Error::DegenerateSimplex { volume, threshold });
        }
        let edges = self.edges();
        let rhs = Vector::new(edges.iter().map(|e| 0.5 * e.norm_squared()).collect());
        let m = Matrix::from_row_vectors(&edges)?;
        let offset = m
            .solve(&rhs)
            .map_err(|_| Error::DegenerateSimplex { volume, threshold })?;
        let center = &self.vertices[0] + &offset;
        Ok(Circumsphere {
            radius: offset.norm(),
            center,
        })
    }

    pub fn circumcenter(&self) -> Result<Vector> {
        Ok(self.circumsphere()?.center)
    }

    /// The simplex whose `i`-th vertex is the centroid of the facet opposite `v_i`.
    ///
    /// Vertex indices correspond, so the medial simplex is the image of this
    /// one under the homothety of ratio `-1/n` about the centroid.
    pub fn medial(&self) -> Simplex {
        let n = self.dim() as f64;
        let total = self
            .vertices
            .iter()
            .fold(Vector::zeros(self.dim()), |acc, v| &acc + v);
        let vertices = self
            .vertices
            .iter()
            .map(|v| (&total - v).scale(1.0 / n))
            .collect();
        Simplex { vertices }
    }

    /// Circumcenter of the medial simplex.
    pub fn mobius_center(&self) -> Result<Vector> {
        let m = self.medial().circumcenter()?;
        debug_assert!(self.circumcenter().is_ok_and(|cc| {
            let n = self.dim() as f64;
            let euler = &self.centroid().scale((n + 1.0) / n) - &cc.scale(1.0 / n);
            (&euler - &m).max_abs() <= 1e-6 * (1.0 + self.diameter() + cc.norm())
        }));
        Ok(m)
    }

    /// Applies `f` to every vertex.
    pub fn map_vertices(&self, f: impl Fn(&Vector) -> Vector) -> Simplex {
        Simplex {
            vertices: self.vertices.iter().map(f).collect(),
        }
    }
}
