//! Built-in polytopes: fixtures with known centers and seeded random families.

use rand::Rng;

use super::{Facet, SimplicialPolytope};
use crate::linalg::Vector;
use crate::simplex::Simplex;

/// Boundary of a single oriented simplex, `sum_k (-1)^k face_k`, stored with
/// unit weights by swapping the first two indices of the odd faces.
pub fn simplex_boundary(s: &Simplex) -> SimplicialPolytope {
    let n = s.dim();
    let facets = (0..=n)
        .map(|skip| {
            let mut face: Vec<usize> = (0..=n).filter(|&i| i != skip).collect();
            if skip % 2 == 1 {
                face.swap(0, 1);
            }
            Facet::unit(face)
        })
        .collect();
    SimplicialPolytope::new(n, s.vertices().to_vec(), facets).expect("simplex boundary is well-formed")
}

/// Counter-clockwise boundary of `[0, 1]^2`.
pub fn unit_square() -> SimplicialPolytope {
    polygon(vec![
        Vector::from([0.0, 0.0]),
        Vector::from([1.0, 0.0]),
        Vector::from([1.0, 1.0]),
        Vector::from([0.0, 1.0]),
    ])
}

/// Closed polygon through `points` in order, one unit-weight edge per side.
pub fn polygon(points: Vec<Vector>) -> SimplicialPolytope {
    let k = points.len();
    let facets = (0..k).map(|i| Facet::unit(vec![i, (i + 1) % k])).collect();
    SimplicialPolytope::new(2, points, facets).expect("polygon is well-formed")
}

/// Boundary of `[0, 1]^3` as 12 outward triangles. Vertex `i` has coordinates
/// given by the bits of `i`.
pub fn unit_cube() -> SimplicialPolytope {
    let vertices: Vec<Vector> = (0..8)
        .map(|i| Vector::from([(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]))
        .collect();
    // Each face as a cycle of corners; orientation is fixed below.
    let quads = [
        [0, 1, 3, 2],
        [4, 5, 7, 6],
        [0, 1, 5, 4],
        [2, 3, 7, 6],
        [0, 2, 6, 4],
        [1, 3, 7, 5],
    ];
    let center = Vector::from([0.5, 0.5, 0.5]);
    let mut facets = Vec::with_capacity(12);
    for q in quads {
        for tri in [[q[0], q[1], q[2]], [q[0], q[2], q[3]]] {
            let s = Simplex::new(vec![
                center.clone(),
                vertices[tri[0]].clone(),
                vertices[tri[1]].clone(),
                vertices[tri[2]].clone(),
            ])
            .expect("cube cone simplex");
            let tri = if s.signed_volume() > 0.0 {
                tri.to_vec()
            } else {
                vec![tri[1], tri[0], tri[2]]
            };
            facets.push(Facet::unit(tri));
        }
    }
    SimplicialPolytope::new(3, vertices, facets).expect("cube is well-formed")
}

/// Boundary of the cross-polytope `conv(+-e_i)` with `2^n` outward facets.
///
/// Vertex `2i` is `+e_i` and vertex `2i + 1` is `-e_i`.
pub fn cross_polytope(dim: usize) -> SimplicialPolytope {
    assert!(dim >= 2, "cross-polytope needs dim >= 2");
    let vertices: Vec<Vector> = (0..2 * dim)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            Vector::basis(dim, j / 2).scale(sign)
        })
        .collect();
    let facets = (0..1usize << dim)
        .map(|mask| {
            let mut indices: Vec<usize> = (0..dim).map(|i| 2 * i + ((mask >> i) & 1)).collect();
            // det(s_0 e_0, ..., s_{n-1} e_{n-1}) = prod s_i; an odd number of
            // minus signs needs one transposition to face outward.
            if mask.count_ones() % 2 == 1 {
                indices.swap(0, 1);
            }
            Facet::unit(indices)
        })
        .collect();
    SimplicialPolytope::new(dim, vertices, facets).expect("cross-polytope is well-formed")
}

/// Cross-polytope with radii in `[0.6, 1.4]`, coordinate noise of size
/// `noise`, and a translation in `[-1, 1]^n`.
///
/// The combinatorial sphere stays a cycle under any vertex motion, so moderate
/// noise yields valid non-convex test polytopes.
pub fn perturbed_cross_polytope<R: Rng + ?Sized>(dim: usize, noise: f64, rng: &mut R) -> SimplicialPolytope {
    let base = cross_polytope(dim);
    let shift = Vector::new((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect());
    let vertices = base
        .vertices()
        .iter()
        .map(|v| {
            let mut p = v.scale(rng.gen_range(0.6..1.4));
            for i in 0..dim {
                p[i] += noise * rng.gen_range(-1.0..1.0);
            }
            &p + &shift
        })
        .collect();
    base.with_vertices(vertices).expect("same pool size")
}

/// Convex polygon with `k >= 3` vertices on a random ellipse, counter-clockwise.
///
/// Angular gaps are drawn from `[0.5, 1.5]` before normalisation so no two
/// vertices crowd together.
pub fn random_convex_polygon<R: Rng + ?Sized>(k: usize, rng: &mut R) -> SimplicialPolytope {
    assert!(k >= 3, "a polygon needs at least 3 vertices");
    let gaps: Vec<f64> = (0..k).map(|_| rng.gen_range(0.5..1.5)).collect();
    let total: f64 = gaps.iter().sum();
    let start = rng.gen_range(0.0..std::f64::consts::TAU);
    let (ax, ay) = (rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5));
    let tilt = rng.gen_range(0.0..std::f64::consts::PI);
    let (cx, cy) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let (st, ct) = tilt.sin_cos();
    let mut angle = start;
    let points = gaps
        .iter()
        .map(|g| {
            let (s, c) = angle.sin_cos();
            let (x, y) = (ax * c, ay * s);
            angle += std::f64::consts::TAU * g / total;
            Vector::from([cx + ct * x - st * y, cy + st * x + ct * y])
        })
        .collect();
    polygon(points)
}
