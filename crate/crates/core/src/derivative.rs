//! The logarithmic derivative of volume along a field, and the center identities.
//!
//! For a Möbius field the derivative of `log vol(P)` equals the divergence of
//! the field at the Möbius center `m(P)`. Projective fields give the same
//! statement at the center of mass, interpolating fields at the circumcenter
//! of mass. This module computes the left-hand side two ways: exactly, by
//! differentiating the determinants of a cone triangulation, and by a central
//! difference along the RK4 flow.

use crate::error::{Error, Result};
use crate::fields::{FieldKind, QuadraticField};
use crate::linalg::{Matrix, Vector};
use crate::polytope::SimplicialPolytope;
use crate::simplex::{factorial, Simplex};

/// RK4 steps per half-interval in [`dlogvol_fd`] by default.
pub const DEFAULT_FD_STEPS: usize = 8;

/// `1e-4 / (1 + magnitude of the field parameters)`
pub fn default_fd_step(field: &QuadraticField) -> f64 {
    1e-4 / (1.0 + field.magnitude())
}

/// Both sides of the center identity for one field and polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeReport {
    pub kind: FieldKind,
    /// Exact `d/dt log |vol|` from determinant differentiation.
    pub analytic: f64,
    /// Central difference along the flow with the default step.
    pub fd: f64,
    pub div_at_m: f64,
    pub div_at_cm: f64,
    pub div_at_ccm: f64,
    /// `|analytic - div|` at the center matching the field kind.
    pub residual: f64,
}

impl DerivativeReport {
    /// Residual over `1 + |analytic|`.
    pub fn relative_residual(&self) -> f64 {
        self.residual / (1.0 + self.analytic.abs())
    }
}

/// `d/dt vol` of one simplex whose vertices move with velocities `xi(v_i)`.
///
/// Sums the determinants with the `i`-th edge replaced by its velocity.
fn simplex_volume_rate(field: &QuadraticField, s: &Simplex) -> Result<f64> {
    let v = s.vertices();
    let v0_rate = field.eval(&v[0])?;
    let edges = s.edges();
    let mut m = Matrix::from_row_vectors(&edges)?;
    let mut total = 0.0;
    for (i, vi) in v[1..].iter().enumerate() {
        let rate = &field.eval(vi)? - &v0_rate;
        m.set_row(i, rate.as_slice());
        total += m.determinant();
        m.set_row(i, edges[i].as_slice());
    }
    Ok(total / factorial(s.dim()))
}

fn check_dims(field: &QuadraticField, polytope: &SimplicialPolytope) -> Result<()> {
    if field.dim() != polytope.dim() {
        return Err(Error::DimensionMismatch {
            expected: polytope.dim(),
            actual: field.dim(),
        });
    }
    Ok(())
}

/// Exact `d/dt|_{t=0} log |vol(phi_t P)|` with `phi_t` acting on vertices.
pub fn dlogvol_analytic(field: &QuadraticField, polytope: &SimplicialPolytope) -> Result<f64> {
    check_dims(field, polytope)?;
    let triangulation = polytope.triangulate()?;
    let volume = triangulation.volume();
    let threshold = polytope.volume_threshold();
    if volume.abs() <= threshold {
        return Err(Error::ZeroVolume { volume, threshold });
    }
    let mut rate = 0.0;
    for (s, w) in triangulation.simplices() {
        rate += *w as f64 * simplex_volume_rate(field, s)?;
    }
    Ok(rate / volume)
}

/// Central difference `(log|vol(+h)| - log|vol(-h)|) / 2h`, flowing `steps`
/// RK4 steps in each direction. The backward half flows the reversed field.
pub fn dlogvol_fd(field: &QuadraticField, polytope: &SimplicialPolytope, h: f64, steps: usize) -> Result<f64> {
    check_dims(field, polytope)?;
    let fwd = field.integrate_flow(polytope, h, steps)?;
    let bwd = field.reversed().integrate_flow(polytope, h, steps)?;
    let up = *fwd.logvol.last().expect("non-empty trajectory");
    let down = *bwd.logvol.last().expect("non-empty trajectory");
    Ok((up - down) / (2.0 * h))
}

/// Evaluates both sides of the identity for the center matching the field kind.
pub fn verify_center_identity(field: &QuadraticField, polytope: &SimplicialPolytope) -> Result<DerivativeReport> {
    check_dims(field, polytope)?;
    let analytic = dlogvol_analytic(field, polytope)?;
    let centers = polytope.centers()?;
    let div_at_m = field.divergence(&centers.m)?;
    let div_at_cm = field.divergence(&centers.cm)?;
    let div_at_ccm = field.divergence(&centers.ccm)?;
    let expected = match field.kind() {
        FieldKind::Mobius => div_at_m,
        FieldKind::Projective => div_at_cm,
        FieldKind::Interpolating => div_at_ccm,
    };
    let fd = dlogvol_fd(field, polytope, default_fd_step(field), DEFAULT_FD_STEPS)?;
    Ok(DerivativeReport {
        kind: field.kind(),
        analytic,
        fd,
        div_at_m,
        div_at_cm,
        div_at_ccm,
        residual: (analytic - expected).abs(),
    })
}

/// Recovers `m(P)` from volume derivatives alone.
///
/// The field `|x|^2 e_k - 2 x_k x` has divergence `-2n x_k`, so the `k`-th
/// coordinate of the Möbius center is `-dlogvol / 2n`.
pub fn mobius_center_from_derivatives(polytope: &SimplicialPolytope) -> Result<Vector> {
    let n = polytope.dim();
    let coords = (0..n)
        .map(|k| {
            let field = QuadraticField::special_conformal(Vector::basis(n, k));
            Ok(-dlogvol_analytic(&field, polytope)? / (2.0 * n as f64))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Vector::new(coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::generators::{cross_polytope, simplex_boundary, unit_cube, unit_square};

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec())
    }

    #[test]
    fn homothety_gives_n_lambda() {
        for p in [unit_square(), unit_cube(), cross_polytope(4)] {
            let n = p.dim() as f64;
            let f = QuadraticField::homothety(p.dim(), 0.7);
            assert!((dlogvol_analytic(&f, &p).unwrap() - 0.7 * n).abs() < 1e-14);
            assert!((dlogvol_fd(&f, &p, 1e-4, 8).unwrap() - 0.7 * n).abs() < 1e-7);
        }
    }

    #[test]
    fn isometries_preserve_volume() {
        let p = unit_cube();
        let t = QuadraticField::translation(v(&[0.3, -1.0, 2.0]));
        assert!(dlogvol_analytic(&t, &p).unwrap().abs() < 1e-14);
        let skew = Matrix::from_rows(vec![
            vec![0.0, 0.4, -0.2],
            vec![-0.4, 0.0, 0.9],
            vec![0.2, -0.9, 0.0],
        ])
        .unwrap();
        let r = QuadraticField::mobius(skew, 0.0, Vector::zeros(3), Vector::zeros(3)).unwrap();
        assert!(dlogvol_analytic(&r, &p).unwrap().abs() < 1e-10);
        let zero = QuadraticField::zero(FieldKind::Mobius, 3);
        assert_eq!(dlogvol_analytic(&zero, &p).unwrap(), 0.0);
        assert_eq!(dlogvol_fd(&zero, &p, 1e-3, 4).unwrap(), 0.0);
    }

    #[test]
    fn square_identity() {
        let sq = unit_square();
        let skew = Matrix::from_rows(vec![vec![0.0, 0.3], vec![-0.3, 0.0]]).unwrap();
        let f = QuadraticField::mobius(skew, 0.2, v(&[0.5, -0.7]), v(&[1.0, 0.1])).unwrap();
        let r = verify_center_identity(&f, &sq).unwrap();
        let expected = f.divergence(&v(&[0.5, 0.5])).unwrap();
        assert!((r.analytic - expected).abs() < 1e-10);
        assert!(r.residual < 1e-10);
        assert!((r.fd - r.analytic).abs() < 1e-6);
    }

    #[test]
    fn derivative_recovery_examples() {
        let m = mobius_center_from_derivatives(&unit_square()).unwrap();
        assert!((m - v(&[0.5, 0.5])).max_abs() < 1e-14);
        let tri = simplex_boundary(&Simplex::new(vec![v(&[0., 0.]), v(&[1., 0.]), v(&[0., 1.])]).unwrap());
        let m = mobius_center_from_derivatives(&tri).unwrap();
        assert!((m - v(&[0.25, 0.25])).max_abs() < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let f = QuadraticField::homothety(3, 1.0);
        assert!(matches!(dlogvol_analytic(&f, &unit_square()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn zero_volume_chain_is_refused() {
        let sq = unit_square();
        let zero = sq.sum(&sq.negated()).unwrap();
        let f = QuadraticField::homothety(2, 1.0);
        assert!(matches!(dlogvol_analytic(&f, &zero), Err(Error::ZeroVolume { .. })));
    }
}
