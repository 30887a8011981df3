//! Quadratic vector fields acting on polytopes through their vertices.
//!
//! Three families share the parameters `(A, b, c)`:
//!
//! | kind          | velocity                                  | divergence              |
//! |---------------|-------------------------------------------|-------------------------|
//! | Möbius        | `A x + |x|^2 b - 2 <b, x> x + c`          | `tr A - 2n <b, x>`      |
//! | projective    | `A x + <b, x> x + c`                      | `tr A + (n + 1) <b, x>` |
//! | interpolating | `A x + |x|^2 b + c`                       | `tr A + 2 <b, x>`       |
//!
//! Möbius fields additionally require `A - lambda I` to be skew-symmetric.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::polytope::SimplicialPolytope;

/// Entrywise tolerance on the symmetric part of `A - (tr A / n) I` for Möbius fields.
pub const MOBIUS_SKEW_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Mobius,
    Projective,
    Interpolating,
}

impl FieldKind {
    pub const ALL: [FieldKind; 3] = [FieldKind::Mobius, FieldKind::Projective, FieldKind::Interpolating];

    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Mobius => "mobius",
            FieldKind::Projective => "projective",
            FieldKind::Interpolating => "interpolating",
        }
    }
}

/// A quadratic vector field on `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldFile", into = "FieldFile")]
pub struct QuadraticField {
    kind: FieldKind,
    a: Matrix,
    b: Vector,
    c: Vector,
}

#[derive(Serialize, Deserialize)]
struct FieldFile {
    kind: FieldKind,
    #[serde(rename = "A")]
    a: Matrix,
    b: Vector,
    c: Vector,
}

impl TryFrom<FieldFile> for QuadraticField {
    type Error = Error;
    fn try_from(f: FieldFile) -> Result<Self> {
        QuadraticField::new(f.kind, f.a, f.b, f.c)
    }
}

impl From<QuadraticField> for FieldFile {
    fn from(f: QuadraticField) -> Self {
        FieldFile {
            kind: f.kind,
            a: f.a,
            b: f.b,
            c: f.c,
        }
    }
}

impl QuadraticField {
    pub fn new(kind: FieldKind, a: Matrix, b: Vector, c: Vector) -> Result<Self> {
        let n = a.dim();
        if n < 1 {
            return Err(Error::Malformed("field matrix is empty".into()));
        }
        b.check_dim(n)?;
        c.check_dim(n)?;
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::NonFiniteInput("field parameters"));
        }
        if kind == FieldKind::Mobius {
            let asymmetry = a.shifted_asymmetry();
            if asymmetry > MOBIUS_SKEW_TOL {
                return Err(Error::InvalidMobiusField { asymmetry });
            }
        }
        Ok(QuadraticField { kind, a, b, c })
    }

    /// Möbius field `(skew + lambda I) x + |x|^2 b - 2 <b, x> x + c`.
    pub fn mobius(skew: Matrix, lambda: f64, b: Vector, c: Vector) -> Result<Self> {
        let n = skew.dim();
        Self::new(FieldKind::Mobius, skew.add(&Matrix::scalar(n, lambda)), b, c)
    }

    pub fn zero(kind: FieldKind, n: usize) -> Self {
        QuadraticField {
            kind,
            a: Matrix::zeros(n),
            b: Vector::zeros(n),
            c: Vector::zeros(n),
        }
    }

    /// `x' = lambda x`
    pub fn homothety(n: usize, lambda: f64) -> Self {
        QuadraticField {
            a: Matrix::scalar(n, lambda),
            ..Self::zero(FieldKind::Mobius, n)
        }
    }

    /// `x' = c`
    pub fn translation(c: Vector) -> Self {
        let n = c.dim();
        QuadraticField {
            c,
            ..Self::zero(FieldKind::Mobius, n)
        }
    }

    /// `x' = |x|^2 b - 2 <b, x> x`, the generator of conjugated translations.
    pub fn special_conformal(b: Vector) -> Self {
        let n = b.dim();
        QuadraticField {
            b,
            ..Self::zero(FieldKind::Mobius, n)
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn c(&self) -> &Vector {
        &self.c
    }

    /// Largest absolute parameter.
    pub fn magnitude(&self) -> f64 {
        self.a.max_abs().max(self.b.max_abs()).max(self.c.max_abs())
    }

    /// `alpha * self + beta * other`; both fields must share kind and dimension.
    pub fn combine(&self, alpha: f64, other: &QuadraticField, beta: f64) -> Result<Self> {
        if self.kind != other.kind {
            return Err(Error::InvalidArgument(format!(
                "cannot combine {} and {} fields",
                self.kind.name(),
                other.kind.name()
            )));
        }
        other.b.check_dim(self.dim())?;
        Self::new(
            self.kind,
            self.a.scale(alpha).add(&other.a.scale(beta)),
            &self.b.scale(alpha) + &other.b.scale(beta),
            &self.c.scale(alpha) + &other.c.scale(beta),
        )
    }

    /// The field with every parameter negated; its flow runs this one backwards.
    pub fn reversed(&self) -> Self {
        QuadraticField {
            kind: self.kind,
            a: self.a.scale(-1.0),
            b: self.b.scale(-1.0),
            c: self.c.scale(-1.0),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("field serializes")
    }

    /// Velocity at `x`.
    pub fn eval(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &Vector) -> Vector {
        let mut v = &self.a.mul_vec(x) + &self.c;
        let bx = self.b.dot(x);
        match self.kind {
            FieldKind::Mobius => {
                v.axpy(x.norm_squared(), &self.b);
                v.axpy(-2.0 * bx, x);
            }
            FieldKind::Projective => v.axpy(bx, x),
            FieldKind::Interpolating => v.axpy(x.norm_squared(), &self.b),
        }
        v
    }

    /// Closed-form divergence at `x`.
    pub fn divergence(&self, x: &Vector) -> Result<f64> {
        x.check_dim(self.dim())?;
        let n = self.dim() as f64;
        let bx = self.b.dot(x);
        let slope = match self.kind {
            FieldKind::Mobius => -2.0 * n,
            FieldKind::Projective => n + 1.0,
            FieldKind::Interpolating => 2.0,
        };
        Ok(self.a.trace() + slope * bx)
    }

    /// Central-difference divergence with step `h`. Exact up to rounding for
    /// quadratic fields.
    pub fn divergence_fd(&self, x: &Vector, h: f64) -> Result<f64> {
        x.check_dim(self.dim())?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("step {h} must be positive")));
        }
        let mut total = 0.0;
        for i in 0..self.dim() {
            let mut fwd = x.clone();
            let mut bwd = x.clone();
            fwd[i] += h;
            bwd[i] -= h;
            total += (self.eval_unchecked(&fwd)[i] - self.eval_unchecked(&bwd)[i]) / (2.0 * h);
        }
        Ok(total)
    }

    fn rk4_step(&self, x: &Vector, dt: f64) -> Vector {
        let k1 = self.eval_unchecked(x);
        let mut y = x.clone();
        y.axpy(0.5 * dt, &k1);
        let k2 = self.eval_unchecked(&y);
        let mut y = x.clone();
        y.axpy(0.5 * dt, &k2);
        let k3 = self.eval_unchecked(&y);
        let mut y = x.clone();
        y.axpy(dt, &k3);
        let k4 = self.eval_unchecked(&y);
        let mut out = x.clone();
        out.axpy(dt / 6.0, &k1);
        out.axpy(dt / 3.0, &k2);
        out.axpy(dt / 3.0, &k3);
        out.axpy(dt / 6.0, &k4);
        out
    }

    /// Flows every vertex of the pool with fixed-step RK4 over `[0, t_final]`.
    ///
    /// Fails when the volume drops to the degeneracy threshold or coordinates
    /// stop being finite; both report the time of the offending step.
    pub fn integrate_flow(
        &self,
        polytope: &SimplicialPolytope,
        t_final: f64,
        steps: usize,
    ) -> Result<FlowTrajectory> {
        if polytope.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: polytope.dim(),
            });
        }
        if steps == 0 {
            return Err(Error::InvalidArgument("flow needs at least one step".into()));
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!("flow time {t_final} must be positive")));
        }
        let dt = t_final / steps as f64;
        let mut state = polytope.vertices().to_vec();
        let mut trajectory = FlowTrajectory::default();
        let logvol0 = log_volume(polytope, &state, 0.0)?;
        trajectory.push(0.0, state.clone(), logvol0);
        for step in 1..=steps {
            let t = if step == steps { t_final } else { step as f64 * dt };
            state = state.iter().map(|x| self.rk4_step(x, dt)).collect();
            if !state.iter().all(Vector::is_finite) {
                return Err(Error::NonFinite { time: t });
            }
            let logvol = log_volume(polytope, &state, t)?;
            trajectory.push(t, state.clone(), logvol);
        }
        Ok(trajectory)
    }
}

fn log_volume(template: &SimplicialPolytope, vertices: &[Vector], time: f64) -> Result<f64> {
    let p = template.with_vertices(vertices.to_vec())?;
    let vol = p.volume();
    if !vol.is_finite() {
        return Err(Error::NonFinite { time });
    }
    if vol.abs() <= p.volume_threshold() {
        return Err(Error::VolumeCollapse { time });
    }
    Ok(vol.abs().ln())
}

/// Vertex-pool snapshots and `log |vol|` along a flow.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<Vec<Vector>>,
    pub logvol: Vec<f64>,
}

impl FlowTrajectory {
    fn push(&mut self, t: f64, snapshot: Vec<Vector>, logvol: f64) {
        debug_assert!(self.times.last().is_none_or(|&last| t > last));
        self.times.push(t);
        self.snapshots.push(snapshot);
        self.logvol.push(logvol);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The polytope at snapshot `i`, reusing the facet structure of `template`.
    pub fn polytope_at(&self, template: &SimplicialPolytope, i: usize) -> Result<SimplicialPolytope> {
        template.with_vertices(self.snapshots[i].clone())
    }

    pub fn final_polytope(&self, template: &SimplicialPolytope) -> Result<SimplicialPolytope> {
        self.polytope_at(template, self.len() - 1)
    }
}

/// Inversion in the sphere of the given center and radius.
pub fn invert_in_sphere(center: &Vector, radius: f64, x: &Vector) -> Result<Vector> {
    x.check_dim(center.dim())?;
    let d = x - center;
    let r2 = d.norm_squared();
    if d.norm() <= 1e-12 * radius.abs() || r2 == 0.0 {
        return Err(Error::PoleHit);
    }
    Ok(center + &d.scale(radius * radius / r2))
}
