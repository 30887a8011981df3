//! Seeded property suite: every identity and invariant of the library checked
//! over random inputs, with a reproduction seed for each failing trial.
//!
//! Trials run in parallel but the report is ordered by property, dimension and
//! trial index, so identical configurations print identical reports.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::derivative::{dlogvol_analytic, dlogvol_fd, mobius_center_from_derivatives, DEFAULT_FD_STEPS};
use crate::error::{Error, Result};
use crate::fields::{invert_in_sphere, FieldKind, QuadraticField};
use crate::linalg::{Matrix, Vector};
use crate::polytope::generators::{cross_polytope, random_convex_polygon};
use crate::polytope::SimplicialPolytope;
use crate::sampling::{
    random_field, random_matrix, random_mobius_field, random_polytope, random_similarity, random_simplex,
    random_skew, rng_from_seed, trial_seed,
};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    /// Replaces every property tolerance when set.
    pub tol: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            trials: 200,
            dims: vec![2, 3, 4, 5],
            tol: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub dim: usize,
    pub trials: usize,
    pub tolerance: f64,
    /// Largest measured value over the trials that produced one.
    pub worst: f64,
    pub failures: Vec<TrialFailure>,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub outcomes: Vec<PropertyOutcome>,
}

/// Failures printed per property; the rest are counted.
const SHOWN_FAILURES: usize = 5;

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(PropertyOutcome::passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let status = if o.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{status} {:<28} dim={} trials={:<4} failed={:<4} worst={:.3e} tol={:.1e}",
                o.name,
                o.dim,
                o.trials,
                o.failures.len(),
                o.worst,
                o.tolerance
            );
            for f in o.failures.iter().take(SHOWN_FAILURES) {
                let _ = writeln!(out, "    trial {} seed {}: {}", f.trial, f.seed, f.detail);
            }
            if o.failures.len() > SHOWN_FAILURES {
                let _ = writeln!(out, "    ... {} more", o.failures.len() - SHOWN_FAILURES);
            }
        }
        let passed = self.outcomes.iter().filter(|o| o.passed()).count();
        let _ = writeln!(out, "summary: {passed}/{} property checks passed", self.outcomes.len());
        out
    }
}

/// Outcome of one trial: the measured value and whether it met the property.
struct Measure {
    value: f64,
    pass: bool,
}

impl Measure {
    fn at_most(value: f64, tol: f64) -> Measure {
        Measure {
            value,
            pass: value <= tol,
        }
    }
}

type Check = fn(usize, &mut ChaCha8Rng, f64) -> Result<Measure>;

struct Property {
    name: &'static str,
    tolerance: f64,
    check: Check,
    min_dim: usize,
    max_dim: usize,
    /// Upper bound on trials, for the expensive flow-based checks.
    max_trials: usize,
}

impl Property {
    const fn new(name: &'static str, tolerance: f64, check: Check) -> Self {
        Property {
            name,
            tolerance,
            check,
            min_dim: 2,
            max_dim: usize::MAX,
            max_trials: usize::MAX,
        }
    }

    const fn dims(mut self, min_dim: usize, max_dim: usize) -> Self {
        self.min_dim = min_dim;
        self.max_dim = max_dim;
        self
    }

    const fn max_trials(mut self, n: usize) -> Self {
        self.max_trials = n;
        self
    }
}

const PROPERTIES: &[Property] = &[
    Property::new("linalg", 1e-10, check_linalg),
    Property::new("simplex_identities", 1e-9, check_simplex_identities),
    Property::new("nine_point_center", 1e-9, check_nine_point).dims(2, 2),
    Property::new("cycle_validation", 0.5, check_cycle_validation),
    Property::new("triangulation_independence", 1e-8, check_triangulation_independence),
    Property::new("euler_relation", 1e-8, check_euler_relation),
    Property::new("additivity", 1e-8, check_additivity),
    Property::new("similarity_equivariance", 1e-8, check_similarity),
    Property::new("mobius_constraint", 0.5, check_mobius_constraint),
    Property::new("divergence_oracle", 1e-9, check_divergence_oracle),
    Property::new("sphere_inversion", 1e-11, check_inversion),
    Property::new("rk4_order", 1e-6, check_rk4_order).max_trials(20),
    Property::new("main_identity", 1e-8, check_main_identity),
    Property::new("projective_identity", 1e-8, check_projective_identity),
    Property::new("interpolating_identity", 1e-8, check_interpolating_identity),
    Property::new("isometry_kernel", 1e-10, check_isometry_kernel),
    Property::new("derivative_linearity", 1e-10, check_linearity),
    Property::new("derivative_recovery", 1e-8, check_derivative_recovery),
    Property::new("fd_convergence", 1e-6, check_fd_convergence).max_trials(20),
];

/// Runs the whole suite.
pub fn run(config: &RunConfig) -> Result<VerifyReport> {
    if config.trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    if let Some(&bad) = config.dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidArgument(format!("dimension {bad} is below 2")));
    }
    if config.dims.is_empty() {
        return Err(Error::InvalidArgument("no dimensions requested".into()));
    }
    let mut outcomes = Vec::new();
    for (stream, property) in PROPERTIES.iter().enumerate() {
        for &dim in &config.dims {
            if dim < property.min_dim || dim > property.max_dim {
                continue;
            }
            outcomes.push(run_property(config, stream as u64, property, dim));
        }
    }
    Ok(VerifyReport { outcomes })
}

fn run_property(config: &RunConfig, stream: u64, property: &Property, dim: usize) -> PropertyOutcome {
    let tolerance = config.tol.unwrap_or(property.tolerance);
    let trials = config.trials.min(property.max_trials);
    let stream = stream << 8 | dim as u64;
    let results: Vec<(usize, u64, Result<Measure>)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(config.seed, stream, trial as u64);
            let mut rng = rng_from_seed(seed);
            (trial, seed, (property.check)(dim, &mut rng, tolerance))
        })
        .collect();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (trial, seed, result) in results {
        match result {
            Ok(m) => {
                worst = worst.max(m.value);
                if !m.pass {
                    failures.push(TrialFailure {
                        trial,
                        seed,
                        detail: format!("value {:.3e} exceeds tolerance {:.1e}", m.value, tolerance),
                    });
                }
            }
            Err(e) => failures.push(TrialFailure {
                trial,
                seed,
                detail: format!("error: {e}"),
            }),
        }
    }
    PropertyOutcome {
        name: property.name,
        dim,
        trials,
        tolerance,
        worst,
        failures,
    }
}

fn uniform_vector(n: usize, r: f64, rng: &mut ChaCha8Rng) -> Vector {
    Vector::new((0..n).map(|_| rng.gen_range(-r..r)).collect())
}

fn check_linalg(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    // diagonally dominated, hence well conditioned
    let m = random_matrix(n, rng).add(&Matrix::scalar(n, n as f64));
    let rhs = uniform_vector(n, 1.0, rng);
    let x = m.solve(&rhs)?;
    let residual = (&m.mul_vec(&x) - &rhs).max_abs() / (1.0 + rhs.max_abs());

    let det = m.determinant();
    let mut swapped = m.clone();
    let (i, j) = (0, 1 + rng.gen_range(0..n - 1));
    let (ri, rj) = (m.row(i).to_vec(), m.row(j).to_vec());
    swapped.set_row(i, &rj);
    swapped.set_row(j, &ri);
    let sign = (swapped.determinant() + det).abs() / det.abs().max(1.0);
    Ok(Measure::at_most(residual.max(sign), tol))
}

fn check_simplex_identities(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    let s = random_simplex(n, rng);
    let scale = 1.0 + s.diameter();
    let nf = n as f64;
    let cc = s.circumsphere()?;
    let medial = s.medial();
    let m = medial.circumsphere()?;
    let spread = |center: &Vector, vertices: &[Vector]| {
        let d: Vec<f64> = vertices.iter().map(|v| v.distance(center)).collect();
        let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        hi - lo
    };
    let equidistance = spread(&cc.center, s.vertices()).max(spread(&m.center, medial.vertices()));
    let euler = &s.centroid().scale((nf + 1.0) / nf) - &cc.center.scale(1.0 / nf);
    let sum = s.vertices().iter().fold(Vector::zeros(n), |acc, v| &acc + v);
    let from_m = &sum - &m.center.scale(nf);
    let value = equidistance
        .max((&euler - &m.center).max_abs())
        .max((&from_m - &cc.center).max_abs())
        / scale;
    Ok(Measure::at_most(value, tol))
}

/// Orthocenter from two altitudes: `<h - a, b - c> = 0`, `<h - b, a - c> = 0`.
pub(crate) fn orthocenter(a: &Vector, b: &Vector, c: &Vector) -> Result<Vector> {
    let r1 = b - c;
    let r2 = a - c;
    let m = Matrix::from_row_vectors(&[r1.clone(), r2.clone()])?;
    m.solve(&Vector::from([r1.dot(a), r2.dot(b)]))
}

fn check_nine_point(_n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    let s = random_simplex(2, rng);
    let v = s.vertices();
    let h = orthocenter(&v[0], &v[1], &v[2])?;
    let mid = (&s.circumcenter()? + &h).scale(0.5);
    let m = crate::polytope::generators::simplex_boundary(&s).mobius_center()?;
    Ok(Measure::at_most((&m - &mid).max_abs() / (1.0 + s.diameter()), tol))
}

fn check_cycle_validation(n: usize, rng: &mut ChaCha8Rng, _tol: f64) -> Result<Measure> {
    let p = if n == 2 && rng.gen_bool(0.5) {
        random_convex_polygon(rng.gen_range(3..10), rng)
    } else {
        random_polytope(n, rng)
    };
    let clean = p.validate_cycle().is_empty();
    let mut facets = p.facets().to_vec();
    let k = rng.gen_range(0..facets.len());
    facets[k].indices.swap(0, 1);
    let corrupted = SimplicialPolytope::new(n, p.vertices().to_vec(), facets)?;
    let caught = !corrupted.validate_cycle().is_empty();
    let ok = clean && caught && cross_polytope(n).validate_cycle().is_empty();
    Ok(Measure {
        value: if ok { 0.0 } else { 1.0 },
        pass: ok,
    })
}

fn centers_gap(a: &crate::polytope::CenterReport, b: &crate::polytope::CenterReport) -> f64 {
    (&a.cm - &b.cm)
        .max_abs()
        .max((&a.ccm - &b.ccm).max_abs())
        .max((&a.m - &b.m).max_abs())
}

fn check_triangulation_independence(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    let p = random_polytope(n, rng);
    let mut reports = Vec::with_capacity(2);
    while reports.len() < 2 {
        match p.centers_from(&p.random_apex(rng)) {
            Ok(r) => reports.push(r),
            Err(Error::DegenerateTriangulation { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(Measure::at_most(centers_gap(&reports[0], &reports[1]) / (1.0 + p.diameter()), tol))
}

fn check_euler_relation(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    let p = random_polytope(n, rng);
    let r = p.centers()?;
    Ok(Measure::at_most(r.residual_euler / (1.0 + p.diameter()), tol))
}

fn check_additivity(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    let p = random_polytope(n, rng);
    let q = random_polytope(n, rng);
    let s = p.sum(&q)?;
    let (vp, vq, vs) = (p.volume(), q.volume(), s.volume());
    let vol_gap = (vs - vp - vq).abs() / (vp.abs() + vq.abs());
    let combined = (&p.mobius_center()?.scale(vp) + &q.mobius_center()?.scale(vq)).scale(1.0 / (vp + vq));
    let m_gap = (&s.mobius_center()? - &combined).max_abs() / (1.0 + s.diameter());
    Ok(Measure::at_most(vol_gap.max(m_gap), tol))
}

fn check_similarity(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    let p = random_polytope(n, rng);
    let phi = random_similarity(n, rng);
    let q = p.apply_similarity(&phi)?;
    let rp = p.centers()?;
    let rq = q.centers()?;
    let gap = (&rq.m - &phi.apply(&rp.m))
        .max_abs()
        .max((&rq.cm - &phi.apply(&rp.cm)).max_abs())
        .max((&rq.ccm - &phi.apply(&rp.ccm)).max_abs());
    Ok(Measure::at_most(gap / (1.0 + q.diameter()), tol))
}

fn check_mobius_constraint(n: usize, rng: &mut ChaCha8Rng, _tol: f64) -> Result<Measure> {
    let skew = random_skew(n, rng);
    let lambda = rng.gen_range(-1.0..1.0);
    let b = uniform_vector(n, 1.0, rng);
    let c = uniform_vector(n, 1.0, rng);
    let accepted = QuadraticField::mobius(skew.clone(), lambda, b.clone(), c.clone()).is_ok();
    let mut diag = Matrix::zeros(n);
    for i in 0..n {
        diag[(i, i)] = (i + 1) as f64;
    }
    let rejected = QuadraticField::new(FieldKind::Mobius, skew.add(&diag), b, c).is_err();
    let ok = accepted && rejected;
    Ok(Measure {
        value: if ok { 0.0 } else { 1.0 },
        pass: ok,
    })
}

fn check_divergence_oracle(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    let mut worst = 0.0f64;
    for kind in FieldKind::ALL {
        let f = random_field(kind, n, 0.0, rng);
        let x = uniform_vector(n, 2.0, rng);
        let gap = (f.divergence(&x)? - f.divergence_fd(&x, 1e-3)?).abs() / (1.0 + x.max_abs());
        worst = worst.max(gap);
    }
    Ok(Measure::at_most(worst, tol))
}

fn check_inversion(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    let center = uniform_vector(n, 1.0, rng);
    let radius = rng.gen_range(0.5..2.0);
    let x = loop {
        let x = uniform_vector(n, 2.0, rng);
        if x.distance(&center) >= 0.1 * radius {
            break x;
        }
    };
    let back = invert_in_sphere(&center, radius, &invert_in_sphere(&center, radius, &x)?)?;
    let mut on_sphere = uniform_vector(n, 1.0, rng);
    while on_sphere.norm() < 1e-3 {
        on_sphere = uniform_vector(n, 1.0, rng);
    }
    let on_sphere = &center + &on_sphere.scale(radius / on_sphere.norm());
    let fixed = invert_in_sphere(&center, radius, &on_sphere)?;
    let gap = (&back - &x).max_abs().max((&fixed - &on_sphere).max_abs()) / (1.0 + x.max_abs() + center.max_abs());
    Ok(Measure::at_most(gap, tol))
}

fn check_rk4_order(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    let p = random_polytope(n, rng);
    let lambda = rng.gen_range(0.5..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let f = QuadraticField::homothety(n, lambda);
    let exact = p.volume().abs().ln() + n as f64 * lambda;
    let err = |steps| -> Result<f64> {
        let traj = f.integrate_flow(&p, 1.0, steps)?;
        Ok((traj.logvol.last().expect("non-empty") - exact).abs())
    };
    let coarse = err(16)?;
    let fine = err(32)?;
    let order_ok = coarse <= 1e-13 || coarse / fine >= 8.0;
    Ok(Measure {
        value: fine,
        pass: order_ok && fine <= tol,
    })
}

fn identity_residual(kind: FieldKind, n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    let p = random_polytope(n, rng);
    let f = random_field(kind, n, p.diameter(), rng);
    let analytic = dlogvol_analytic(&f, &p)?;
    let centers = p.centers()?;
    let center = match kind {
        FieldKind::Mobius => centers.m,
        FieldKind::Projective => centers.cm,
        FieldKind::Interpolating => centers.ccm,
    };
    let residual = (analytic - f.divergence(&center)?).abs() / (1.0 + analytic.abs());
    Ok(Measure::at_most(residual, tol))
}

fn check_main_identity(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    identity_residual(FieldKind::Mobius, n, rng, tol)
}

fn check_projective_identity(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    identity_residual(FieldKind::Projective, n, rng, tol)
}

fn check_interpolating_identity(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    identity_residual(FieldKind::Interpolating, n, rng, tol)
}

fn check_isometry_kernel(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    let p = random_polytope(n, rng);
    let rotation = QuadraticField::mobius(random_skew(n, rng), 0.0, Vector::zeros(n), Vector::zeros(n))?;
    let translation = QuadraticField::translation(uniform_vector(n, 1.0, rng));
    let rigid = QuadraticField::mobius(random_skew(n, rng), 0.0, Vector::zeros(n), uniform_vector(n, 1.0, rng))?;
    let worst = [rotation, translation, rigid]
        .iter()
        .map(|f| dlogvol_analytic(f, &p).map(f64::abs))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Measure::at_most(worst, tol))
}

fn check_linearity(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    let p = random_polytope(n, rng);
    let f = random_mobius_field(n, p.diameter(), rng);
    let g = random_mobius_field(n, p.diameter(), rng);
    let (alpha, beta) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let combined = dlogvol_analytic(&f.combine(alpha, &g, beta)?, &p)?;
    let separate = alpha * dlogvol_analytic(&f, &p)? + beta * dlogvol_analytic(&g, &p)?;
    Ok(Measure::at_most((combined - separate).abs() / (1.0 + combined.abs()), tol))
}

fn check_derivative_recovery(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    let p = random_polytope(n, rng);
    let gap = (&mobius_center_from_derivatives(&p)? - &p.mobius_center()?).max_abs();
    Ok(Measure::at_most(gap / (1.0 + p.diameter()), tol))
}

/// Floor below which the central-difference error is rounding, not truncation.
const FD_FLOOR: f64 = 1e-11;

fn check_fd_convergence(n: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<Measure> {
    let p = random_polytope(n, rng);
    let f = random_mobius_field(n, p.diameter(), rng);
    let analytic = dlogvol_analytic(&f, &p)?;
    let coarse = (analytic - dlogvol_fd(&f, &p, 1e-3, DEFAULT_FD_STEPS)?).abs();
    let fine = (analytic - dlogvol_fd(&f, &p, 5e-4, DEFAULT_FD_STEPS)?).abs();
    let order_ok = coarse <= FD_FLOOR || coarse / fine >= 3.5;
    let relative = fine / (1.0 + analytic.abs());
    Ok(Measure {
        value: relative,
        pass: order_ok && relative <= tol,
    })
}
