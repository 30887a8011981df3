//! Command-line front end.
//!
//! Exit codes: 0 success, 1 property failure, 2 usage or parse error,
//! 3 invalid cycle, 4 zero volume, 5 flow failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::fields::QuadraticField;
use crate::linalg::Vector;
use crate::polytope::generators::{perturbed_cross_polytope, random_convex_polygon};
use crate::polytope::SimplicialPolytope;
use crate::sampling::rng_from_seed;
use crate::verify::{self, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID_CYCLE: i32 = 3;
pub const EXIT_ZERO_VOLUME: i32 = 4;
pub const EXIT_FLOW_FAILURE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "mobius-center", version, about = "Centers of simplicial polytopes and Möbius volume derivatives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print volume, center of mass, circumcenter of mass and Möbius center.
    Centers { file: PathBuf },
    /// Run the seeded property suite.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        dims: Vec<usize>,
        /// Override every property tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Flow a polytope along a field and write a CSV trajectory.
    Flow {
        poly: PathBuf,
        field: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        /// Final snapshot path (default: the CSV path with extension `final.json`).
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Write a random valid polytope.
    Random {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum)]
        kind: RandomKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Vertex count for polygons.
        #[arg(long, default_value_t = 6)]
        vertices: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RandomKind {
    Polygon,
    Crosspoly,
}

/// Fixed 12-significant-digit rendering; negative zero prints as zero.
pub fn fmt_real(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

fn fmt_point(p: &Vector) -> String {
    p.as_slice().iter().map(|&x| fmt_real(x)).collect::<Vec<_>>().join(" ")
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match cli.command {
        Command::Centers { file } => cmd_centers(&file, out, err),
        Command::Verify { seed, trials, dims, tol } => cmd_verify(
            &RunConfig {
                seed,
                trials,
                dims,
                tol,
            },
            out,
            err,
        ),
        Command::Flow {
            poly,
            field,
            t,
            steps,
            out: csv,
            snapshot,
        } => {
            let snapshot = snapshot.unwrap_or_else(|| csv.with_extension("final.json"));
            cmd_flow(&poly, &field, t, steps, &csv, &snapshot, out, err)
        }
        Command::Random {
            dim,
            kind,
            seed,
            vertices,
            out: path,
        } => cmd_random(dim, kind, seed, vertices, &path, out, err),
    }
}

fn read_polytope(path: &Path, err: &mut dyn Write) -> Result<SimplicialPolytope, i32> {
    let text = fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
        EXIT_USAGE
    })?;
    let polytope = SimplicialPolytope::from_json(&text).map_err(|e| {
        let _ = writeln!(err, "error: {}: {e}", path.display());
        EXIT_USAGE
    })?;
    let violations = polytope.validate_cycle();
    if !violations.is_empty() {
        let _ = writeln!(err, "error: {} is not a cycle:", path.display());
        for v in &violations {
            let _ = writeln!(err, "  {v}");
        }
        return Err(EXIT_INVALID_CYCLE);
    }
    Ok(polytope)
}

fn geometry_exit(e: &Error) -> i32 {
    match e {
        Error::ZeroVolume { .. } | Error::DegenerateTriangulation { .. } => EXIT_ZERO_VOLUME,
        Error::VolumeCollapse { .. } | Error::NonFinite { .. } => EXIT_FLOW_FAILURE,
        _ => EXIT_USAGE,
    }
}

fn cmd_centers(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let polytope = match read_polytope(path, err) {
        Ok(p) => p,
        Err(code) => return code,
    };
    match polytope.centers() {
        Ok(r) => {
            let _ = writeln!(out, "vol            {}", fmt_real(r.vol));
            let _ = writeln!(out, "cm             {}", fmt_point(&r.cm));
            let _ = writeln!(out, "ccm            {}", fmt_point(&r.ccm));
            let _ = writeln!(out, "m              {}", fmt_point(&r.m));
            let _ = writeln!(out, "residual_euler {}", fmt_real(r.residual_euler));
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            geometry_exit(&e)
        }
    }
}

fn cmd_verify(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let report = match verify::run(config) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let dims: Vec<String> = config.dims.iter().map(usize::to_string).collect();
    let _ = writeln!(
        out,
        "verify seed={} trials={} dims={}{}",
        config.seed,
        config.trials,
        dims.join(","),
        config.tol.map(|t| format!(" tol={t:e}")).unwrap_or_default()
    );
    let _ = write!(out, "{}", report.render());
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_PROPERTY_FAILURE
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_flow(
    poly: &Path,
    field: &Path,
    t: f64,
    steps: usize,
    csv: &Path,
    snapshot: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let polytope = match read_polytope(poly, err) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let field = match fs::read_to_string(field)
        .map_err(|e| e.to_string())
        .and_then(|text| QuadraticField::from_json(&text).map_err(|e| e.to_string()))
    {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", field.display());
            return EXIT_USAGE;
        }
    };
    let trajectory = match field.integrate_flow(&polytope, t, steps) {
        Ok(tr) => tr,
        Err(e @ (Error::VolumeCollapse { .. } | Error::NonFinite { .. })) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_FLOW_FAILURE;
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut text = String::from("time,logvol,div_at_m\n");
    for i in 0..trajectory.len() {
        let div = trajectory
            .polytope_at(&polytope, i)
            .and_then(|p| p.mobius_center())
            .and_then(|m| field.divergence(&m));
        let div = match div {
            Ok(d) => d,
            Err(e) => {
                let _ = writeln!(err, "error: at t = {}: {e}", trajectory.times[i]);
                return EXIT_FLOW_FAILURE;
            }
        };
        text.push_str(&format!(
            "{},{},{}\n",
            fmt_real(trajectory.times[i]),
            fmt_real(trajectory.logvol[i]),
            fmt_real(div)
        ));
    }
    let last = trajectory.final_polytope(&polytope).expect("same pool size");
    if let Err(e) = fs::write(csv, text).and_then(|_| fs::write(snapshot, last.to_json())) {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    let _ = writeln!(
        out,
        "wrote {} rows to {} and final snapshot to {}",
        trajectory.len(),
        csv.display(),
        snapshot.display()
    );
    EXIT_OK
}

fn cmd_random(
    dim: usize,
    kind: RandomKind,
    seed: u64,
    vertices: usize,
    path: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let mut rng = rng_from_seed(seed);
    let polytope = match kind {
        RandomKind::Polygon if dim != 2 => {
            let _ = writeln!(err, "error: polygons live in dimension 2, got --dim {dim}");
            return EXIT_USAGE;
        }
        RandomKind::Polygon if vertices < 3 => {
            let _ = writeln!(err, "error: a polygon needs at least 3 vertices");
            return EXIT_USAGE;
        }
        RandomKind::Polygon => random_convex_polygon(vertices, &mut rng),
        RandomKind::Crosspoly if dim < 2 => {
            let _ = writeln!(err, "error: cross-polytopes need --dim >= 2, got {dim}");
            return EXIT_USAGE;
        }
        RandomKind::Crosspoly => perturbed_cross_polytope(dim, 0.25, &mut rng),
    };
    if let Err(e) = fs::write(path, polytope.to_json()) {
        let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
        return EXIT_USAGE;
    }
    let _ = writeln!(
        out,
        "wrote {} facets over {} vertices to {}",
        polytope.facets().len(),
        polytope.vertices().len(),
        path.display()
    );
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting_is_fixed() {
        assert_eq!(fmt_real(0.5), "5.00000000000e-1");
        assert_eq!(fmt_real(-0.0), "0.00000000000e0");
        assert_eq!(fmt_real(-1.25e10), "-1.25000000000e10");
    }

    #[test]
    fn usage_errors_exit_2() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run(["mobius-center", "bogus"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["mobius-center", "verify", "--trials", "0"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["mobius-center", "verify", "--trials", "x"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["mobius-center", "--help"], &mut out, &mut err), EXIT_OK);
    }
}
