//! Command-line surface: solve, sweep, verify and profile export with
//! stable CSV/JSON schemas.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/domain error,
//! 3 bracketing/ambiguity, 4 numerical failure. Diagnostics go to stderr as
//! one machine-parsable line; artifacts go to --out or stdout.

// `!(x > 0.0)` also rejects NaN inputs
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Args, Parser, Subcommand};
use hypermt::error::Error;
use hypermt::lab::{self, Suite, SweepRecord, VerifyOptions};
use hypermt::solver::{self, ShootingConfig};
use hypermt::{fmt, functionals, profiles};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hypermt", version, about = "Shooting laboratory for the Moser-Trudinger equation on the Poincaré disk")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute one admissible solution at a prescribed lambda or peak height.
    Solve(SolveArgs),
    /// Run the lambda-continuation and emit one CSV row per lambda.
    Sweep(SweepArgs),
    /// Run the verification suite and emit a JSON report.
    Verify(VerifyArgs),
    /// Export the limiting profiles on a log-spaced radial grid.
    Profiles(ProfilesArgs),
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Truncation of the radial integrations (geodesic distance).
    #[arg(long, default_value_t = 80.0)]
    s_max: f64,
    /// Relative tolerance of the adaptive integrator.
    #[arg(long, default_value_t = 1e-11)]
    ivp_tol: f64,
    /// Bisection tolerance on the shooting parameter.
    #[arg(long, default_value_t = 1e-12)]
    bisect_tol: f64,
}

impl ConfigArgs {
    fn to_config(&self) -> ShootingConfig {
        ShootingConfig {
            s_max: self.s_max,
            classify_at: 0.8 * self.s_max,
            ivp_tol: self.ivp_tol,
            bisect_tol: self.bisect_tol,
            ..ShootingConfig::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Eigenvalue-like parameter in (0, 1/4).
    #[arg(long, conflicts_with = "c")]
    lambda: Option<f64>,
    /// Peak height u(0); the admissible lambda*(c) is then found by shooting.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Grid spec a:b:n or a:b:n:geom (n points from a to b, linear or geometric).
    #[arg(long = "lambda-grid")]
    lambda_grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Test-only fault injection: add a constant to the first correction.
    #[arg(long = "corrupt-w0", hide = true, default_value_t = 0.0)]
    corrupt_w0: f64,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct ProfilesArgs {
    /// Largest radius of the export grid.
    #[arg(long, default_value_t = 1000.0)]
    rmax: f64,
    /// Number of log-spaced samples (odd counts hit r = 1 exactly).
    #[arg(long, default_value_t = 121)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct EnergiesOut {
    dirichlet: f64,
    l2_hyp: f64,
    mt_functional: f64,
    nonlinear_mass: f64,
    quad_error: f64,
}

#[derive(Serialize)]
struct PohozaevOut {
    d: f64,
    lhs: f64,
    rhs: f64,
    residual: f64,
    relative_residual: f64,
}

#[derive(Serialize)]
struct GridSummaryOut {
    n_points: usize,
    s_end: f64,
    u_end: f64,
}

#[derive(Serialize)]
struct SolveOut {
    schema: String,
    lambda: f64,
    c: f64,
    r_lambda: f64,
    lambda_c2: f64,
    decay_rate: f64,
    tail_amplitude: f64,
    energies: EnergiesOut,
    pohozaev: PohozaevOut,
    grid_summary: GridSummaryOut,
}

fn threads_from_env() -> Result<Option<usize>, Error> {
    match std::env::var("HYPERMT_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => {
            let n: usize = v
                .parse()
                .map_err(|_| Error::Domain(format!("HYPERMT_THREADS must be an integer, got '{v}'")))?;
            Ok(if n == 0 { None } else { Some(n) })
        }
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::Numerical(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode, Error> {
    let config = args.config.to_config();
    let sol = match (args.lambda, args.c) {
        (Some(lambda), None) => {
            if !(lambda > 0.0 && lambda < 0.25) {
                return Err(Error::Domain(format!("--lambda {lambda} outside (0, 1/4)")));
            }
            solver::solve_for_lambda(lambda, &config)?
        }
        (None, Some(c)) => {
            if !(c > 0.0) {
                return Err(Error::Domain(format!("--c {c} must be positive")));
            }
            solver::shoot_lambda(c, &config)?.solution
        }
        _ => {
            return Err(Error::Domain(
                "exactly one of --lambda or --c is required".into(),
            ))
        }
    };
    let en = functionals::energies(&sol)?;
    let poh = functionals::pohozaev_residual(&sol, lab::DEFAULT_POHOZAEV_D)?;
    let out = SolveOut {
        schema: "hypermt/solve/v1".into(),
        lambda: sol.lambda,
        c: sol.c,
        r_lambda: sol.r_lambda,
        lambda_c2: sol.lambda * sol.c * sol.c,
        decay_rate: sol.tail_rate.unwrap_or(f64::NAN),
        tail_amplitude: sol.tail_amplitude.unwrap_or(f64::NAN),
        energies: EnergiesOut {
            dirichlet: en.dirichlet,
            l2_hyp: en.l2_hyp,
            mt_functional: en.mt_functional,
            nonlinear_mass: en.nonlinear_mass,
            quad_error: en.quad_error,
        },
        pohozaev: PohozaevOut {
            d: poh.d,
            lhs: poh.lhs,
            rhs: poh.rhs,
            residual: poh.residual,
            relative_residual: poh.relative_residual(),
        },
        grid_summary: GridSummaryOut {
            n_points: sol.grid.len(),
            s_end: sol.s_end(),
            u_end: *sol.u.last().unwrap(),
        },
    };
    emit(&args.out, &fmt::to_json_string(&out))?;
    Ok(ExitCode::SUCCESS)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 && parts.len() != 4 {
        return Err(Error::Domain(format!(
            "grid spec '{spec}' must be a:b:n or a:b:n:geom"
        )));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Domain(format!("bad grid endpoint '{}'", parts[0])))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Domain(format!("bad grid endpoint '{}'", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Error::Domain(format!("bad grid count '{}'", parts[2])))?;
    let geometric = match parts.get(3) {
        None => false,
        Some(&"geom") => true,
        Some(&"lin") => false,
        Some(other) => {
            return Err(Error::Domain(format!(
                "unknown grid mode '{other}' (expected geom or lin)"
            )))
        }
    };
    if n == 0 {
        return Err(Error::Domain("grid needs at least one point".into()));
    }
    let mut grid = Vec::with_capacity(n);
    for i in 0..n {
        let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        let v = if geometric {
            a * (b / a).powf(t)
        } else {
            a + (b - a) * t
        };
        grid.push(v);
    }
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
    grid.dedup();
    for &v in &grid {
        if !(v > 0.0 && v < 0.25) {
            return Err(Error::Domain(format!("grid value {v} outside (0, 1/4)")));
        }
    }
    Ok(grid)
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode, Error> {
    let grid = parse_grid(&args.lambda_grid)?;
    let config = args.config.to_config();
    let records = lab::run_sweep(&grid, &config, threads_from_env()?)?;
    let mut csv = String::from(SweepRecord::CSV_HEADER);
    csv.push('\n');
    for rec in &records {
        csv.push_str(&rec.csv_row());
        csv.push('\n');
    }
    emit(&args.out, &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, Error> {
    let suite: Suite = args.suite.parse()?;
    let opts = VerifyOptions {
        suite,
        config: args.config.to_config(),
        w0_shift: args.corrupt_w0,
        threads: threads_from_env()?,
    };
    let report = lab::full_verify(&opts)?;
    emit(&args.out, &report.to_json())?;
    if report.all_passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "error: verification: {} of {} checks failed",
            report.failed,
            report.failed + report.passed
        );
        Ok(ExitCode::from(1))
    }
}

fn cmd_profiles(args: &ProfilesArgs) -> Result<ExitCode, Error> {
    if !(args.rmax > 0.0) || args.samples == 0 {
        return Err(Error::Domain(
            "--rmax and --samples must be positive".into(),
        ));
    }
    let z0 = profiles::solve_z0_profile(args.rmax.max(100.0) * 1.0001, 1e-10)?;
    let mut csv = String::from("r,eta0,w0,w0_prime,z0,z0_prime\n");
    let n = args.samples;
    for i in 0..n {
        let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        let r = args.rmax.powf(2.0 * t - 1.0);
        let row = format!(
            "{},{},{},{},{},{}\n",
            fmt::real(r),
            fmt::real(profiles::eta0(r)),
            fmt::real(profiles::w0(r)?),
            fmt::real(profiles::w0_prime(r)?),
            fmt::real(z0.eval(r)?),
            fmt::real(z0.eval_deriv(r)?),
        );
        csv.push_str(&row);
    }
    emit(&args.out, &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Profiles(args) => cmd_profiles(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
