//! Batch driver for the isospec crate. Five subcommands cover the pipeline:
//! forward (solve and persist the spectral measure), path (build the affine
//! weight path), afunc (A-difference tables), reconstruct (deformed
//! potentials), verify (re-solve and certify). Everything is driven by one
//! JSON config; a handful of flags override it per run.
//!
//! Exit codes: 0 success, 1 verification failed, 2 configuration or IO
//! problem, 3 invalid path data, 4 reconstruction failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use isospec::io::{self, ReconstructionSidecar};
use isospec::{
    a_regularized, default_eps_schedule, delta_a, interpolate_a, path_report, AlphaGrid, Error,
    GridPotential, IsospectralPath, OverlapTable, SolverConfig, SpectralMeasure, VerifyTolerances,
};

const EXIT_VERIFY_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_PATH_DATA: u8 = 3;
const EXIT_RECONSTRUCT: u8 = 4;

/// Largest accepted boundary suppression when truncation checks are on.
const TRUNCATION_BOUND: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "isospec", version, about = "Spectral measures, isospectral paths, and reconstructions for half-line Schrodinger operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the potential and write measure.json + eigen_report.json.
    Forward(Common),
    /// Apply the perturbation map and write path.json.
    Path(Common),
    /// Write an A-difference CSV per path parameter.
    Afunc(Common),
    /// Write a reconstruction CSV and sidecar JSON per path parameter.
    Reconstruct(Common),
    /// Re-solve every reconstruction and write report.json; exit 0 iff pass.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Job configuration file (JSON).
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Path parameters, comma separated; overrides the config.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    t: Option<Vec<f64>>,
    /// Upper end of the alpha grid; overrides the config.
    #[arg(long, value_name = "REAL")]
    alpha_max: Option<f64>,
    /// Number of alpha grid points; overrides the config.
    #[arg(long, value_name = "INT")]
    alpha_n: Option<usize>,
    /// Also write regularized transforms (afunc only).
    #[arg(long)]
    regularized: bool,
    /// Accepted for interface stability; runs are deterministic regardless.
    #[arg(long)]
    seedless: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JobConfig {
    potential: PotentialSpec,
    #[serde(rename = "J")]
    j: usize,
    /// Off by default: box-type potentials (the zero builtin) legitimately
    /// keep spectral weight at the wall, which the check must reject.
    #[serde(default)]
    truncation_checks: bool,
    /// Atom index -> additive weight change, defining the path target.
    #[serde(default)]
    perturbation: BTreeMap<usize, f64>,
    #[serde(default = "endpoint_ts")]
    t_samples: Vec<f64>,
    #[serde(default)]
    alpha: AlphaSpec,
    #[serde(default = "default_out")]
    out_dir: PathBuf,
    #[serde(default)]
    tolerances: Tolerances,
}

fn endpoint_ts() -> Vec<f64> {
    vec![0.0, 1.0]
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PotentialSpec {
    File {
        file: PathBuf,
    },
    Builtin {
        builtin: String,
        #[serde(rename = "L")]
        length: f64,
        n: usize,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlphaSpec {
    #[serde(default = "alpha_min")]
    min: f64,
    #[serde(default = "alpha_max")]
    max: f64,
    #[serde(default = "alpha_n")]
    n: usize,
}

fn alpha_min() -> f64 {
    0.05
}

fn alpha_max() -> f64 {
    1.0
}

fn alpha_n() -> usize {
    200
}

impl Default for AlphaSpec {
    fn default() -> Self {
        AlphaSpec { min: alpha_min(), max: alpha_max(), n: alpha_n() }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Tolerances {
    #[serde(default = "eigen_tol")]
    eigen: f64,
    #[serde(default = "quad_tol")]
    quadrature: f64,
    #[serde(default = "verify_tol")]
    verify: f64,
}

fn eigen_tol() -> f64 {
    1e-10
}

fn quad_tol() -> f64 {
    1e-11
}

fn verify_tol() -> f64 {
    1e-5
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eigen: eigen_tol(), quadrature: quad_tol(), verify: verify_tol() }
    }
}

/// Flattened run parameters: the config with every flag already applied.
struct Job {
    config: JobConfig,
    out: PathBuf,
    regularized: bool,
}

impl Job {
    fn from_args(common: Common) -> Result<Job, Error> {
        let text = fs::read_to_string(&common.config)?;
        let mut config: JobConfig = serde_json::from_str(&text).map_err(|e| Error::Malformed {
            kind: "config",
            path: common.config.clone(),
            detail: e.to_string(),
        })?;
        if let Some(ts) = common.t {
            config.t_samples = ts;
        }
        if let Some(a) = common.alpha_max {
            config.alpha.max = a;
        }
        if let Some(n) = common.alpha_n {
            config.alpha.n = n;
        }
        let out = common.out.unwrap_or_else(|| config.out_dir.clone());
        let job = Job { config, out, regularized: common.regularized };
        job.validate()?;
        Ok(job)
    }

    fn validate(&self) -> Result<(), Error> {
        let c = &self.config;
        if c.j < 1 {
            return Err(Error::InvalidInput("J must be at least 1".into()));
        }
        let t = &c.tolerances;
        if !(t.eigen > 0.0 && t.quadrature > 0.0 && t.verify > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be positive: eigen {}, quadrature {}, verify {}",
                t.eigen, t.quadrature, t.verify
            )));
        }
        if c.t_samples.is_empty() || c.t_samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "t samples must be finite and nonempty, got {:?}",
                c.t_samples
            )));
        }
        Ok(())
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig {
            eigen_tol: self.config.tolerances.eigen,
            ode_tol: self.config.tolerances.quadrature,
            quad_n: None,
        }
    }

    fn potential(&self) -> Result<GridPotential, Error> {
        match &self.config.potential {
            PotentialSpec::File { file } => io::read_potential(file),
            PotentialSpec::Builtin { builtin, length, n } => {
                let f: fn(f64) -> f64 = match builtin.as_str() {
                    "zero" => |_| 0.0,
                    "linear" => |x| x,
                    "quadratic" => |x| x * x,
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "unknown builtin potential '{other}' (zero, linear, quadratic)"
                        )))
                    }
                };
                GridPotential::from_fn(*length, *n, builtin.clone(), f)
            }
        }
    }

    fn alpha_grid(&self) -> Result<AlphaGrid, Error> {
        let a = &self.config.alpha;
        AlphaGrid::new(a.min, a.max, a.n)
    }

    fn measure(&self, pot: &GridPotential) -> Result<SpectralMeasure, Error> {
        let (measure, _) = isospec::spectral_measure_with(pot, self.config.j, &self.solver())?;
        if self.config.truncation_checks {
            isospec::forward::check_truncation(pot, measure.energies(), TRUNCATION_BOUND)?;
        }
        Ok(measure)
    }

    fn path(&self, pot: &GridPotential) -> Result<IsospectralPath, Error> {
        let measure = self.measure(pot)?;
        IsospectralPath::from_perturbation(measure, &self.config.perturbation)
    }

    fn artifact(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn prepare_out(&self) -> Result<(), Error> {
        fs::create_dir_all(&self.out)?;
        Ok(())
    }
}

#[derive(Serialize)]
struct EigenReport<'a> {
    eigenvalues: &'a [f64],
    residuals: &'a [f64],
    iterations: &'a [u32],
    weights: &'a [f64],
    /// Boundary suppression per eigenvalue; absent when checks are off.
    truncation_suppression: Option<Vec<f64>>,
}

fn cmd_forward(job: &Job) -> Result<(), Error> {
    let pot = job.potential()?;
    let (measure, solve) = isospec::spectral_measure_with(&pot, job.config.j, &job.solver())?;
    let suppression = if job.config.truncation_checks {
        isospec::forward::check_truncation(&pot, measure.energies(), TRUNCATION_BOUND)?;
        Some(
            measure
                .energies()
                .iter()
                .map(|&e| isospec::forward::truncation_suppression(&pot, e))
                .collect(),
        )
    } else {
        None
    };
    job.prepare_out()?;
    io::write_measure(&job.artifact("measure.json"), &measure)?;
    io::write_json(
        &job.artifact("eigen_report.json"),
        &EigenReport {
            eigenvalues: &solve.eigenvalues,
            residuals: &solve.residuals,
            iterations: &solve.iterations,
            weights: measure.weights(),
            truncation_suppression: suppression,
        },
    )
}

fn cmd_path(job: &Job) -> Result<(), Error> {
    let pot = job.potential()?;
    let path = job.path(&pot)?;
    job.prepare_out()?;
    io::write_path(&job.artifact("path.json"), &path)
}

fn cmd_afunc(job: &Job) -> Result<(), Error> {
    let pot = job.potential()?;
    let path = job.path(&pot)?;
    let grid = job.alpha_grid()?;
    let full = delta_a(path.base(), path.target(), &grid)?;
    job.prepare_out()?;
    for &t in &job.config.t_samples {
        let at_t = interpolate_a(&full, t)?;
        io::write_afunction_csv(&job.artifact(&format!("delta_a_t{t}.csv")), &at_t)?;
        if job.regularized {
            let measure = path.measure_at(t)?;
            let reg = a_regularized(&measure, &grid, &default_eps_schedule())?;
            io::write_afunction_csv(&job.artifact(&format!("a_reg_t{t}.csv")), &reg)?;
        }
    }
    Ok(())
}

fn cmd_reconstruct(job: &Job) -> Result<(), Error> {
    let pot = job.potential()?;
    let path = job.path(&pot)?;
    let support = path.support();
    let ode_tol = job.config.tolerances.quadrature;
    let table = OverlapTable::build(&pot, path.base(), &support, ode_tol)?;
    job.prepare_out()?;
    for &t in &job.config.t_samples {
        let rec = isospec::reconstruct_at_with_table(&path, &pot, t, &table)?;
        io::write_reconstruction_csv(&job.artifact(&format!("reconstruct_t{t}.csv")), &rec)?;
        io::write_json(
            &job.artifact(&format!("reconstruct_t{t}.json")),
            &ReconstructionSidecar {
                t,
                support: &support,
                min_det: rec.min_det,
                max_condition: rec.max_condition,
                warnings: &rec.warnings,
                quad_error: table.quad_error(),
                ode_tol,
            },
        )?;
    }
    Ok(())
}

fn cmd_verify(job: &Job) -> Result<bool, Error> {
    let pot = job.potential()?;
    let path = job.path(&pot)?;
    let verify = job.config.tolerances.verify;
    // One knob drives both thresholds; norming constants get the usual
    // factor-ten slack over eigenvalues.
    let tolerances = VerifyTolerances { eigen_rel: verify, weight_rel: 10.0 * verify };
    let report = path_report(&path, &pot, &job.config.t_samples, tolerances)?;
    job.prepare_out()?;
    io::write_json(&job.artifact("report.json"), &report)?;
    Ok(report.pass)
}

fn exit_for(error: &Error) -> u8 {
    match error {
        Error::NonpositiveWeight { .. }
        | Error::SpectrumMismatch { .. }
        | Error::LengthMismatch(_)
        | Error::GridMismatch
        | Error::KindMismatch { .. }
        | Error::ProvenanceMismatch { .. } => EXIT_PATH_DATA,
        Error::NonpositiveDeterminant { .. } | Error::ExtrapolationDiverged => EXIT_RECONSTRUCT,
        _ => EXIT_CONFIG,
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Forward(c) => cmd_forward(&Job::from_args(c)?).map(|_| ExitCode::SUCCESS),
        Command::Path(c) => cmd_path(&Job::from_args(c)?).map(|_| ExitCode::SUCCESS),
        Command::Afunc(c) => cmd_afunc(&Job::from_args(c)?).map(|_| ExitCode::SUCCESS),
        Command::Reconstruct(c) => cmd_reconstruct(&Job::from_args(c)?).map(|_| ExitCode::SUCCESS),
        Command::Verify(c) => cmd_verify(&Job::from_args(c)?).map(|pass| {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFY_FAIL)
            }
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(exit_for(&error))
        }
    }
}
