//! Command-line front end. All numbers come from library calls; this module
//! only parses arguments and formats CSV.

mod config;

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{OneOrMany, RunConfig};

use crate::analytic::{
    count_pmf, count_pmf_adaptive, linear_grid, palm_count_pmf, palm_count_pmf_adaptive, CurveKind,
    DistributionCurve, McpParams, DEFAULT_GRID_POINTS, DEFAULT_TAIL,
};
use crate::apps::{log_grid, sweep, Metric, SweepMode, SweepSpec};
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::simulator::{
    default_observation_radius, simulate_distances, validate, SampleKind, SimConfig,
};

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "MCPDIST_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_QUADRATURE: i32 = 3;
pub const EXIT_CENSORING: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "mcpdist",
    version,
    about = "kth distance distributions of the Matérn cluster process"
)]
pub struct Cli {
    /// Print timing information to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate kth contact / nearest-neighbour distance CDFs.
    Cdf(CdfArgs),
    /// PMF of the number of points in a ball.
    Pmf(PmfArgs),
    /// Compare analytic CDFs with Monte Carlo ECDFs.
    Validate(ValidateArgs),
    /// Sweep k-connectivity or cache-hit probability over the cluster radius.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// JSON config file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Spatial dimension.
    #[arg(long)]
    pub n: Option<u32>,
    /// Parent intensity (comma-separated list for sweeps).
    #[arg(long = "lambda-p", value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda_p: Vec<f64>,
    /// Mean number of daughters per cluster.
    #[arg(long, allow_hyphen_values = true)]
    pub mbar: Option<f64>,
    /// Cluster radius.
    #[arg(long, allow_hyphen_values = true)]
    pub rd: Option<f64>,
    /// Output file (stdout when absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CdfKindArg {
    Cd,
    Nnd,
    Ppp,
    NndLimit,
}

impl From<CdfKindArg> for CurveKind {
    fn from(k: CdfKindArg) -> Self {
        match k {
            CdfKindArg::Cd => CurveKind::ContactCd,
            CdfKindArg::Nnd => CurveKind::Nnd,
            CdfKindArg::Ppp => CurveKind::PppCd,
            CdfKindArg::NndLimit => CurveKind::NndSmallRdLimit,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CdfArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "cd")]
    pub kind: CdfKindArg,
    /// Comma-separated k values.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Largest radius of the grid; defaults to where the CDF of the largest k
    /// reaches 1 - 1e-4.
    #[arg(long, allow_hyphen_values = true)]
    pub grid_max: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PmfKindArg {
    Count,
    Palm,
}

#[derive(Debug, Clone, Args)]
pub struct PmfArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "count")]
    pub kind: PmfKindArg,
    /// Ball radius.
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
    /// Highest m; chosen by the tail criterion when absent.
    #[arg(long)]
    pub m_max: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// k values to check (the largest sets max_k).
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Radius up to which distances are observed.
    #[arg(long, allow_hyphen_values = true)]
    pub obs_radius: Option<f64>,
    /// Raw contact-distance samples (`run,k,distance,censored`).
    #[arg(long)]
    pub dump_cd: Option<PathBuf>,
    /// Raw nearest-neighbour samples.
    #[arg(long)]
    pub dump_nnd: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Connectivity,
    Cache,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "connectivity")]
    pub metric: MetricArg,
    /// Connection range.
    #[arg(long = "R", allow_hyphen_values = true)]
    pub range: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Explicit cluster radii (comma-separated, increasing).
    #[arg(long = "rd-list", value_delimiter = ',')]
    pub rd_list: Vec<f64>,
    /// Log grid lower end (default R / 100).
    #[arg(long)]
    pub rd_min: Option<f64>,
    /// Log grid upper end (default 100 R).
    #[arg(long)]
    pub rd_max: Option<f64>,
    #[arg(long, default_value_t = 41)]
    pub rd_points: usize,
    /// Omit the PPP reference rows.
    #[arg(long)]
    pub no_ppp: bool,
    /// Hold the daughter intensity fixed instead of the mean cluster size.
    #[arg(long)]
    pub fixed_lambda_d: bool,
}

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 1;
const DEFAULT_K: [usize; 4] = [1, 2, 3, 4];

/// Maps library errors onto process exit codes.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_) | Error::CurveCoverage { .. } => EXIT_INVALID,
        Error::QuadratureNonConvergence { .. } | Error::Underflow { .. } => EXIT_QUADRATURE,
        Error::ExcessiveCensoring { .. } => EXIT_CENSORING,
        Error::Io(_) => EXIT_VALIDATION_FAILED,
    }
}

struct Resolved {
    file: RunConfig,
    n: u32,
}

impl ModelArgs {
    fn resolve(&self) -> Result<Resolved> {
        let file = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let n = self.n.or(file.n).unwrap_or(2);
        Ok(Resolved { file, n })
    }

    fn lambda_list(&self, file: &RunConfig) -> Result<Vec<f64>> {
        if !self.lambda_p.is_empty() {
            return Ok(self.lambda_p.clone());
        }
        file.lambda_p
            .clone()
            .map(OneOrMany::into_vec)
            .ok_or_else(|| invalid("missing --lambda-p"))
    }

    fn mbar(&self, file: &RunConfig) -> Result<f64> {
        self.mbar
            .or(file.mbar)
            .ok_or_else(|| invalid("missing --mbar"))
    }

    /// Parameters for commands that take a single parent intensity.
    fn params(&self) -> Result<(McpParams, RunConfig)> {
        let Resolved { file, n } = self.resolve()?;
        let lambdas = self.lambda_list(&file)?;
        let [lambda_p] = lambdas[..] else {
            return Err(invalid("expected exactly one --lambda-p value"));
        };
        let rd = self.rd.or(file.rd).ok_or_else(|| invalid("missing --rd"))?;
        let p = McpParams::new(lambda_p, rd, self.mbar(&file)?, n)?;
        Ok((p, file))
    }
}

fn k_list(flag: &[usize], file: &RunConfig, default: &[usize]) -> Result<Vec<usize>> {
    let ks = if !flag.is_empty() {
        flag.to_vec()
    } else {
        file.k.clone().unwrap_or_else(|| default.to_vec())
    };
    if ks.is_empty() || ks.contains(&0) {
        return Err(invalid("k values must be positive"));
    }
    Ok(ks)
}

fn params_header(p: &McpParams) -> String {
    format!(
        "n={} lambda_p={} mbar={} rd={}",
        p.dim(),
        p.lambda_p(),
        p.daughter_mean(),
        p.cluster_radius()
    )
}

/// Runs a parsed command, writing its primary output to `--output` or `out`.
/// Returns the process exit code for completed runs.
pub fn run(cli: &Cli, out: &mut dyn Write, exec: Execution) -> Result<i32> {
    let start = std::time::Instant::now();
    let (text, model, code) = match &cli.command {
        Command::Cdf(a) => (cmd_cdf(a, exec)?, &a.model, EXIT_OK),
        Command::Pmf(a) => (cmd_pmf(a)?, &a.model, EXIT_OK),
        Command::Validate(a) => {
            let (text, pass) = cmd_validate(a, exec)?;
            (
                text,
                &a.model,
                if pass {
                    EXIT_OK
                } else {
                    EXIT_VALIDATION_FAILED
                },
            )
        }
        Command::Sweep(a) => (cmd_sweep(a, exec)?, &a.model, EXIT_OK),
    };
    match &model.output {
        Some(path) => std::fs::write(path, text.as_bytes())?,
        None => out.write_all(text.as_bytes())?,
    }
    if cli.verbose {
        eprintln!(
            "mcpdist: finished in {:.3} s",
            start.elapsed().as_secs_f64()
        );
    }
    Ok(code)
}

/// `r,k,cdf` rows for every requested k on one shared grid.
pub fn cmd_cdf(a: &CdfArgs, exec: Execution) -> Result<String> {
    let (p, file) = a.model.params()?;
    let ks = k_list(&a.k, &file, &[1])?;
    let kind = CurveKind::from(a.kind);
    let k_top = *ks.iter().max().unwrap();
    let grid_max = match a.grid_max {
        Some(g) if g.is_finite() && g >= 0.0 => g,
        Some(g) => return Err(invalid(format!("grid max must be non-negative, got {g}"))),
        None => kind.support_radius(k_top, &p, DEFAULT_TAIL)?,
    };
    if a.grid_points == 0 {
        return Err(invalid("grid points must be positive"));
    }
    let grid = linear_grid(grid_max, a.grid_points);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "# mcpdist cdf kind={} {} k={} grid_points={} grid_max={}",
        kind.name(),
        params_header(&p),
        join(&ks),
        grid.len(),
        grid_max
    );
    let _ = writeln!(s, "r,k,cdf");
    for &k in &ks {
        let curve = DistributionCurve::tabulate(kind, k, &p, grid.clone(), exec)?;
        for (r, v) in curve.radii().iter().zip(curve.values()) {
            let _ = writeln!(s, "{r},{k},{v}");
        }
    }
    Ok(s)
}

pub fn cmd_pmf(a: &PmfArgs) -> Result<String> {
    let (p, _) = a.model.params()?;
    let pmf = match (a.kind, a.m_max) {
        (PmfKindArg::Count, Some(m)) => count_pmf(a.r, &p, m)?,
        (PmfKindArg::Count, None) => count_pmf_adaptive(a.r, &p)?,
        (PmfKindArg::Palm, Some(m)) => palm_count_pmf(a.r, &p, m)?,
        (PmfKindArg::Palm, None) => palm_count_pmf_adaptive(a.r, &p)?,
    };
    let kind = match a.kind {
        PmfKindArg::Count => "count",
        PmfKindArg::Palm => "palm",
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# mcpdist pmf kind={kind} {} r={}",
        params_header(&p),
        a.r
    );
    let _ = writeln!(s, "m,probability");
    for (m, v) in pmf.probs().iter().enumerate() {
        let _ = writeln!(s, "{m},{v}");
    }
    let _ = writeln!(s, "# truncation_mass={}", pmf.truncation_mass());
    Ok(s)
}

/// Returns the report text and whether every check passed.
pub fn cmd_validate(a: &ValidateArgs, exec: Execution) -> Result<(String, bool)> {
    let (p, file) = a.model.params()?;
    let ks = k_list(&a.k, &file, &DEFAULT_K)?;
    let max_k = *ks.iter().max().unwrap();
    let samples = a.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
    let seed = a.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    let obs = match a.obs_radius {
        Some(r) => r,
        None => default_observation_radius(&p, max_k)?,
    };
    let cfg = SimConfig::new(p, obs, samples, seed, max_k)?;
    let mut report = validate(&cfg, exec)?;
    report.rows.retain(|r| ks.contains(&r.k));
    for (path, kind) in [
        (&a.dump_cd, SampleKind::Stationary),
        (&a.dump_nnd, SampleKind::Palm),
    ] {
        if let Some(path) = path {
            let table = simulate_distances(&cfg, kind, exec)?;
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            table.write_csv(&mut f)?;
            f.flush()?;
        }
    }
    let pass = report.all_pass();
    Ok((report.render(), pass))
}

pub fn cmd_sweep(a: &SweepArgs, exec: Execution) -> Result<String> {
    let Resolved { file, n } = a.model.resolve()?;
    let lambdas = a.model.lambda_list(&file)?;
    let mbar = a.model.mbar(&file)?;
    let range = a
        .range
        .or(file.range)
        .ok_or_else(|| invalid("missing --R"))?;
    let ks = k_list(&a.k, &file, &DEFAULT_K)?;
    let rd_grid = if !a.rd_list.is_empty() {
        a.rd_list.clone()
    } else if let Some(rd) = a
        .model
        .rd
        .filter(|_| a.rd_min.is_none() && a.rd_max.is_none())
    {
        vec![rd]
    } else {
        log_grid(
            a.rd_min.unwrap_or(range / 100.0),
            a.rd_max.unwrap_or(100.0 * range),
            a.rd_points,
        )?
    };
    let metric = match a.metric {
        MetricArg::Connectivity => Metric::Connectivity,
        MetricArg::Cache => Metric::CacheHit,
    };
    let mode = if a.fixed_lambda_d {
        SweepMode::FixedDaughterDensity
    } else {
        SweepMode::FixedMeanCount
    };
    // base cluster radius only matters for the fixed-density mode
    let base_rd = a.model.rd.or(file.rd).unwrap_or(rd_grid[0]);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "# mcpdist sweep metric={} n={n} mbar={mbar} R={range} k={} mode={}",
        match metric {
            Metric::Connectivity => "connectivity",
            Metric::CacheHit => "cache",
        },
        join(&ks),
        match mode {
            SweepMode::FixedMeanCount => "fixed_mbar",
            SweepMode::FixedDaughterDensity => "fixed_lambda_d",
        }
    );
    let _ = writeln!(s, "lambda_p,rd,k,value");
    for &lambda_p in &lambdas {
        let spec = SweepSpec {
            base: McpParams::new(lambda_p, base_rd, mbar, n)?,
            rd_grid: rd_grid.clone(),
            connect_range: range,
            k_values: ks.clone(),
            include_ppp_reference: !a.no_ppp,
            mode,
        };
        for row in sweep(&spec, metric, exec)? {
            match row.rd {
                Some(rd) => {
                    let _ = writeln!(s, "{lambda_p},{rd},{},{}", row.k, row.value);
                }
                None => {
                    let _ = writeln!(s, "{lambda_p},inf,{},{}", row.k, row.value);
                }
            }
        }
    }
    Ok(s)
}

fn join(ks: &[usize]) -> String {
    ks.iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Reads the thread cap from the environment.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(invalid(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}
