//! Simulator-versus-analytic validation harness.

use std::fmt::Write as _;
use std::io::Write;

use super::ecdf::{ks_distance, EmpiricalCdf};
use super::sampling::{kth_distances, run_rng, sample_mcp, sample_mcp_palm};
use super::SimConfig;
use crate::analytic::{cdf_contact, linear_grid, CurveKind, DistributionCurve, McpParams};
use crate::error::{invalid, Result};
use crate::exec::Execution;

/// Grid resolution of the analytic curves the ECDFs are compared with.
pub const VALIDATION_GRID_POINTS: usize = 2049;
/// Auto observation radius: where `F_{R_k}` reaches `1 - 1e-3`.
pub const OBSERVATION_TAIL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleKind {
    /// Distances from the origin of a stationary realization.
    Stationary,
    /// Distances from a typical point under the reduced Palm distribution.
    Palm,
}

impl SampleKind {
    pub fn label(self) -> &'static str {
        match self {
            SampleKind::Stationary => "cd",
            SampleKind::Palm => "nnd",
        }
    }

    pub fn curve_kind(self) -> CurveKind {
        match self {
            SampleKind::Stationary => CurveKind::ContactCd,
            SampleKind::Palm => CurveKind::Nnd,
        }
    }

    fn stream(self, run: usize) -> u64 {
        2 * run as u64
            + match self {
                SampleKind::Stationary => 0,
                SampleKind::Palm => 1,
            }
    }
}

/// Per-run kth distances; `None` when the kth point is beyond the
/// observation radius.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    max_k: usize,
    runs: Vec<Vec<Option<f64>>>,
}

impl DistanceTable {
    pub fn runs(&self) -> &[Vec<Option<f64>>] {
        &self.runs
    }

    pub fn max_k(&self) -> usize {
        self.max_k
    }

    pub fn ecdf(&self, k: usize) -> EmpiricalCdf {
        assert!(k >= 1 && k <= self.max_k, "k out of range");
        let mut samples = Vec::with_capacity(self.runs.len());
        let mut censored = 0;
        for run in &self.runs {
            match run[k - 1] {
                Some(d) => samples.push(d),
                None => censored += 1,
            }
        }
        EmpiricalCdf::new(samples, censored)
    }

    /// Raw dump with header `run,k,distance,censored`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "run,k,distance,censored")?;
        for (i, run) in self.runs.iter().enumerate() {
            for (k, d) in run.iter().enumerate() {
                match d {
                    Some(d) => writeln!(w, "{i},{},{d},0", k + 1)?,
                    None => writeln!(w, "{i},{},,1", k + 1)?,
                }
            }
        }
        Ok(())
    }
}

/// Runs `cfg.samples` independent realizations and records kth distances.
pub fn simulate_distances(
    cfg: &SimConfig,
    kind: SampleKind,
    exec: Execution,
) -> Result<DistanceTable> {
    cfg.check()?;
    let obs = cfg.observation_radius;
    let runs = exec.map_indices(cfg.samples, |run| {
        let mut rng = run_rng(cfg.seed, kind.stream(run));
        let sample = match kind {
            SampleKind::Stationary => sample_mcp(cfg, &mut rng),
            SampleKind::Palm => sample_mcp_palm(cfg, &mut rng),
        };
        kth_distances(&sample, cfg.max_k)
            .into_iter()
            .map(|d| d.filter(|&d| d <= obs))
            .collect()
    });
    Ok(DistanceTable {
        max_k: cfg.max_k,
        runs,
    })
}

/// Histogram of `N(B(o, r))` over the runs; index `m` counts runs with `m`
/// points.
pub fn count_frequencies(
    cfg: &SimConfig,
    kind: SampleKind,
    r: f64,
    exec: Execution,
) -> Result<Vec<u64>> {
    cfg.check()?;
    if r > cfg.observation_radius {
        return Err(invalid("count radius exceeds the observation radius"));
    }
    let counts = exec.map_indices(cfg.samples, |run| {
        let mut rng = run_rng(cfg.seed, kind.stream(run));
        let sample = match kind {
            SampleKind::Stationary => sample_mcp(cfg, &mut rng),
            SampleKind::Palm => sample_mcp_palm(cfg, &mut rng),
        };
        sample.count_within(r)
    });
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut hist = vec![0u64; max + 1];
    for c in counts {
        hist[c] += 1;
    }
    Ok(hist)
}

/// DKW band at 95% confidence, widened by half.
pub fn dkw_threshold(samples: usize) -> f64 {
    1.5 * 1.36 / (samples as f64).sqrt()
}

/// Radius where `F_{R_k}` first reaches `1 - 1e-3`, found by doubling then
/// bisection. Nearest-neighbour CDFs dominate contact CDFs, so the same
/// radius serves both.
pub fn default_observation_radius(params: &McpParams, max_k: usize) -> Result<f64> {
    let target = 1.0 - OBSERVATION_TAIL;
    let hi0 = CurveKind::ContactCd.support_radius(max_k, params, OBSERVATION_TAIL)?;
    let mut lo = 0.0;
    let mut hi = hi0;
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if cdf_contact(mid, max_k, params)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-3 * hi {
            break;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KsRow {
    pub kind: SampleKind,
    pub k: usize,
    pub ks: f64,
    pub threshold: f64,
    pub censored_fraction: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub config: SimConfig,
    pub rows: Vec<KsRow>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn render(&self) -> String {
        let p = &self.config.params;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# validate n={} lambda_p={} mbar={} rd={} samples={} seed={} observation_radius={} max_k={}",
            p.dim(),
            p.lambda_p(),
            p.daughter_mean(),
            p.cluster_radius(),
            self.config.samples,
            self.config.seed,
            self.config.observation_radius,
            self.config.max_k
        );
        let _ = writeln!(s, "kind,k,ks,threshold,censored_fraction,result");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.kind.label(),
                r.k,
                r.ks,
                r.threshold,
                r.censored_fraction,
                if r.pass { "pass" } else { "fail" }
            );
        }
        let _ = writeln!(
            s,
            "# overall {}",
            if self.all_pass() { "pass" } else { "fail" }
        );
        s
    }
}

/// Simulates contact and nearest-neighbour distances and compares each
/// `k <= max_k` with the analytic CDF tabulated over `[0, observation_radius]`.
pub fn validate(cfg: &SimConfig, exec: Execution) -> Result<ValidationReport> {
    cfg.check()?;
    let threshold = dkw_threshold(cfg.samples);
    let grid = linear_grid(cfg.observation_radius, VALIDATION_GRID_POINTS);
    let mut rows = Vec::new();
    for kind in [SampleKind::Stationary, SampleKind::Palm] {
        let table = simulate_distances(cfg, kind, exec)?;
        for k in 1..=cfg.max_k {
            let curve =
                DistributionCurve::tabulate(kind.curve_kind(), k, &cfg.params, grid.clone(), exec)?;
            let ecdf = table.ecdf(k);
            let ks = ks_distance(&ecdf, &curve)?;
            rows.push(KsRow {
                kind,
                k,
                ks,
                threshold,
                censored_fraction: ecdf.censored_fraction(),
                pass: ks <= threshold,
            });
        }
    }
    Ok(ValidationReport { config: *cfg, rows })
}
