//! k-connectivity (macro-diversity) and cache-hit (D2D caching) metrics and
//! their sweeps over the cluster radius.

use serde::Serialize;

use crate::analytic::{cdf_contact, cdf_nnd, ppp_cdf_contact, McpParams};
use crate::error::{invalid, Result};
use crate::exec::Execution;

/// `p_k = P[R_k <= R]`: a user at the origin sees at least `k` base stations
/// within range `R`.
pub fn connectivity_probability(range: f64, k: usize, p: &McpParams) -> Result<f64> {
    check_range(range)?;
    cdf_contact(range, k, p)
}

/// `f_k = P[R'_k <= R]`: a typical device has at least `k` neighbours within
/// range `R`.
pub fn cache_hit_probability(range: f64, k: usize, p: &McpParams) -> Result<f64> {
    check_range(range)?;
    cdf_nnd(range, k, p)
}

fn check_range(range: f64) -> Result<()> {
    if !(range.is_finite() && range > 0.0) {
        return Err(invalid(format!("range must be positive, got {range}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Connectivity,
    CacheHit,
}

impl Metric {
    pub fn evaluate(self, range: f64, k: usize, p: &McpParams) -> Result<f64> {
        match self {
            Metric::Connectivity => connectivity_probability(range, k, p),
            Metric::CacheHit => cache_hit_probability(range, k, p),
        }
    }

    /// Value for a PPP of intensity `lambda`. Under a PPP the reduced Palm
    /// law equals the stationary one, so both metrics coincide.
    pub fn ppp_reference(self, range: f64, k: usize, lambda: f64, p: &McpParams) -> Result<f64> {
        check_range(range)?;
        ppp_cdf_contact(range, k, lambda, p.dim())
    }
}

/// How the daughter process changes along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepMode {
    /// Mean cluster size fixed; `lambda_d` rescales with `r_d`.
    #[default]
    FixedMeanCount,
    /// Daughter intensity fixed at the base value; `m_bar` grows with `r_d`.
    FixedDaughterDensity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: McpParams,
    pub rd_grid: Vec<f64>,
    pub connect_range: f64,
    pub k_values: Vec<usize>,
    pub include_ppp_reference: bool,
    pub mode: SweepMode,
}

impl SweepSpec {
    pub fn check(&self) -> Result<()> {
        check_range(self.connect_range)?;
        if self.rd_grid.is_empty() {
            return Err(invalid("cluster-radius grid is empty"));
        }
        if self.rd_grid[0] <= 0.0
            || self
                .rd_grid
                .windows(2)
                .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(invalid(
                "cluster radii must be positive and strictly increasing",
            ));
        }
        if self.k_values.is_empty() || self.k_values.contains(&0) {
            return Err(invalid(
                "k values must be a non-empty list of positive integers",
            ));
        }
        Ok(())
    }

    fn params_at(&self, rd: f64) -> Result<McpParams> {
        match self.mode {
            SweepMode::FixedMeanCount => self.base.with_cluster_radius(rd),
            SweepMode::FixedDaughterDensity => McpParams::from_daughter_density(
                self.base.lambda_p(),
                rd,
                self.base.daughter_density(),
                self.base.dim().get(),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    /// `None` marks the PPP reference row (`r_d = inf`).
    pub rd: Option<f64>,
    pub k: usize,
    pub value: f64,
}

/// Evaluates `metric` at every `(r_d, k)`, ordered by `r_d` then `k`, then
/// appends one PPP reference row per `k` (intensity `lambda_p * m_bar`).
pub fn sweep(spec: &SweepSpec, metric: Metric, exec: Execution) -> Result<Vec<SweepRow>> {
    spec.check()?;
    let cells: Vec<(f64, usize)> = spec
        .rd_grid
        .iter()
        .flat_map(|&rd| spec.k_values.iter().map(move |&k| (rd, k)))
        .collect();
    let values = exec.map_slice(&cells, |&(rd, k)| {
        let p = spec.params_at(rd)?;
        metric.evaluate(spec.connect_range, k, &p)
    });
    let mut rows = Vec::with_capacity(cells.len() + spec.k_values.len());
    for (&(rd, k), v) in cells.iter().zip(values) {
        rows.push(SweepRow {
            rd: Some(rd),
            k,
            value: v?,
        });
    }
    if spec.include_ppp_reference {
        let lambda = spec.base.intensity();
        for &k in &spec.k_values {
            rows.push(SweepRow {
                rd: None,
                k,
                value: metric.ppp_reference(spec.connect_range, k, lambda, &spec.base)?,
            });
        }
    }
    Ok(rows)
}

/// `points` log-spaced radii on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || points < 2 {
        if points == 1 && lo > 0.0 {
            return Ok(vec![lo]);
        }
        return Err(invalid(
            "log grid needs 0 < lo < hi and at least two points",
        ));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else if i == 0 {
                lo
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_small_cells() -> McpParams {
        McpParams::new(3e-2, 1.0, 2.0, 2).unwrap()
    }

    #[test]
    fn range_must_be_positive() {
        assert!(connectivity_probability(0.0, 1, &dense_small_cells()).is_err());
        assert!(cache_hit_probability(-1.0, 1, &dense_small_cells()).is_err());
        assert!(connectivity_probability(1e-9, 1, &dense_small_cells()).unwrap() < 1e-12);
        assert!(cache_hit_probability(1e-9, 1, &dense_small_cells()).unwrap() < 1e-12);
    }

    #[test]
    fn single_cell_sweep_reproduces_scalar() {
        let spec = SweepSpec {
            base: dense_small_cells(),
            rd_grid: vec![2.5],
            connect_range: 5.0,
            k_values: vec![2],
            include_ppp_reference: true,
            mode: SweepMode::FixedMeanCount,
        };
        let rows = sweep(&spec, Metric::CacheHit, Execution::Sequential).unwrap();
        assert_eq!(rows.len(), 2);
        let p = dense_small_cells().with_cluster_radius(2.5).unwrap();
        assert_eq!(rows[0].value, cache_hit_probability(5.0, 2, &p).unwrap());
        assert_eq!(rows[1].rd, None);
        let ppp = ppp_cdf_contact(5.0, 2, 6e-2, p.dim()).unwrap();
        assert_eq!(rows[1].value, ppp);
    }

    #[test]
    fn fixed_density_mode_grows_clusters() {
        let spec = SweepSpec {
            base: dense_small_cells(),
            rd_grid: vec![1.0, 2.0],
            connect_range: 5.0,
            k_values: vec![1],
            include_ppp_reference: false,
            mode: SweepMode::FixedDaughterDensity,
        };
        let p = spec.params_at(2.0).unwrap();
        assert!((p.daughter_mean() - 8.0).abs() < 1e-12);
        assert!((p.daughter_density() - dense_small_cells().daughter_density()).abs() < 1e-15);
        assert_eq!(
            sweep(&spec, Metric::Connectivity, Execution::default())
                .unwrap()
                .len(),
            2
        );
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let mut spec = SweepSpec {
            base: dense_small_cells(),
            rd_grid: vec![2.0, 1.0],
            connect_range: 5.0,
            k_values: vec![1],
            include_ppp_reference: false,
            mode: SweepMode::default(),
        };
        assert!(sweep(&spec, Metric::Connectivity, Execution::Sequential).is_err());
        spec.rd_grid = vec![1.0];
        spec.k_values = vec![0];
        assert!(sweep(&spec, Metric::Connectivity, Execution::Sequential).is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.05, 50.0, 20).unwrap();
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[19], 50.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
