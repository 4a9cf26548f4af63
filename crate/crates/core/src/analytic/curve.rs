//! Tabulated CDF curves on a radius grid.

use serde::{Deserialize, Serialize};

use super::cdf::{cdf_contact, cdf_nnd, cdf_nnd_small_rd_limit, ppp_cdf_contact};
use super::{check_k, McpParams};
use crate::error::{invalid, Result};
use crate::exec::Execution;

pub const DEFAULT_GRID_POINTS: usize = 512;
/// Auto grids extend until the CDF reaches `1 - DEFAULT_TAIL`.
pub const DEFAULT_TAIL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// kth contact distance of the MCP.
    ContactCd,
    /// kth nearest-neighbour distance of the MCP.
    Nnd,
    /// kth contact distance of a PPP with intensity `lambda_p * m_bar`.
    PppCd,
    /// Nearest-neighbour CDF in the `r_d -> 0` limit.
    NndSmallRdLimit,
}

impl CurveKind {
    pub fn evaluate(self, r: f64, k: usize, p: &McpParams) -> Result<f64> {
        match self {
            CurveKind::ContactCd => cdf_contact(r, k, p),
            CurveKind::Nnd => cdf_nnd(r, k, p),
            CurveKind::PppCd => ppp_cdf_contact(r, k, p.intensity(), p.dim()),
            CurveKind::NndSmallRdLimit => cdf_nnd_small_rd_limit(r, k, p),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CurveKind::ContactCd => "contact_cd",
            CurveKind::Nnd => "nnd",
            CurveKind::PppCd => "ppp_cd",
            CurveKind::NndSmallRdLimit => "nnd_small_rd_limit",
        }
    }

    /// Smallest power-of-two multiple of `r_d` where the CDF reaches
    /// `1 - tail`.
    pub fn support_radius(self, k: usize, p: &McpParams, tail: f64) -> Result<f64> {
        check_k(k)?;
        let mut r = p.cluster_radius();
        for _ in 0..200 {
            if self.evaluate(r, k, p)? >= 1.0 - tail {
                return Ok(r);
            }
            r *= 2.0;
        }
        Err(invalid(format!(
            "{} CDF never reaches 1 - {tail}",
            self.name()
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionCurve {
    radii: Vec<f64>,
    values: Vec<f64>,
    kind: CurveKind,
    k: usize,
    params: McpParams,
}

/// `points` equally spaced radii on `[0, max]`; a single `0` when `max` is 0.
pub fn linear_grid(max: f64, points: usize) -> Vec<f64> {
    if max <= 0.0 || points < 2 {
        return vec![0.0];
    }
    let step = max / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i + 1 == points {
                max
            } else {
                i as f64 * step
            }
        })
        .collect()
}

impl DistributionCurve {
    /// Evaluates the CDF at every radius of a strictly increasing grid.
    ///
    /// Independent quadratures at neighbouring radii can disagree in the last
    /// bits, so the stored values are passed through a running maximum.
    pub fn tabulate(
        kind: CurveKind,
        k: usize,
        params: &McpParams,
        radii: Vec<f64>,
        exec: Execution,
    ) -> Result<Self> {
        check_k(k)?;
        if radii.is_empty() {
            return Err(invalid("curve grid is empty"));
        }
        if radii[0] < 0.0
            || radii
                .windows(2)
                .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(invalid(
                "curve radii must be non-negative and strictly increasing",
            ));
        }
        let raw = exec.map_slice(&radii, |&r| kind.evaluate(r, k, params));
        let mut values = Vec::with_capacity(radii.len());
        let mut running = 0.0f64;
        for v in raw {
            running = running.max(v?);
            values.push(running.min(1.0));
        }
        Ok(DistributionCurve {
            radii,
            values,
            kind,
            k,
            params: *params,
        })
    }

    /// `points` radii from 0 to where the CDF first exceeds `1 - 1e-4`.
    pub fn tabulate_auto(
        kind: CurveKind,
        k: usize,
        params: &McpParams,
        points: usize,
        exec: Execution,
    ) -> Result<Self> {
        let max = kind.support_radius(k, params, DEFAULT_TAIL)?;
        Self::tabulate(kind, k, params, linear_grid(max, points), exec)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn params(&self) -> &McpParams {
        &self.params
    }

    pub fn max_radius(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    /// Linear interpolation; `None` outside `[radii[0], max_radius]`.
    pub fn eval(&self, r: f64) -> Option<f64> {
        let first = self.radii[0];
        if !(r >= first && r <= self.max_radius()) {
            return None;
        }
        let idx = self.radii.partition_point(|&x| x <= r);
        if idx >= self.radii.len() {
            return self.values.last().copied();
        }
        if idx == 0 {
            return Some(self.values[0]);
        }
        let (x0, x1) = (self.radii[idx - 1], self.radii[idx]);
        let (y0, y1) = (self.values[idx - 1], self.values[idx]);
        Some(y0 + (y1 - y0) * (r - x0) / (x1 - x0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_clusters_auto_grid() {
        let p = McpParams::new(2e-5, 50.0, 5.0, 2).unwrap();
        let c = DistributionCurve::tabulate_auto(
            CurveKind::ContactCd,
            1,
            &p,
            DEFAULT_GRID_POINTS,
            Execution::default(),
        )
        .unwrap();
        assert_eq!(c.radii().len(), 512);
        assert!(*c.values().last().unwrap() >= 1.0 - 1e-4);
        assert_eq!(c.values()[0], 0.0);
        assert!(c.values().windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn interpolation() {
        let p = McpParams::new(0.01, 2.0, 2.0, 2).unwrap();
        let c = DistributionCurve::tabulate(
            CurveKind::PppCd,
            1,
            &p,
            vec![0.0, 1.0, 2.0],
            Execution::Sequential,
        )
        .unwrap();
        let mid = c.eval(0.5).unwrap();
        assert!((mid - 0.5 * c.values()[1]).abs() < 1e-15);
        assert_eq!(c.eval(2.0), Some(c.values()[2]));
        assert_eq!(c.eval(2.5), None);
    }

    #[test]
    fn grid_validation() {
        let p = McpParams::new(0.01, 2.0, 2.0, 2).unwrap();
        assert!(DistributionCurve::tabulate(
            CurveKind::PppCd,
            1,
            &p,
            vec![0.0, 0.0],
            Execution::Sequential
        )
        .is_err());
        assert!(DistributionCurve::tabulate(
            CurveKind::PppCd,
            1,
            &p,
            vec![],
            Execution::Sequential
        )
        .is_err());
        assert_eq!(linear_grid(0.0, 512), vec![0.0]);
    }
}
