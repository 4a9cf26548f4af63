//! Analytic distributions of the Matérn cluster process.
//!
//! Everything is driven by the PGF of `N`, the number of process points in
//! `B(o, r)`. Its exponent `g(s)` is a power series whose coefficients
//! `h_k(r)` are one-dimensional integrals of the lens volume, so the PMF of
//! `N` follows from `P = exp(g)` by the recurrence `m p_m = sum j h_j p_{m-j}`.
//! Under the reduced Palm distribution the PGF gains a factor whose
//! coefficients are the intra-cluster weights `q_j(r)`.

mod cdf;
mod curve;
mod partitions;
mod pgf;
mod pmf;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{ball_volume, unit_ball_volume, Dimension};

pub use cdf::{
    cdf_contact, cdf_contact_from, cdf_nnd, cdf_nnd_from, cdf_nnd_small_rd_limit,
    contact_ccdfs_from, ppp_cdf_contact,
};
pub use curve::{linear_grid, CurveKind, DistributionCurve, DEFAULT_GRID_POINTS, DEFAULT_TAIL};
pub use partitions::{enumerate_partitions, PartitionTuple};
pub use pgf::{
    h_coefficient, h_coefficients, palm_factor, pgf_count, pgf_count_palm, pgf_exponent,
    pgf_exponent_1d_closed_form, q_weight, q_weights, HCoefficients,
};
pub use pmf::{
    count_pmf, count_pmf_adaptive, count_pmf_from, count_pmf_partition_sum, palm_count_pmf,
    palm_count_pmf_adaptive, q_weights_adaptive, PmfVector,
};

/// Parameters of an n-dimensional Matérn cluster process.
///
/// Parents form a homogeneous PPP of intensity `lambda_p`; each parent has a
/// Poisson(`daughter_mean`) number of daughters uniform in the ball of radius
/// `cluster_radius` around it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McpParams {
    lambda_p: f64,
    cluster_radius: f64,
    daughter_mean: f64,
    dim: Dimension,
}

impl McpParams {
    pub fn new(lambda_p: f64, cluster_radius: f64, daughter_mean: f64, n: u32) -> Result<Self> {
        let dim = Dimension::new(n)?;
        for (name, v) in [
            ("lambda_p", lambda_p),
            ("cluster radius", cluster_radius),
            ("daughter mean", daughter_mean),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(McpParams {
            lambda_p,
            cluster_radius,
            daughter_mean,
            dim,
        })
    }

    /// Parameterizes by the daughter intensity `lambda_d` instead of the mean
    /// cluster size.
    pub fn from_daughter_density(
        lambda_p: f64,
        cluster_radius: f64,
        lambda_d: f64,
        n: u32,
    ) -> Result<Self> {
        let dim = Dimension::new(n)?;
        McpParams::new(
            lambda_p,
            cluster_radius,
            lambda_d * ball_volume(dim, cluster_radius),
            n,
        )
    }

    /// Same parents and mean cluster size, different cluster radius.
    pub fn with_cluster_radius(&self, cluster_radius: f64) -> Result<Self> {
        McpParams::new(
            self.lambda_p,
            cluster_radius,
            self.daughter_mean,
            self.dim.get(),
        )
    }

    pub fn with_lambda_p(&self, lambda_p: f64) -> Result<Self> {
        McpParams::new(
            lambda_p,
            self.cluster_radius,
            self.daughter_mean,
            self.dim.get(),
        )
    }

    pub fn lambda_p(&self) -> f64 {
        self.lambda_p
    }

    pub fn cluster_radius(&self) -> f64 {
        self.cluster_radius
    }

    pub fn daughter_mean(&self) -> f64 {
        self.daughter_mean
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// `lambda_d = m_bar / (v_n r_d^n)`.
    pub fn daughter_density(&self) -> f64 {
        self.daughter_mean / ball_volume(self.dim, self.cluster_radius)
    }

    /// Intensity of the whole process, `lambda_p * m_bar`.
    pub fn intensity(&self) -> f64 {
        self.lambda_p * self.daughter_mean
    }

    pub(crate) fn unit_volume(&self) -> f64 {
        unit_ball_volume(self.dim)
    }
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(invalid(format!(
            "radius must be finite and non-negative, got {r}"
        )));
    }
    Ok(())
}

pub(crate) fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    Ok(())
}

/// Poisson probabilities `e^{-a} a^j / j!` for `j = 0..out.len()`, built
/// incrementally so that large `j` never forms `a^j` or `j!`.
pub(crate) fn poisson_terms(a: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    if a <= 0.0 {
        out[0] = 1.0;
        out[1..].iter_mut().for_each(|t| *t = 0.0);
        return;
    }
    if a < 700.0 {
        let mut t = (-a).exp();
        out[0] = t;
        for (j, slot) in out.iter_mut().enumerate().skip(1) {
            t *= a / j as f64;
            *slot = t;
        }
    } else {
        let ln_a = a.ln();
        let mut ln_t = -a;
        out[0] = ln_t.exp();
        for (j, slot) in out.iter_mut().enumerate().skip(1) {
            ln_t += ln_a - (j as f64).ln();
            *slot = ln_t.exp();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(McpParams::new(0.0, 1.0, 1.0, 2).is_err());
        assert!(McpParams::new(1.0, -1.0, 1.0, 2).is_err());
        assert!(McpParams::new(1.0, 1.0, f64::INFINITY, 2).is_err());
        assert!(McpParams::new(1.0, 1.0, 1.0, 0).is_err());
        let p = McpParams::new(2e-5, 50.0, 5.0, 2).unwrap();
        let ld = p.daughter_density();
        assert!((ld - 5.0 / (std::f64::consts::PI * 2500.0)).abs() < 1e-15);
        let q = McpParams::from_daughter_density(2e-5, 50.0, ld, 2).unwrap();
        assert!((q.daughter_mean() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_terms_sum_to_one() {
        for &a in &[0.0, 1e-9, 0.5, 5.0, 80.0, 750.0] {
            let mut t = vec![0.0; 2000];
            poisson_terms(a, &mut t);
            let s: f64 = t.iter().sum();
            assert!((s - 1.0).abs() < 1e-9, "a={a} sum={s}");
        }
    }
}
