//! CDFs of the kth contact distance `R_k` and kth nearest-neighbour distance
//! `R'_k`.

use super::pgf::{h_coefficients, q_weights, HCoefficients};
use super::pmf::count_pmf_from;
use super::{check_k, check_radius, poisson_terms, McpParams};
use crate::error::{invalid, Result};
use crate::geometry::{ball_volume, Dimension};

/// `[F̄_{R_1}(r), ..., F̄_{R_k}(r)]` where `F̄_{R_i}(r) = P[N <= i - 1]`.
pub fn contact_ccdfs_from(h: &HCoefficients, k: usize) -> Result<Vec<f64>> {
    check_k(k)?;
    let pmf = count_pmf_from(h, k - 1)?;
    let mut acc = 0.0;
    Ok(pmf
        .probs()
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect())
}

/// `F_{R_k}(r) = 1 - sum_{m<k} P[N = m]` from precomputed coefficients.
pub fn cdf_contact_from(h: &HCoefficients, k: usize) -> Result<f64> {
    let ccdf = contact_ccdfs_from(h, k)?;
    Ok((1.0 - ccdf[k - 1]).clamp(0.0, 1.0))
}

/// CDF of the kth contact distance at `r`.
pub fn cdf_contact(r: f64, k: usize, p: &McpParams) -> Result<f64> {
    check_radius(r)?;
    check_k(k)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    cdf_contact_from(&h_coefficients(r, p, k - 1)?, k)
}

/// `F_{R'_k}(r) = 1 - sum_{i=1}^k q_{k-i}(r) F̄_{R_i}(r)`.
pub fn cdf_nnd_from(h: &HCoefficients, q: &[f64], k: usize) -> Result<f64> {
    check_k(k)?;
    if q.len() < k {
        return Err(invalid(format!(
            "need q_0..q_{} but got {} weights",
            k - 1,
            q.len()
        )));
    }
    let ccdf = contact_ccdfs_from(h, k)?;
    let tail: f64 = (1..=k).map(|i| q[k - i] * ccdf[i - 1]).sum();
    Ok((1.0 - tail).clamp(0.0, 1.0))
}

/// CDF of the kth nearest-neighbour distance at `r`.
pub fn cdf_nnd(r: f64, k: usize, p: &McpParams) -> Result<f64> {
    check_radius(r)?;
    check_k(k)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let h = h_coefficients(r, p, k - 1)?;
    let q = q_weights(r, p, k - 1)?;
    cdf_nnd_from(&h, &q, k)
}

/// Nearest-neighbour CDF with the intra-cluster weights replaced by their
/// `r_d -> 0` limit, Poisson(`m_bar`):
/// `1 - e^{-m_bar} sum_{i=1}^k m_bar^{k-i} F̄_{R_i}(r) / (k-i)!`.
///
/// At `r = 0` this keeps the atom `P[Poisson(m_bar) >= k]` from co-located
/// siblings.
pub fn cdf_nnd_small_rd_limit(r: f64, k: usize, p: &McpParams) -> Result<f64> {
    check_radius(r)?;
    check_k(k)?;
    let ccdf = if r == 0.0 {
        vec![1.0; k]
    } else {
        contact_ccdfs_from(&h_coefficients(r, p, k - 1)?, k)?
    };
    let mut weights = vec![0.0; k];
    poisson_terms(p.daughter_mean(), &mut weights);
    let tail: f64 = (1..=k).map(|i| weights[k - i] * ccdf[i - 1]).sum();
    Ok((1.0 - tail).clamp(0.0, 1.0))
}

/// kth contact-distance CDF of a homogeneous PPP of intensity `lambda`.
pub fn ppp_cdf_contact(r: f64, k: usize, lambda: f64, n: Dimension) -> Result<f64> {
    check_radius(r)?;
    check_k(k)?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(invalid(format!(
            "PPP intensity must be positive, got {lambda}"
        )));
    }
    let mu = lambda * ball_volume(n, r);
    let mut terms = vec![0.0; k];
    poisson_terms(mu, &mut terms);
    let lower: f64 = terms.iter().sum();
    Ok((1.0 - lower).clamp(0.0, 1.0))
}
