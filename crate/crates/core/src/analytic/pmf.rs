//! PMF of the in-ball count, stationary and reduced Palm.

use serde::Serialize;

use super::partitions::enumerate_partitions;
use super::pgf::{h_coefficients, q_weights, HCoefficients};
use super::{check_radius, McpParams};
use crate::error::{invalid, Error, Result};

/// Below this log void probability the recurrence runs on scaled ratios.
const LOG_SPACE_THRESHOLD: f64 = -700.0;
const TAIL_RATIO: f64 = 1e-14;
const TAIL_RUN: usize = 5;
const MAX_ADAPTIVE_ORDER: usize = 1 << 16;

/// `probs[m] = P[N = m]` for `m = 0..=m_max`, plus the mass beyond `m_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PmfVector {
    probs: Vec<f64>,
    truncation_mass: f64,
}

impl PmfVector {
    pub fn from_probs(probs: Vec<f64>) -> Self {
        let total: f64 = probs.iter().sum();
        PmfVector {
            probs,
            truncation_mass: 1.0 - total,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    pub fn max_order(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn get(&self, m: usize) -> f64 {
        self.probs.get(m).copied().unwrap_or(0.0)
    }

    /// `P[N < k]`.
    pub fn lower_mass(&self, k: usize) -> f64 {
        self.probs.iter().take(k).sum()
    }

    /// `sum_m probs[m] s^m` over the stored range.
    pub fn truncated_pgf(&self, s: f64) -> f64 {
        self.probs.iter().rev().fold(0.0, |acc, p| acc * s + p)
    }

    fn truncate(mut self, m_max: usize) -> Self {
        self.probs.truncate(m_max + 1);
        PmfVector::from_probs(self.probs)
    }
}

/// Power-series recurrence for `P = exp(g)`: `m p_m = sum_{j=1}^m j h_j p_{m-j}`.
/// Returns `ln p_m`.
fn log_pmf_recurrence(log_p0: f64, h: &[f64], m_max: usize) -> Vec<f64> {
    debug_assert!(h.len() > m_max);
    if log_p0 >= LOG_SPACE_THRESHOLD {
        let mut p = Vec::with_capacity(m_max + 1);
        p.push(log_p0.exp());
        for m in 1..=m_max {
            let s: f64 = (1..=m).map(|j| j as f64 * h[j] * p[m - j]).sum();
            p.push(s / m as f64);
        }
        return p.into_iter().map(f64::ln).collect();
    }
    // ratios t_m = p_m / p_0, rescaled whenever they grow large
    const CAP: f64 = 1e280;
    let ln_cap = CAP.ln();
    let mut t: Vec<f64> = Vec::with_capacity(m_max + 1);
    let mut offset = 0.0;
    t.push(1.0);
    for m in 1..=m_max {
        let s: f64 = (1..=m).map(|j| j as f64 * h[j] * t[m - j]).sum();
        let v = s / m as f64;
        t.push(v);
        if v > CAP {
            t.iter_mut().for_each(|x| *x /= CAP);
            offset += ln_cap;
        }
    }
    t.iter().map(|x| log_p0 + offset + x.ln()).collect()
}

fn pmf_from_logs(logs: &[f64]) -> PmfVector {
    PmfVector::from_probs(logs.iter().map(|l| l.exp()).collect())
}

/// PMF up to `m_max` from precomputed coefficients (needs order `>= m_max`).
pub fn count_pmf_from(h: &HCoefficients, m_max: usize) -> Result<PmfVector> {
    if h.max_order() < m_max {
        return Err(invalid(format!(
            "coefficients reach order {} but the PMF needs {m_max}",
            h.max_order()
        )));
    }
    Ok(pmf_from_logs(&log_pmf_recurrence(
        h.log_void(),
        h.series(),
        m_max,
    )))
}

/// `P[N = m]` for `m = 0..=m_max`, `N = Phi(B(o, r))`.
pub fn count_pmf(r: f64, p: &McpParams, m_max: usize) -> Result<PmfVector> {
    check_radius(r)?;
    count_pmf_from(&h_coefficients(r, p, m_max)?, m_max)
}

/// Faà di Bruno form: `p_m = e^{g(0)} sum_{B_m} prod h_i^{b_i} / b_i!`.
///
/// Kept as an independent route to the recurrence; it does not switch to log
/// space and reports [`Error::Underflow`] instead.
pub fn count_pmf_partition_sum(h: &HCoefficients, m_max: usize) -> Result<PmfVector> {
    if h.max_order() < m_max {
        return Err(invalid("coefficient order below the requested PMF order"));
    }
    let log_p0 = h.log_void();
    if log_p0 < f64::MIN_POSITIVE.ln() {
        return Err(Error::Underflow { log_p0 });
    }
    let p0 = log_p0.exp();
    let series = h.series();
    let probs = (0..=m_max)
        .map(|m| {
            let sum: f64 = enumerate_partitions(m)
                .iter()
                .map(|t| t.weighted_product(series))
                .sum();
            p0 * sum
        })
        .collect();
    Ok(PmfVector::from_probs(probs))
}

fn mean_count(r: f64, p: &McpParams) -> f64 {
    p.intensity() * p.unit_volume() * r.powi(p.dim().get() as i32)
}

fn initial_order(mean: f64, mbar: f64) -> usize {
    let spread = (mean * (1.0 + mbar)).sqrt();
    (mean + 12.0 * spread + 4.0 * mbar + 30.0).ceil() as usize
}

/// First `m` past `mean` where `TAIL_RUN` consecutive terms sat below
/// `TAIL_RATIO` times the running maximum.
fn tail_stop(logs: &[f64], mean: f64) -> Option<usize> {
    let ln_ratio = TAIL_RATIO.ln();
    let mut max = f64::NEG_INFINITY;
    let mut run = 0;
    for (m, &l) in logs.iter().enumerate() {
        max = max.max(l);
        if l < max + ln_ratio {
            run += 1;
            if run >= TAIL_RUN && m as f64 > mean {
                return Some(m);
            }
        } else {
            run = 0;
        }
    }
    None
}

/// Count PMF truncated where the tail becomes negligible.
pub fn count_pmf_adaptive(r: f64, p: &McpParams) -> Result<PmfVector> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(PmfVector::from_probs(vec![1.0]));
    }
    let mean = mean_count(r, p);
    let mut order = initial_order(mean, p.daughter_mean());
    loop {
        let h = h_coefficients(r, p, order)?;
        let logs = log_pmf_recurrence(h.log_void(), h.series(), order);
        if let Some(stop) = tail_stop(&logs, mean) {
            return Ok(pmf_from_logs(&logs[..=stop]));
        }
        order *= 2;
        if order > MAX_ADAPTIVE_ORDER {
            return Err(invalid(format!(
                "count PMF at r = {r} needs more than {MAX_ADAPTIVE_ORDER} terms"
            )));
        }
    }
}

fn convolve(a: &[f64], b: &[f64], m_max: usize) -> Vec<f64> {
    (0..=m_max)
        .map(|m| (0..=m).map(|i| a[i] * b[m - i]).sum())
        .collect()
}

/// Reduced Palm PMF: `P^{!o}[N = m] = sum_i P[N = i] q_{m-i}(r)`.
pub fn palm_count_pmf(r: f64, p: &McpParams, m_max: usize) -> Result<PmfVector> {
    check_radius(r)?;
    let counts = count_pmf(r, p, m_max)?;
    let q = q_weights(r, p, m_max)?;
    Ok(PmfVector::from_probs(convolve(counts.probs(), &q, m_max)))
}

pub fn palm_count_pmf_adaptive(r: f64, p: &McpParams) -> Result<PmfVector> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(PmfVector::from_probs(vec![1.0]));
    }
    let mbar = p.daughter_mean();
    let mean = mean_count(r, p) + mbar;
    let mut order = initial_order(mean, mbar);
    loop {
        let full = palm_count_pmf(r, p, order)?;
        let logs: Vec<f64> = full.probs().iter().map(|v| v.ln()).collect();
        if let Some(stop) = tail_stop(&logs, mean) {
            return Ok(full.truncate(stop));
        }
        order *= 2;
        if order > MAX_ADAPTIVE_ORDER {
            return Err(invalid(format!(
                "Palm PMF at r = {r} needs more than {MAX_ADAPTIVE_ORDER} terms"
            )));
        }
    }
}

/// `q_0(r), q_1(r), ...` truncated by the same tail rule as the PMFs.
pub fn q_weights_adaptive(r: f64, p: &McpParams) -> Result<Vec<f64>> {
    check_radius(r)?;
    let mbar = p.daughter_mean();
    let mut order = initial_order(mbar, 0.0);
    loop {
        let q = q_weights(r, p, order)?;
        let logs: Vec<f64> = q.iter().map(|v| v.ln()).collect();
        if let Some(stop) = tail_stop(&logs, mbar) {
            return Ok(q[..=stop].to_vec());
        }
        order *= 2;
        if order > MAX_ADAPTIVE_ORDER {
            return Err(invalid(format!(
                "q weights at r = {r} need more than {MAX_ADAPTIVE_ORDER} terms"
            )));
        }
    }
}
