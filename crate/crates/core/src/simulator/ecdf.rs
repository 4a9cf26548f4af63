use crate::analytic::DistributionCurve;
use crate::error::{Error, Result};

/// Largest censored fraction tolerated by [`ks_distance`].
pub const MAX_CENSORED_FRACTION: f64 = 0.01;

/// Empirical CDF of distance samples, with runs that saw no kth point inside
/// the observation radius counted as censored (larger than every sample).
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted_samples: Vec<f64>,
    censored_count: usize,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>, censored_count: usize) -> Self {
        samples.sort_by(f64::total_cmp);
        EmpiricalCdf {
            sorted_samples: samples,
            censored_count,
        }
    }

    pub fn sorted_samples(&self) -> &[f64] {
        &self.sorted_samples
    }

    pub fn censored_count(&self) -> usize {
        self.censored_count
    }

    pub fn total(&self) -> usize {
        self.sorted_samples.len() + self.censored_count
    }

    pub fn censored_fraction(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            self.censored_count as f64 / self.total() as f64
        }
    }

    /// `#{samples <= r} / total`.
    pub fn eval(&self, r: f64) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        self.sorted_samples.partition_point(|&x| x <= r) as f64 / self.total() as f64
    }
}

/// `sup |F̂ - F|` over the sample points, checking both sides of every jump.
/// `cdf_left` is the left limit of `cdf`; pass `cdf` twice for continuous
/// distributions.
pub fn ks_statistic<F, L>(ecdf: &EmpiricalCdf, cdf: F, cdf_left: L) -> f64
where
    F: Fn(f64) -> f64,
    L: Fn(f64) -> f64,
{
    let total = ecdf.total() as f64;
    let xs = &ecdf.sorted_samples;
    let mut sup = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let below = i as f64 / total;
        let at = j as f64 / total;
        sup = sup
            .max((at - cdf(x)).abs())
            .max((cdf_left(x) - below).abs());
        i = j;
    }
    sup
}

/// KS distance between an empirical CDF and a tabulated analytic curve.
pub fn ks_distance(ecdf: &EmpiricalCdf, curve: &DistributionCurve) -> Result<f64> {
    if ecdf.censored_fraction() > MAX_CENSORED_FRACTION {
        return Err(Error::ExcessiveCensoring {
            censored: ecdf.censored_count,
            total: ecdf.total(),
        });
    }
    if let Some(&last) = ecdf.sorted_samples.last() {
        if last > curve.max_radius() || ecdf.sorted_samples[0] < curve.radii()[0] {
            return Err(Error::CurveCoverage {
                curve_max: curve.max_radius(),
                sample_max: last,
            });
        }
    }
    let f = |r: f64| curve.eval(r).expect("sample inside curve range");
    Ok(ks_statistic(ecdf, f, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{CurveKind, McpParams};
    use crate::exec::Execution;
    use crate::simulator::run_rng;
    use rand::Rng;

    #[test]
    fn step_against_itself() {
        let e = EmpiricalCdf::new(vec![1.0, 2.0, 2.0, 4.0], 0);
        let same = e.clone();
        let left = |r: f64| same.sorted_samples().partition_point(|&x| x < r) as f64 / 4.0;
        assert_eq!(ks_statistic(&e, |r| same.eval(r), left), 0.0);
    }

    #[test]
    fn degenerate_point_mass() {
        let e = EmpiricalCdf::new(vec![5.0; 100], 0);
        let step = |r: f64| if r >= 5.0 { 1.0 } else { 0.0 };
        let step_left = |r: f64| if r > 5.0 { 1.0 } else { 0.0 };
        assert_eq!(ks_statistic(&e, step, step_left), 0.0);
    }

    #[test]
    fn censoring_and_coverage_errors() {
        let p = McpParams::new(0.01, 2.0, 2.0, 2).unwrap();
        let curve = DistributionCurve::tabulate(
            CurveKind::PppCd,
            1,
            &p,
            vec![0.0, 1.0, 2.0],
            Execution::Sequential,
        )
        .unwrap();
        let e = EmpiricalCdf::new(vec![0.5; 98], 2);
        assert!(matches!(
            ks_distance(&e, &curve),
            Err(Error::ExcessiveCensoring { .. })
        ));
        let e = EmpiricalCdf::new(vec![0.5, 3.0], 0);
        assert!(matches!(
            ks_distance(&e, &curve),
            Err(Error::CurveCoverage { .. })
        ));
    }

    #[test]
    fn inverse_sampled_curve_is_close() {
        // DKW: P[KS > 0.01] <= 2 exp(-2 * 1e5 * 1e-4) ~ 4e-9
        let p = McpParams::new(2e-5, 50.0, 5.0, 2).unwrap();
        let curve = DistributionCurve::tabulate_auto(
            CurveKind::ContactCd,
            2,
            &p,
            2048,
            Execution::default(),
        )
        .unwrap();
        let mut rng = run_rng(5, 0);
        let radii = curve.radii();
        let values = curve.values();
        let top = *values.last().unwrap();
        let mut samples = Vec::new();
        let mut censored = 0;
        for _ in 0..100_000 {
            let u: f64 = rng.random();
            if u > top {
                censored += 1;
                continue;
            }
            let idx = values.partition_point(|&v| v < u).max(1);
            let (x0, x1, y0, y1) = (radii[idx - 1], radii[idx], values[idx - 1], values[idx]);
            let r = if y1 > y0 {
                x0 + (u - y0) / (y1 - y0) * (x1 - x0)
            } else {
                x1
            };
            samples.push(r);
        }
        let e = EmpiricalCdf::new(samples, censored);
        let ks = ks_distance(&e, &curve).unwrap();
        assert!(ks <= 0.01, "{ks}");
    }
}
