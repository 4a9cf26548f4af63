use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::SimConfig;
use crate::geometry::{ball_volume, Dimension};

/// Points in R^n stored contiguously.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSample {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSample {
    pub fn new(dim: Dimension) -> Self {
        PointSample {
            dim: dim.get() as usize,
            coords: Vec::new(),
        }
    }

    pub fn from_points(dim: Dimension, points: &[Vec<f64>]) -> Self {
        let mut s = PointSample::new(dim);
        for p in points {
            assert_eq!(p.len(), s.dim, "point dimension mismatch");
            s.coords.extend_from_slice(p);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim.max(1))
    }

    pub fn norms(&self) -> impl Iterator<Item = f64> + '_ {
        self.points()
            .map(|p| p.iter().map(|c| c * c).sum::<f64>().sqrt())
    }

    /// Number of points in the closed ball `B(o, r)`.
    pub fn count_within(&self, r: f64) -> usize {
        self.norms().filter(|&d| d <= r).count()
    }
}

/// Generator for run `run` of the experiment seeded with `seed`.
pub fn run_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

fn push_uniform_ball<R: Rng + ?Sized>(
    dim: usize,
    center: &[f64],
    radius: f64,
    rng: &mut R,
    out: &mut Vec<f64>,
) {
    let start = out.len();
    loop {
        out.truncate(start);
        let mut norm2 = 0.0;
        for _ in 0..dim {
            let z: f64 = rng.sample(StandardNormal);
            norm2 += z * z;
            out.push(z);
        }
        if norm2 > 0.0 {
            let u: f64 = rng.random();
            let scale = radius * u.powf(1.0 / dim as f64) / norm2.sqrt();
            for (c, o) in out[start..].iter_mut().zip(center) {
                *c = *c * scale + o;
            }
            return;
        }
    }
}

/// Uniform point in the n-ball of radius `radius` about the origin.
pub fn sample_uniform_ball<R: Rng + ?Sized>(n: Dimension, radius: f64, rng: &mut R) -> Vec<f64> {
    let dim = n.get() as usize;
    let mut out = Vec::with_capacity(dim);
    push_uniform_ball(dim, &vec![0.0; dim], radius, rng, &mut out);
    out
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("finite positive Poisson mean");
    let v: f64 = d.sample(rng);
    v as u64
}

fn push_cluster<R: Rng + ?Sized>(cfg: &SimConfig, center: &[f64], rng: &mut R, out: &mut Vec<f64>) {
    let p = &cfg.params;
    let dim = center.len();
    let daughters = poisson_count(p.daughter_mean(), rng);
    for _ in 0..daughters {
        push_uniform_ball(dim, center, p.cluster_radius(), rng, out);
    }
}

/// Stationary MCP restricted to what can fall within the observation radius.
///
/// Parents are a Poisson process in the ball of radius
/// `observation_radius + r_d`; only daughters are returned.
pub fn sample_mcp<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> PointSample {
    let p = &cfg.params;
    let n = p.dim();
    let dim = n.get() as usize;
    let window = cfg.parent_window();
    let parents = poisson_count(p.lambda_p() * ball_volume(n, window), rng);
    let mut sample = PointSample::new(n);
    let origin = vec![0.0; dim];
    let mut parent = Vec::with_capacity(dim);
    for _ in 0..parents {
        parent.clear();
        push_uniform_ball(dim, &origin, window, rng, &mut parent);
        push_cluster(cfg, &parent, rng, &mut sample.coords);
    }
    sample
}

/// Reduced Palm MCP seen from a typical point at the origin: an independent
/// stationary sample plus the typical point's siblings. The typical point
/// itself is not included.
pub fn sample_mcp_palm<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> PointSample {
    let mut sample = sample_mcp(cfg, rng);
    let p = &cfg.params;
    let offset = sample_uniform_ball(p.dim(), p.cluster_radius(), rng);
    let center: Vec<f64> = offset.iter().map(|c| -c).collect();
    push_cluster(cfg, &center, rng, &mut sample.coords);
    sample
}

/// Distances to the `max_k` closest points, ascending; `None` where the
/// sample has fewer points.
pub fn kth_distances(sample: &PointSample, max_k: usize) -> Vec<Option<f64>> {
    let mut d: Vec<f64> = sample.norms().collect();
    let take = max_k.min(d.len());
    if take > 0 && take < d.len() {
        d.select_nth_unstable_by(take - 1, f64::total_cmp);
    }
    let mut head: Vec<f64> = d.into_iter().take(take).collect();
    head.sort_by(f64::total_cmp);
    let mut out: Vec<Option<f64>> = head.into_iter().map(Some).collect();
    out.resize(max_k, None);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{q_weight, McpParams};

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn uniform_ball_support_and_symmetry() {
        let mut rng = run_rng(1, 0);
        let mut sum = 0.0;
        for _ in 0..100_000 {
            let p = sample_uniform_ball(dim(1), 2.0, &mut rng);
            assert!(p[0].abs() <= 2.0);
            sum += p[0];
        }
        assert!((sum / 100_000.0).abs() <= 0.01 * 2.0);
        for n in 2..=5 {
            for _ in 0..1000 {
                let p = sample_uniform_ball(dim(n), 3.0, &mut rng);
                assert!(p.iter().map(|c| c * c).sum::<f64>().sqrt() <= 3.0);
            }
        }
    }

    #[test]
    fn uniform_disk_area_fraction() {
        let mut rng = run_rng(2, 0);
        let inner = (0..100_000)
            .filter(|_| {
                let p = sample_uniform_ball(dim(2), 1.0, &mut rng);
                p[0] * p[0] + p[1] * p[1] <= 0.25
            })
            .count();
        let frac = inner as f64 / 1e5;
        assert!((frac - 0.25).abs() <= 0.005, "{frac}");
    }

    #[test]
    fn kth_distance_examples() {
        let empty = PointSample::new(dim(2));
        assert_eq!(kth_distances(&empty, 3), vec![None, None, None]);
        let s = PointSample::from_points(dim(2), &[vec![3.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(kth_distances(&s, 3), vec![Some(1.0), Some(3.0), None]);
    }

    #[test]
    fn kth_distances_match_full_sort() {
        let p = McpParams::new(0.05, 2.0, 4.0, 3).unwrap();
        let cfg = SimConfig::new(p, 6.0, 1, 9, 7).unwrap();
        for run in 0..50 {
            let s = sample_mcp(&cfg, &mut run_rng(9, run));
            let mut all: Vec<f64> = s.norms().collect();
            all.sort_by(f64::total_cmp);
            let got = kth_distances(&s, 7);
            for (i, g) in got.iter().enumerate() {
                assert_eq!(*g, all.get(i).copied());
            }
        }
    }

    #[test]
    fn no_parents_gives_empty_samples() {
        let p = McpParams::new(1e-300, 1.0, 5.0, 2).unwrap();
        let cfg = SimConfig::new(p, 10.0, 1, 0, 1).unwrap();
        let mut rng = run_rng(0, 0);
        assert!((0..1000).all(|_| sample_mcp(&cfg, &mut rng).is_empty()));
        let lone = McpParams::new(1e-300, 1.0, 1e-8, 2).unwrap();
        let cfg = SimConfig::new(lone, 10.0, 1, 0, 1).unwrap();
        assert!((0..1000).all(|_| sample_mcp_palm(&cfg, &mut rng).is_empty()));
    }

    #[test]
    fn mean_point_count() {
        let p = McpParams::new(0.02, 2.0, 3.0, 2).unwrap();
        let cfg = SimConfig::new(p, 5.0, 1, 0, 1).unwrap();
        let runs = 10_000;
        let counts: Vec<f64> = (0..runs)
            .map(|i| sample_mcp(&cfg, &mut run_rng(3, i)).len() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / runs as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
        let want = 0.02 * ball_volume(dim(2), 7.0) * 3.0;
        assert!(
            (mean - want).abs() <= 3.0 * (var / runs as f64).sqrt(),
            "{mean} vs {want}"
        );
    }

    #[test]
    fn palm_siblings() {
        // no other clusters: every point is a sibling of the typical point
        let p = McpParams::new(1e-300, 2.0, 1.5, 2).unwrap();
        let cfg = SimConfig::new(p, 4.0, 1, 0, 1).unwrap();
        let runs = 100_000u64;
        let r = 1.5;
        let mut total = 0usize;
        let mut none_within = 0usize;
        for i in 0..runs {
            let s = sample_mcp_palm(&cfg, &mut run_rng(4, i));
            total += s.len();
            if s.count_within(r) == 0 {
                none_within += 1;
            }
        }
        let mean = total as f64 / runs as f64;
        assert!(
            (mean - 1.5).abs() <= 3.0 * (1.5 / runs as f64).sqrt(),
            "{mean}"
        );
        let q0 = q_weight(r, 0, &p).unwrap();
        let frac = none_within as f64 / runs as f64;
        let se = (q0 * (1.0 - q0) / runs as f64).sqrt();
        assert!((frac - q0).abs() <= 3.0 * se, "{frac} vs {q0}");
    }

    #[test]
    fn reproducible_streams() {
        let p = McpParams::new(0.02, 2.0, 3.0, 2).unwrap();
        let cfg = SimConfig::new(p, 5.0, 1, 0, 3).unwrap();
        let a = sample_mcp_palm(&cfg, &mut run_rng(77, 5));
        let b = sample_mcp_palm(&cfg, &mut run_rng(77, 5));
        assert_eq!(a, b);
        let c = sample_mcp_palm(&cfg, &mut run_rng(77, 6));
        assert_ne!(a, c);
    }
}
