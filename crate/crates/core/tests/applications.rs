use mcpdist::analytic::ppp_cdf_contact;
use mcpdist::apps::{
    cache_hit_probability, connectivity_probability, log_grid, sweep, Metric, SweepMode, SweepSpec,
};
use mcpdist::{Execution, McpParams};

fn spec(lambda_p: f64, mode: SweepMode) -> SweepSpec {
    SweepSpec {
        base: McpParams::new(lambda_p, 5.0, 2.0, 2).unwrap(),
        rd_grid: log_grid(0.05, 500.0, 12).unwrap(),
        connect_range: 5.0,
        k_values: vec![1, 2, 3, 4],
        include_ppp_reference: true,
        mode,
    }
}

#[test]
fn cache_hit_dominates_connectivity() {
    for lambda_p in [4.5e-2, 3.5e-2, 2e-2] {
        for rd in log_grid(0.05, 500.0, 9).unwrap() {
            let p = McpParams::new(lambda_p, rd, 2.0, 2).unwrap();
            for k in 1..=4 {
                let c = connectivity_probability(5.0, k, &p).unwrap();
                let f = cache_hit_probability(5.0, k, &p).unwrap();
                assert!(
                    f + 1e-10 >= c,
                    "lambda_p {lambda_p}, rd {rd}, k {k}: {f} < {c}"
                );
            }
        }
    }
}

#[test]
fn sweep_rows_are_ordered_and_match_point_calls() {
    let s = spec(1.3e-2, SweepMode::FixedMeanCount);
    let rows = sweep(&s, Metric::Connectivity, Execution::default()).unwrap();
    assert_eq!(rows.len(), 12 * 4 + 4);
    for (i, row) in rows[..48].iter().enumerate() {
        assert_eq!(row.rd, Some(s.rd_grid[i / 4]));
        assert_eq!(row.k, i % 4 + 1);
        let p = s.base.with_cluster_radius(s.rd_grid[i / 4]).unwrap();
        assert_eq!(row.value, connectivity_probability(5.0, row.k, &p).unwrap());
    }
    for row in &rows[48..] {
        assert_eq!(row.rd, None);
        let ppp = ppp_cdf_contact(5.0, row.k, 1.3e-2 * 2.0, s.base.dim()).unwrap();
        assert_eq!(row.value, ppp);
    }
}

#[test]
fn fixed_daughter_density_grows_the_cluster_size() {
    let s = spec(1.3e-2, SweepMode::FixedDaughterDensity);
    let rows = sweep(&s, Metric::Connectivity, Execution::default()).unwrap();
    // more daughters per parent as r_d grows, so coverage keeps improving
    let k1: Vec<f64> = rows
        .iter()
        .filter(|r| r.k == 1 && r.rd.is_some())
        .map(|r| r.value)
        .collect();
    assert!(k1.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{k1:?}");
    assert!(k1.last().unwrap() > &0.999);
}

#[test]
fn sequential_and_parallel_sweeps_agree() {
    let s = spec(3e-2, SweepMode::FixedMeanCount);
    let a = sweep(&s, Metric::CacheHit, Execution::Sequential).unwrap();
    let b = sweep(&s, Metric::CacheHit, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}
