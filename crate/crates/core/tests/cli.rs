use std::process::{Command, Output};

use mcpdist::analytic::{linear_grid, CurveKind, DistributionCurve};
use mcpdist::{Execution, McpParams};

const SPARSE: [&str; 8] = [
    "--n",
    "2",
    "--lambda-p",
    "2e-5",
    "--mbar",
    "5",
    "--rd",
    "50",
];

fn mcpdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcpdist"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn with_sparse<'a>(head: &[&'a str]) -> Vec<&'a str> {
    head.iter().copied().chain(SPARSE).collect()
}

#[test]
fn cdf_default_grid_reaches_the_tail() {
    let text = stdout(&mcpdist(&with_sparse(&["cdf", "--kind", "cd", "--k", "1"])));
    assert!(text.starts_with("# mcpdist cdf"));
    assert!(text.ends_with('\n'));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 512);
    let last: f64 = rows.last().unwrap()[2].parse().unwrap();
    assert!(last >= 1.0 - 1e-4, "{last}");
}

#[test]
fn cdf_zero_grid_is_a_single_row() {
    let text = stdout(&mcpdist(&with_sparse(&[
        "cdf",
        "--k",
        "1",
        "--grid-max",
        "0",
    ])));
    assert_eq!(data_rows(&text), vec![vec!["0", "1", "0"]]);
}

#[test]
fn cdf_rows_equal_library_values() {
    let text = stdout(&mcpdist(&with_sparse(&[
        "cdf",
        "--kind",
        "nnd",
        "--k",
        "1,3",
        "--grid-max",
        "250",
        "--grid-points",
        "40",
    ])));
    let p = McpParams::new(2e-5, 50.0, 5.0, 2).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 80);
    for (chunk, k) in rows.chunks(40).zip([1usize, 3]) {
        let curve = DistributionCurve::tabulate(
            CurveKind::Nnd,
            k,
            &p,
            linear_grid(250.0, 40),
            Execution::Sequential,
        )
        .unwrap();
        for ((row, r), v) in chunk.iter().zip(curve.radii()).zip(curve.values()) {
            assert_eq!(row[0].parse::<f64>().unwrap(), *r);
            assert_eq!(row[1], k.to_string());
            assert_eq!(row[2].parse::<f64>().unwrap(), *v);
        }
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"n": 2, "lambda_p": 2e-5, "mbar": 5, "rd": 80, "k": [2]}"#,
    )
    .unwrap();
    let out_path = dir.path().join("curve.csv");
    let out = mcpdist(&[
        "cdf",
        "--config",
        cfg.to_str().unwrap(),
        "--rd",
        "50",
        "--grid-max",
        "100",
        "--grid-points",
        "3",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.contains("rd=50 k=2"), "{text}");
    let direct = stdout(&mcpdist(&with_sparse(&[
        "cdf",
        "--k",
        "2",
        "--grid-max",
        "100",
        "--grid-points",
        "3",
    ])));
    assert_eq!(text, direct);
}

#[test]
fn pmf_rows_sum_to_one() {
    let text = stdout(&mcpdist(&with_sparse(&["pmf", "--r", "60"])));
    let total: f64 = data_rows(&text)
        .iter()
        .map(|r| r[1].parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9, "{total}");
    let fixed = stdout(&mcpdist(&with_sparse(&[
        "pmf", "--kind", "palm", "--r", "60", "--m-max", "4",
    ])));
    assert_eq!(data_rows(&fixed).len(), 5);
}

#[test]
fn sweep_single_cell() {
    let text = stdout(&mcpdist(&[
        "sweep",
        "--metric",
        "connectivity",
        "--lambda-p",
        "3e-2",
        "--mbar",
        "2",
        "--R",
        "5",
        "--rd-list",
        "2",
        "--k",
        "1",
    ]));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][..3], ["0.03", "2", "1"]);
    assert_eq!(rows[1][..3], ["0.03", "inf", "1"]);
}

#[test]
fn sweep_three_panels() {
    let text = stdout(&mcpdist(&[
        "sweep",
        "--metric",
        "cache",
        "--lambda-p",
        "4.5e-2,3.5e-2,2e-2",
        "--mbar",
        "2",
        "--R",
        "5",
        "--rd-points",
        "5",
    ]));
    let rows = data_rows(&text);
    // 3 intensities x (5 radii + 1 reference) x 4 k values
    assert_eq!(rows.len(), 3 * 6 * 4);
    assert_eq!(rows.iter().filter(|r| r[1] == "inf").count(), 12);
    let no_ppp = stdout(&mcpdist(&[
        "sweep",
        "--lambda-p",
        "2e-2",
        "--mbar",
        "2",
        "--R",
        "5",
        "--rd-points",
        "5",
        "--no-ppp",
        "--fixed-lambda-d",
        "--rd",
        "5",
    ]));
    assert!(data_rows(&no_ppp).iter().all(|r| r[1] != "inf"));
}

#[test]
fn validate_reports_and_is_repeatable() {
    let args = with_sparse(&["validate", "--k", "1,2", "--samples", "4000", "--seed", "5"]);
    let a = mcpdist(&args);
    let b = mcpdist(&args);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stdout)
    );
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(data_rows(&text).len(), 4);
    assert!(text.ends_with("# overall pass\n"));
}

#[test]
fn validate_dumps_raw_samples() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("nnd.csv");
    let out = mcpdist(&with_sparse(&[
        "validate",
        "--k",
        "1",
        "--samples",
        "500",
        "--dump-nnd",
        dump.to_str().unwrap(),
    ]));
    assert!(out.status.success());
    let text = std::fs::read_to_string(dump).unwrap();
    assert!(text.starts_with("run,k,distance,censored\n"));
    assert_eq!(text.lines().count(), 501);
}

#[test]
fn error_exit_codes() {
    let usage = mcpdist(&with_sparse(&["validate", "--samples", "0"]));
    assert_eq!(usage.status.code(), Some(2));
    let bad = mcpdist(&["cdf", "--lambda-p", "-1", "--mbar", "5", "--rd", "50"]);
    assert_eq!(bad.status.code(), Some(2));
    let missing = mcpdist(&["cdf", "--mbar", "5", "--rd", "50"]);
    assert_eq!(missing.status.code(), Some(2));
    let censored = mcpdist(&with_sparse(&[
        "validate",
        "--samples",
        "200",
        "--obs-radius",
        "60",
    ]));
    assert_eq!(censored.status.code(), Some(4));
    let threads = Command::new(env!("CARGO_BIN_EXE_mcpdist"))
        .args(with_sparse(&["cdf", "--grid-max", "0"]))
        .env("MCPDIST_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}
