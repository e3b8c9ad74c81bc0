use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn vfso(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vfso"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .output()
        .expect("vfso runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn csv_field(body: &str, column: &str, row: usize) -> String {
    let mut lines = body.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == column).unwrap();
    lines
        .nth(row)
        .unwrap()
        .split(',')
        .nth(idx)
        .unwrap()
        .to_owned()
}

#[test]
fn evaluate_defaults_is_viable() {
    let dir = tempfile::tempdir().unwrap();
    let out = vfso(&["evaluate"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("42.0") && stdout.contains("Gbit/s"),
        "{stdout}"
    );
    assert!(
        stdout.contains("margin=11.4") || stdout.contains("margin=11.5"),
        "{stdout}"
    );
    let csv = read(&dir.path().join("evaluate.csv"));
    let rate: f64 = csv_field(&csv, "data_rate_bps", 0).parse().unwrap();
    assert!((rate / 42e9 - 1.0).abs() < 0.05);
    assert!(dir.path().join("resolved_config.toml").exists());
    assert!(dir.path().join("summary.txt").exists());
}

#[test]
fn evaluate_cloud_and_fog_fails_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = vfso(
        &["evaluate", "--set", "scenarios.0.preset=cloud_and_fog"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let csv = read(&dir.path().join("evaluate.csv"));
    let margin: f64 = csv_field(&csv, "link_margin_db", 0).parse().unwrap();
    assert!(margin < 0.0);
    assert_eq!(csv_field(&csv, "link_viable", 0), "false");
}

#[test]
fn target_equal_to_rate_gives_zero_margin() {
    let dir = tempfile::tempdir().unwrap();
    vfso(&["evaluate"], dir.path());
    let rate = csv_field(&read(&dir.path().join("evaluate.csv")), "data_rate_bps", 0);
    let again = tempfile::tempdir().unwrap();
    let out = vfso(
        &["evaluate", "--set", &format!("target_rate_bps={rate}")],
        again.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = read(&again.path().join("evaluate.csv"));
    assert_eq!(csv_field(&csv, "link_margin_db", 0), "0");
}

#[test]
fn configuration_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = vfso(
        &["evaluate", "--set", "geometry.divergence_rad=-1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("divergence"));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[geometry]\naltitude = 3.0\n").unwrap();
    let out = vfso(&["sweep", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let out = vfso(&["sweep", "--config", "/nonexistent/x.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let out = vfso(&["teleport"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fig2_config_writes_three_altitude_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("fig2.toml");
    let out = vfso(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    for label in ["clear_sky", "heavy_rain", "cloud_and_fog"] {
        let body = read(&dir.path().join(format!("sweep_{label}_altitude.csv")));
        let lines: Vec<&str> = body.lines().collect();
        assert_eq!(lines.len(), 41);
        assert_eq!(
            lines[0],
            "variable,data_rate_bps,link_margin_db,l_fog_db,l_rain_db,l_cloud_db,l_sci_db,l_geo_db,error"
        );
        assert!(lines[1].starts_with("1000,"));
        assert!(lines[40].starts_with("20000,"));
    }
    let clear = read(&dir.path().join("sweep_clear_sky_altitude.csv"));
    let rates: Vec<f64> = (0..40)
        .map(|i| csv_field(&clear, "data_rate_bps", i).parse().unwrap())
        .collect();
    assert!(rates.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn fig3_config_orders_divergences() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("fig3.toml");
    let out = vfso(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rate_at_20km = |label: &str| -> f64 {
        let body = read(&dir.path().join(format!("sweep_{label}_altitude.csv")));
        csv_field(&body, "data_rate_bps", 39).parse().unwrap()
    };
    let wide = rate_at_20km("cloud_and_fog_theta_1mrad");
    let mid = rate_at_20km("cloud_and_fog_theta_10urad");
    let narrow = rate_at_20km("cloud_and_fog_theta_1urad");
    assert!(wide < mid && mid < narrow);
}

#[test]
fn two_point_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = vfso(
        &[
            "sweep",
            "--set",
            "sweeps.0.start=1000",
            "--set",
            "sweeps.0.stop=2000",
            "--set",
            "sweeps.0.points=2",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let body = read(&dir.path().join("sweep_clear_sky_altitude.csv"));
    assert_eq!(body.lines().count(), 3);
}

fn ranking(dir: &Path) -> Vec<String> {
    let body = read(&dir.join("cost_summary.csv"));
    (0..4).map(|i| csv_field(&body, "technology", i)).collect()
}

#[test]
fn cost_ranking_and_year_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("fig4.toml");
    let out = vfso(&["cost", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        ranking(dir.path()),
        ["rf_nlos_ptm", "terrestrial_fso", "fiber", "vertical_fso"]
    );
    let items = read(&dir.path().join("cost_items.csv"));
    assert!(items.starts_with("technology,item,kind,unit_cost,quantity,total"));
    let layout = read(&dir.path().join("layout.csv"));
    assert_eq!(layout.lines().count(), 1101);

    let zero = tempfile::tempdir().unwrap();
    vfso(
        &[
            "cost",
            "--config",
            cfg.to_str().unwrap(),
            "--set",
            "cost.years=0",
        ],
        zero.path(),
    );
    assert_eq!(ranking(zero.path())[3], "fiber");
}

#[test]
fn seed_changes_layout_not_ordering() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    vfso(&["cost", "--set", "seed=3"], a.path());
    vfso(&["cost", "--set", "seed=4"], b.path());
    assert_ne!(
        read(&a.path().join("layout.csv")),
        read(&b.path().join("layout.csv"))
    );
    assert_eq!(ranking(a.path()), ranking(b.path()));
}

#[test]
fn resolved_config_reproduces_bundle() {
    let first = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("fig2.toml");
    vfso(
        &[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--set",
            "seed=9",
        ],
        first.path(),
    );
    let echo = first.path().join("resolved_config.toml");
    let second = tempfile::tempdir().unwrap();
    vfso(
        &["sweep", "--config", echo.to_str().unwrap()],
        second.path(),
    );
    for name in [
        "sweep_clear_sky_altitude.csv",
        "sweep_heavy_rain_altitude.csv",
        "sweep_cloud_and_fog_altitude.csv",
        "resolved_config.toml",
    ] {
        assert_eq!(
            std::fs::read(first.path().join(name)).unwrap(),
            std::fs::read(second.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn aggregate_reports_supported_cells() {
    let dir = tempfile::tempdir().unwrap();
    let out = vfso(&["aggregate"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let body = read(&dir.path().join("aggregate.csv"));
    let cells: u64 = csv_field(&body, "supported_cells", 0).parse().unwrap();
    // ≈42 Gbit/s over 50 Mbit/s per cell
    assert!((820..=860).contains(&cells), "{cells}");
}
