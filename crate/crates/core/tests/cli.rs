use std::process::{Command, Output};

fn liouskin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liouskin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn verify_passes_and_exits_zero() {
    let out = liouskin(&["verify", "--max-L", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    assert!(stdout.lines().count() >= 8);
    assert!(stdout.lines().all(|l| l.starts_with("PASS")), "{stdout}");
}

#[test]
fn bae_prints_roots_and_coverage() {
    let out = liouskin(&[
        "bae", "--bc", "PBC", "--L", "6", "--M", "1", "--phi", "-0.3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next(),
        Some("bc,L,M,phi,deltaL,deltaR,state,j,re_k,im_k,I_j,residual,re_E,im_E")
    );
    assert_eq!(lines.count(), 6);
    assert!(text(&out.stderr).contains("6/6 levels matched"));
}

// Two sites, one particle: occupations 1/(1+e^{2φ}) and e^{2φ}/(1+e^{2φ}).
#[test]
fn steady_profile_matches_two_site_formula() {
    let phi: f64 = 0.25;
    let out = liouskin(&[
        "steady",
        "--bc",
        "OBC",
        "--L",
        "2",
        "--M",
        "1",
        "--phi",
        "0.25",
        "--profile",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    let dens: Vec<f64> = stdout
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    let w = (2.0 * phi).exp();
    assert!((dens[0] - 1.0 / (1.0 + w)).abs() < 1e-12, "{dens:?}");
    assert!((dens[1] - w / (1.0 + w)).abs() < 1e-12, "{dens:?}");
}

#[test]
fn invalid_model_exits_one() {
    let out = liouskin(&["steady", "--bc", "OBC", "--L", "4", "--M", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        text(&out.stderr).starts_with("error kind=invalid_argument"),
        "{}",
        text(&out.stderr)
    );

    let out = liouskin(&["steady", "--bc", "XBC", "--L", "4", "--M", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unsupported_root_scan_exits_one() {
    let out = liouskin(&["bae", "--bc", "OBC", "--L", "6", "--M", "3"]);
    assert_eq!(out.status.code(), Some(1), "{}", text(&out.stderr));
    assert!(text(&out.stderr).contains("kind=unsupported"));
}

#[test]
fn export_writes_sparse_text() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("op.txt");
    let out = liouskin(&[
        "export-op",
        "--bc",
        "GBC",
        "--L",
        "4",
        "--M",
        "2",
        "--deltaL",
        "0.5*JL",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(body.lines().count() > 6);
}

#[test]
fn run_writes_artifacts_and_bad_configs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        format!(
            "scenario = \"custom\"\noutput = {:?}\n\n[grid]\nL = [4]\nM = [\"L/2\"]\nphi = [0.5]\nbc = [\"OBC\", \"PBC\"]\n",
            out_dir.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = liouskin(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(out_dir.join("manifest.toml").exists());
    assert!(out_dir.join("profiles.csv").exists());
    assert!(text(&out.stdout).contains("sha256="));

    std::fs::write(
        &cfg,
        "scenario = \"custom\"\n[grid]\nL = [3]\nM = [\"L/2\"]\nwidth = 2\n",
    )
    .unwrap();
    let out = liouskin(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = text(&out.stderr);
    assert!(stderr.contains("grid.width"), "{stderr}");
    assert!(
        stderr.lines().all(|l| l.starts_with("error kind=config")),
        "{stderr}"
    );
}

#[test]
fn help_exits_zero() {
    assert_eq!(liouskin(&["--help"]).status.code(), Some(0));
    assert_eq!(liouskin(&[]).status.code(), Some(1));
}
