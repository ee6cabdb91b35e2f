use std::path::Path;
use std::process::{Command, Output};

fn amc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amc")).args(args).output().expect("run amc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn table_prints_every_modulation() {
    let o = amc(&["table"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "modulation,c42,c63,fc");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("BPSK,-2.0,16.0,0.3149"));

    let o = amc(&["table", "--format", "json"]);
    assert!(stdout(&o).trim_start().starts_with('['));
}

#[test]
fn exit_codes() {
    assert_eq!(amc(&["--help"]).status.code(), Some(0));
    assert_eq!(amc(&["--version"]).status.code(), Some(0));
    assert_eq!(amc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(amc(&["sweep"]).status.code(), Some(1));
    assert_eq!(amc(&["sweep", "--preset", "fig4"]).status.code(), Some(1));
    assert_eq!(amc(&["classify", "--input", "x", "--mode", "nope"]).status.code(), Some(1));
    assert_eq!(amc(&["classify", "--input", "/definitely/missing.bin"]).status.code(), Some(2));
    let o = amc(&["sweep", "--config", "/definitely/missing.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/definitely/missing.toml"));
}

#[test]
fn synthesize_then_classify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.bin");
    let p = path.to_str().unwrap();
    let o = amc(&[
        "synthesize",
        "--tx",
        "PAM4:3",
        "--tx",
        "QPSK:0.5",
        "--noise-variance",
        "0.1",
        "--symbols",
        "50000",
        "--seed",
        "4",
        "--out",
        p,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(Path::new(&format!("{p}.hdr")).exists());

    let text = stdout(&amc(&["classify", "--input", p]));
    assert!(text.lines().nth(1).unwrap().starts_with("sumc,PAM4,"), "{text}");

    // MUMC assumes equal received powers
    let eq = dir.path().join("eq.bin");
    let q = eq.to_str().unwrap();
    assert!(amc(&[
        "synthesize",
        "--tx",
        "PAM4:1",
        "--tx",
        "QPSK:1",
        "--noise-variance",
        "0.01",
        "--symbols",
        "50000",
        "--out",
        q
    ])
    .status
    .success());
    let text = stdout(&amc(&["classify", "--input", q, "--mode", "mumc", "--format", "json"]));
    assert!(text.contains("\"decision\": \"QPSK+PAM4\""), "{text}");

    // unknown candidate tag is a usage error
    assert_eq!(amc(&["classify", "--input", p, "--candidates", "BPSK,8PSK"]).status.code(), Some(1));
    assert_eq!(amc(&["synthesize", "--tx", "BPSK", "--out", p]).status.code(), Some(1));
}

#[test]
fn sweep_from_config_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "[[experiment]]\nname = \"mini\"\nkind = \"sumc_snr_sweep\"\naxis = [0.0, 10.0]\nn_symbols = 300\nn_trials = 50\nbase_seed = 1\nsir_db = 10.0\n",
    )
    .unwrap();
    let out1 = dir.path().join("a.csv");
    let out8 = dir.path().join("b.csv");
    let c = cfg.to_str().unwrap();
    for (out, jobs) in [(&out1, "1"), (&out8, "8")] {
        let o = amc(&[
            "sweep",
            "--config",
            c,
            "--trials",
            "20",
            "--seed",
            "77",
            "--jobs",
            jobs,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(&out1).unwrap();
    assert_eq!(a, std::fs::read(&out8).unwrap());
    let text = String::from_utf8(a).unwrap();
    // 2 axis points x 2 classifiers x (4 classes + average)
    assert_eq!(text.lines().count(), 21);
    assert!(text.lines().nth(1).unwrap().ends_with(",20,0"));

    let json = stdout(&amc(&["sweep", "--config", c, "--trials", "5", "--seed", "77", "--format", "json"]));
    assert!(json.contains("\"base_seed\": 77"));
}

#[test]
fn sensitivity_tables_and_contours() {
    let o = amc(&["sensitivity", "--preset", "fig4", "--trials", "500"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(
        text.lines().next().unwrap(),
        "experiment,sigma_delta_sq,superclass_id,superclass_label,p_analytic,p_montecarlo,mc_stderr"
    );
    assert_eq!(text.lines().count(), 1 + 12 * 3);

    let text = stdout(&amc(&["sensitivity", "--preset", "fig5"]));
    assert_eq!(
        text.lines().next().unwrap(),
        "superclass_id,superclass_label,threshold,delta2,delta1"
    );
    assert!(text.lines().count() > 100);

    assert_eq!(amc(&["sensitivity", "--preset", "fig2"]).status.code(), Some(1));
}
