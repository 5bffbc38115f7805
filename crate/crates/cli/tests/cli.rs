use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SQUARING: &str = r#"{"map": {"forms": ["x0^2", "x1^2"]}, "seed": [2, 1],
 "divisor": {"form": "x0 - 3*x1"}, "S": ["inf", "3"], "N": 8,
 "eps": "1/2", "eps0": 1, "e": 1, "eps_prime": 1,
 "lct": {"generators": [[2, 0], [0, 3]]},
 "cn": {"multiplicities": [2, 1, 1], "dim": 1, "delta": 2, "m": 1, "n": 1},
 "efd": {"exponent_matrix": [[2, 1], [0, 2]], "target": 1}}"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_orbitweil"));
    cmd.args(args).env_remove("ORBITWEIL_CACHE");
    if let Some(c) = cache {
        cmd.env("ORBITWEIL_CACHE", c);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn ratio_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sq.json", SQUARING);
    let csv = dir.path().join("out/ratio.csv");
    let svg = dir.path().join("out/ratio.svg");
    let o = run(
        &[
            "ratio",
            cfg.to_str().unwrap(),
            "--out",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ],
        None,
    );
    stdout(&o);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,h,lambda_S,ratio,skipped");
    assert_eq!(lines.len(), 10);
    let row2: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(row2[0], "2");
    assert_eq!(row2[3].split('.').nth(1).unwrap().len(), 12);
    let chart = fs::read_to_string(&svg).unwrap();
    assert!(chart.contains(r#"width="800""#) && chart.contains(r#"height="500""#));
    assert!(chart.contains("<polyline"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trending_to_zero"));
}

#[test]
fn depth_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sq.json", SQUARING);
    let out = stdout(&run(&["ratio", cfg.to_str().unwrap(), "--depth", "3"], None));
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sq.json", SQUARING);
    let cache = dir.path().join("cache");
    let first = stdout(&run(&["orbit", cfg.to_str().unwrap()], Some(&cache)));
    let entries: Vec<_> = fs::read_dir(&cache).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let second = run(&["orbit", cfg.to_str().unwrap()], Some(&cache));
    assert_eq!(stdout(&second), first);
    assert!(String::from_utf8_lossy(&second.stderr).contains("Hit"));
}

#[test]
fn cache_dir_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sq.json", SQUARING);
    let cache = dir.path().join("flagcache");
    stdout(&run(
        &["orbit", cfg.to_str().unwrap(), "--cache-dir", cache.to_str().unwrap()],
        None,
    ));
    assert!(fs::read_dir(&cache).unwrap().next().is_some());
}

#[test]
fn json_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sq.json", SQUARING);
    let c = cfg.to_str().unwrap();
    let parse = |args: &[&str]| -> serde_json::Value { serde_json::from_str(&stdout(&run(args, None))).unwrap() };

    let alpha = parse(&["alpha", c]);
    assert_eq!(alpha["alpha"]["exact"], "2");

    let lct = parse(&["lct", c]);
    assert_eq!(lct["howald_lp"]["lb"], "5/6");
    assert_eq!(lct["agree"], true);

    let efd = parse(&["efd", c]);
    assert_eq!(efd["spectral"]["exact"], "2");

    let cn = parse(&["cn", c]);
    assert_eq!(cn["gamma"], "4");
    assert_eq!(cn["c_n"], "0");

    let weil = parse(&["weil", c, "--depth", "2"]);
    assert_eq!(weil["rows"].as_array().unwrap().len(), 3);

    let thm14 = parse(&["thm14", c]);
    assert_eq!(thm14["hypotheses_hold"], true);

    let thm17 = parse(&["thm17", c, "--eps", "1/10"]);
    assert!(thm17["flagged_tail"].as_array().unwrap().is_empty());
}

#[test]
fn gap_writes_series_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sq.json", SQUARING);
    let csv = dir.path().join("gap.csv");
    stdout(&run(
        &["gap", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()],
        None,
    ));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("n,h,lambda_S,gap,sign,skipped\n"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn json_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sq.json", SQUARING);
    let out = dir.path().join("alpha.json");
    let o = run(&["alpha", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert!(stdout(&o).is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["alpha"]["exact"], "2");
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let o = run(&["ratio", missing.to_str().unwrap()], None);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.json"));

    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{"map": {"forms": ["x0^2", "x1^2"]}, "bogus": 1}"#,
    );
    assert!(!run(&["orbit", bad.to_str().unwrap()], None).status.success());

    let no_divisor = write_config(
        dir.path(),
        "nod.json",
        r#"{"map": {"forms": ["x0^2", "x1^2"]}, "seed": [2, 1]}"#,
    );
    let o = run(&["ratio", no_divisor.to_str().unwrap()], None);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    assert!(!run(&["lct", no_divisor.to_str().unwrap()], None).status.success());
}
