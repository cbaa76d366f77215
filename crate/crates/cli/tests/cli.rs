use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_choilab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn value(out: &str, measure: &str, alpha: &str) -> f64 {
    out.lines()
        .find_map(|l| {
            let t: Vec<&str> = l.split_whitespace().collect();
            (t.len() == 3 && t[0] == measure && t[1] == alpha).then(|| t[2].parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no {measure} at {alpha} in\n{out}"))
}

#[test]
fn entropy_of_pauli_and_ketbra_products() {
    let o = run(&["entropy", "--operator", "pauli:XX", "--alpha", "0,1,inf"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(value(&out, "BBC", "1"), 0.0);
    assert_eq!(value(&out, "CBC", "1"), 2.0);
    assert_eq!(value(&out, "TE", "inf"), 2.0);
    assert_eq!(value(&out, "SE", "0"), 0.0);

    let o = run(&["entropy", "--operator", "ketbra:01,10", "--alpha", "1/2", "--cut", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(value(&out, "CBC", "0.5"), 0.0);
    assert_eq!(value(&out, "BBC", "0.5"), 2.0);
}

#[test]
fn bad_operator_is_reported() {
    let o = run(&["entropy", "--operator", "pauli:XQ"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Pauli letter"));
}

#[test]
fn verify_small_run_passes() {
    let o = run(&["verify", "--n", "3", "--samples", "4", "--circuits", "2", "--seed", "9"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().count() >= 10);
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
}

#[test]
fn crosscheck_small_run_passes() {
    let o = run(&["crosscheck", "--n", "3", "--samples", "5"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 4);
}

#[test]
fn sweep_writes_csv_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "b.json",
        r#"{"experiment":"fig3b","n":4,"depth":20,"samples":3,"seed":1,"alphas":[1,"inf"]}"#,
    );
    let out1 = dir.path().join("one.csv");
    let o = run(&["sweep", "fig3b", "--config", &cfg, "--out", out1.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out1).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "s,family,alpha,se_mean,se_std,se_max,cap,samples,depth,seed");
    assert_eq!(lines.count(), 5 * 3 * 2);
    assert!(text.contains("0,F_CBC,1,0,0,0,0,3,20,1"));
    assert!(text.contains(",inf,"));

    let o = run(&["sweep", "fig3b", "--config", &cfg]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), text);

    let o = run(&["--seed", "2", "sweep", "fig3b", "--config", &cfg]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(1).unwrap().ends_with(",2"));
}

#[test]
fn fig3a_sweep_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "a.json",
        r#"{"experiment":"fig3a","n":4,"depth":8,"samples":2,"grid":{"p_ccx":[0,0.2],"p_h":[0]}}"#,
    );
    let o = run(&["--threads", "2", "sweep", "fig3a", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(
        out.lines().next().unwrap(),
        "p_ccx,p_h,operator,alpha,se_mean,se_std,se_max,cap,samples,depth,seed"
    );
    assert_eq!(out.lines().count(), 1 + 2 * 3);
    assert!(out.contains("\"k00,k00,k00,k00\""));
}

#[test]
fn sweep_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "b.json", r#"{"experiment":"fig3b","n":4,"samples":0}"#);
    let o = run(&["sweep", "fig3b", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("samples"));

    let cfg = write(dir.path(), "c.json", r#"{"experiment":"fig3b","n":4}"#);
    let o = run(&["sweep", "fig3a", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["sweep", "fig3a", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn osf_overlap_prints_exact_values() {
    let o = run(&["osf", "overlap", "--a", "k00", "--b", "X"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("0 "));
    let o = run(&["osf", "overlap", "--a", "k01", "--b", "X"]);
    assert!(stdout(&o).starts_with("1/√2 "), "{}", stdout(&o));

    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "h.txt", "H 0\n");
    let o = run(&["osf", "overlap", "--a", "X", "--b", "Z", "--circuit", &c]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("1 "), "{}", stdout(&o));
}

#[test]
fn osf_magic_iqp_and_xy() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", "H 0\n");
    let o = run(&["osf", "magic-iqp", "--n", "1", "--circuit", &h]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("1/2 "), "{}", stdout(&o));

    let t = write(dir.path(), "t.txt", "T 0\n");
    let o = run(&["osf", "xy", "--n", "1", "--circuit", &t, "--final", "Y"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("1/√2 "), "{}", stdout(&o));

    let th = write(dir.path(), "th.txt", "T 0\nH 0\n");
    let o = run(&["osf", "xy", "--n", "1", "--circuit", &th, "--final", "X"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("H 0 is not X-Y preserving: +X ↦ +Z"), "{}", stderr(&o));
}
