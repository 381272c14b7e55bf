use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn comploc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_comploc"))
        .current_dir(dir)
        .env("COMPLOC_THREADS", "2")
        .args(args)
        .output()
        .expect("spawn comploc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = comploc(
        dir.path(),
        &["construct", "hw", "--n", "8", "--k", "4", "-o", "hw84.lc"],
    );
    assert_eq!(out.status.code(), Some(0));
    let out = comploc(dir.path(), &["verify", "hw84.lc", "--target", "hw"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(stdout(&out), "PASS\n");

    let out = comploc(dir.path(), &["verify", "hw84.lc", "--target", "maj"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "FAIL at x=10000000: expected 0, got 1\n");
}

#[test]
fn verify_on_a_band() {
    let dir = tempfile::tempdir().unwrap();
    comploc(
        dir.path(),
        &["construct", "hw", "--n", "6", "--k", "3", "-o", "c.lc"],
    );
    let out = comploc(
        dir.path(),
        &["verify", "c.lc", "--target", "hw", "--band", "2:4"],
    );
    assert_eq!(out.status.code(), Some(0));
    let out = comploc(
        dir.path(),
        &["verify", "c.lc", "--target", "hw", "--band", "2"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn info_csv_has_a_row_per_variable() {
    let dir = tempfile::tempdir().unwrap();
    comploc(
        dir.path(),
        &["construct", "hw", "--n", "8", "--k", "4", "-o", "hw84.lc"],
    );
    let out = comploc(dir.path(), &["info", "hw84.lc", "--csv", "r.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "var,q,I,Hcond,escape");
    assert_eq!(lines.len(), 10);
    for (i, row) in lines[1..9].iter().enumerate() {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[0], (i + 1).to_string());
        let info: f64 = cols[2].parse().unwrap();
        assert!(info > 0.0, "{row}");
    }
    assert!(lines[9].starts_with("total,6,"));
}

#[test]
fn search_majority_beats_n_over_k() {
    let dir = tempfile::tempdir().unwrap();
    let out = comploc(
        dir.path(),
        &[
            "search", "--target", "maj", "--n", "4", "--k", "2", "-o", "w.lc",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let first = stdout(&out).lines().next().unwrap().to_string();
    assert!(
        first.starts_with("m*=") && first.ends_with(" (>2)"),
        "{first}"
    );
    let out = comploc(dir.path(), &["verify", "w.lc", "--target", "maj"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn search_prints_witness_without_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = comploc(
        dir.path(),
        &["search", "--target", "parity", "--n", "4", "--k", "2"],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m*=2 (=2)"));
    assert_eq!(lines.next(), Some("COMPOSITION n=4 k=2 m=2 d=2"));
}

#[test]
fn bp_reduction_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("p.bp"),
        "BP n=3 w=2 L=3 start=0 accept=1\nLAYER 1 VAR 1 D0 0 1 D1 1 0\n\
         LAYER 2 VAR 2 D0 0 1 D1 1 0\nLAYER 3 VAR 3 D0 0 1 D1 1 0\n",
    )
    .unwrap();
    let out = comploc(dir.path(), &["reduce-bp", "p.bp", "--k", "2", "-o", "c.lc"]);
    assert_eq!(out.status.code(), Some(0));
    let out = comploc(dir.path(), &["verify", "c.lc", "--target", "parity"]);
    assert_eq!(out.status.code(), Some(0));

    fs::write(dir.path().join("bad.bp"), "BP n=3 w=2\n").unwrap();
    let out = comploc(dir.path(), &["reduce-bp", "bad.bp", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn depth3_reports_gate_counts() {
    let dir = tempfile::tempdir().unwrap();
    comploc(
        dir.path(),
        &["construct", "parity", "--n", "4", "--k", "2", "-o", "p.lc"],
    );
    let out = comploc(
        dir.path(),
        &["to-depth3", "p.lc", "--polarity", "sigma3", "-o", "p.d3"],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let gates: u64 = text
        .split_whitespace()
        .find_map(|w| w.strip_prefix("gates="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(gates <= 4 + 2 * 4 + 1, "{text}");
    let circuit = fs::read_to_string(dir.path().join("p.d3")).unwrap();
    assert!(circuit.starts_with("DEPTH3 n=4 polarity=sigma3"));

    comploc(
        dir.path(),
        &["construct", "hw", "--n", "4", "--k", "2", "-o", "h.lc"],
    );
    let out = comploc(dir.path(), &["to-depth3", "h.lc", "--polarity", "pi3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lemma_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    comploc(
        dir.path(),
        &["construct", "hw", "--n", "2", "--k", "1", "-o", "b.lc"],
    );
    let out = comploc(dir.path(), &["check-lemma", "b.lc", "--target", "hw"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("PASS\n"));
    let out = comploc(dir.path(), &["witness", "b.lc", "--var", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("w*=0 p_cond=0 "), "{}", stdout(&out));

    comploc(
        dir.path(),
        &["construct", "parity", "--n", "2", "--k", "1", "-o", "p.lc"],
    );
    let out = comploc(dir.path(), &["check-lemma", "p.lc"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("FAIL at x="));
}

#[test]
fn majority_reduction() {
    let dir = tempfile::tempdir().unwrap();
    comploc(
        dir.path(),
        &["construct", "maj", "--n", "12", "--k", "3", "-o", "m.lc"],
    );
    let out = comploc(
        dir.path(),
        &["reduce-maj", "m.lc", "--t", "2", "-o", "p.lc"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("band=2:5"));
    let out = comploc(
        dir.path(),
        &["verify", "p.lc", "--target", "hw", "--band", "2:5"],
    );
    assert_eq!(out.status.code(), Some(0));

    let out = comploc(dir.path(), &["reduce-maj", "m.lc", "--t", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn facts_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = comploc(dir.path(), &["facts", "--trials", "50", "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("failures=0"));

    assert_eq!(
        comploc(dir.path(), &["construct", "hw", "--n", "40", "--k", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        comploc(dir.path(), &["verify", "missing.lc", "--target", "hw"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(comploc(dir.path(), &["bogus"]).status.code(), Some(2));
}
