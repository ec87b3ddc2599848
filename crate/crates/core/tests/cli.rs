use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hbf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbf")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_records(dir: &Path, n: usize) -> std::path::PathBuf {
    let path = dir.join("records.tsv");
    let text: String = (0..n).map(|i| format!("key-{i}\tcolor-{}\n", i % 5)).collect();
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn build_query_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_records(dir.path(), 20);
    let index = dir.path().join("store.hbf");

    let o = hbf(&["build", "--input", p(&input), "--dim", "4096", "--seed", "3", "--out", p(&index)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("items=20"));
    assert_eq!(&fs::read(&index).unwrap()[..4], b"HBF1");

    let o = hbf(&["query", "--index", p(&index), "--key", "key-7", "--top-k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("label=color-2"), "{text}");
    assert!(text.contains("top3="));

    let o = hbf(&["query", "--index", p(&index), "--key", "never-stored"]);
    assert_eq!(stdout(&o).lines().next(), Some("BOTTOM"));
}

#[test]
fn insert_then_calibrate() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_records(dir.path(), 10);
    let index = dir.path().join("store.hbf");
    assert!(hbf(&["build", "--input", p(&input), "--dim", "2048", "--out", p(&index)]).status.success());

    let o = hbf(&["insert", "--index", p(&index), "--key", "late", "--value", "color-new"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("items=11"));

    let o = hbf(&["calibrate", "--index", p(&index), "--input", p(&input), "--probes", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("tau="));

    let o = hbf(&["query", "--index", p(&index), "--key", "late"]);
    assert_eq!(stdout(&o).lines().next(), Some("label=color-new"));
}

#[test]
fn empty_index_answers_bottom() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.tsv");
    fs::write(&input, "").unwrap();
    let index = dir.path().join("empty.hbf");
    assert!(hbf(&["build", "--input", p(&input), "--dim", "256", "--out", p(&index)]).status.success());
    let o = hbf(&["query", "--index", p(&index), "--key", "anything"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "BOTTOM\n");
}

#[test]
fn bounds_reference_value() {
    let o = hbf(&["bounds", "fp", "--n", "100", "--d", "10000", "--eps", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("tau=429.193\n"), "{}", stdout(&o));

    let o = hbf(&["bounds", "--csv", "invnorm", "--p", "0.975"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x"));
    let x: f64 = lines.next().unwrap().parse().unwrap();
    assert!((x - 1.959963984540054).abs() < 1e-9);
}

#[test]
fn experiment_writes_csv_and_honours_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    fs::write(&config, "dim = 512\nn = 10\nlabel_count = 10\ntrials = 50\nprobe_count = 100\nmaster_seed = 2\n").unwrap();
    let out = dir.path().join("fp.csv");
    let o = hbf(&["experiment", "fp", "--config", p(&config), "--trials", "20", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!stdout(&o).is_empty());
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("experiment,master_seed,trial"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r.contains(",512,10,10,")), "{}", rows[0]);

    let again = dir.path().join("fp2.csv");
    hbf(&["experiment", "fp", "--config", p(&config), "--trials", "20", "--out", p(&again)]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(hbf(&[]).status.code(), Some(2));
    assert_eq!(hbf(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hbf(&["bounds", "fp", "--n", "10", "--d", "100", "--eps", "-1"]).status.code(), Some(2));

    let missing = dir.path().join("missing.hbf");
    assert_eq!(hbf(&["query", "--index", p(&missing), "--key", "k"]).status.code(), Some(3));

    let bogus = dir.path().join("bogus.hbf");
    fs::write(&bogus, b"NOPE and some bytes").unwrap();
    assert_eq!(hbf(&["query", "--index", p(&bogus), "--key", "k"]).status.code(), Some(4));

    let bad_tsv = dir.path().join("bad.tsv");
    fs::write(&bad_tsv, "no tab here\n").unwrap();
    let out = dir.path().join("x.hbf");
    assert_eq!(hbf(&["build", "--input", p(&bad_tsv), "--out", p(&out)]).status.code(), Some(4));

    let bad_cfg = dir.path().join("bad.toml");
    fs::write(&bad_cfg, "unknown_field = 1\n").unwrap();
    assert_eq!(hbf(&["experiment", "fp", "--config", p(&bad_cfg)]).status.code(), Some(4));
}
