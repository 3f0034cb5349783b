//! End-to-end tests of the `nid` binary: each one runs the real executable
//! against files in a temporary directory and checks outputs, exit codes,
//! and messages.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn nid() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nid"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    nid()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("running the nid binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A corpus with two interleaved sources, long enough for window 2.
fn write_two_source_corpus(path: &Path) {
    let texts = [
        "alpha beta gamma delta",
        "beta gamma delta epsilon",
        "gamma delta epsilon zeta",
        "delta epsilon zeta eta",
        "epsilon zeta eta theta",
        "zeta eta theta iota",
    ];
    let mut lines = String::new();
    for (i, text) in texts.iter().enumerate() {
        let date = format!("2020-01-{:02}", i + 1);
        for source in ["morning", "evening"] {
            lines.push_str(&format!(
                "{{\"id\":\"{source}-{i}\",\"date\":\"{date}\",\"source\":\"{source}\",\"text\":\"{text} {source}\"}}\n"
            ));
        }
    }
    fs::write(path, lines).unwrap();
}

fn write_series_spec(path: &Path, seed: u64) {
    fs::write(
        path,
        format!(
            "kind = \"series\"\nt = 30\ntau = [10, 20]\nmu = [0.3, 0.1, 0.28]\nsigma = 0.02\nseed = {seed}\n"
        ),
    )
    .unwrap();
}

#[test]
fn simulate_writes_the_data_and_its_truth_sidecar() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("corpus-spec.toml"),
        "kind = \"corpus\"\ndays = 10\ndocs_per_day = 3\nvocab_size = 60\nevent_window = [4, 8]\nevent_concentration = 25.0\nseed = 3\n",
    )
    .unwrap();
    let out = run(
        &["simulate", "corpus-spec.toml", "--out-dir", "out"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));

    let corpus = fs::read_to_string(dir.path().join("out/corpus.jsonl")).unwrap();
    assert_eq!(corpus.lines().count(), 10 * 3);
    let truth: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("out/corpus-truth.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(truth["event_window"], serde_json::json!([4, 8]));
    assert_eq!(truth["seed"], serde_json::json!(3));
    assert!(dir.path().join("out/resolved-config.toml").exists());
    assert!(stdout(&out).contains("seed 3"));

    write_series_spec(&dir.path().join("series-spec.toml"), 5);
    let out = run(
        &["simulate", "series-spec.toml", "--out-dir", "sout"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let series = fs::read_to_string(dir.path().join("sout/series.csv")).unwrap();
    assert_eq!(series.lines().count(), 30 + 1);
    assert!(series.starts_with("date,novelty\n2019-12-01,"));
    let truth: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("sout/series-truth.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(truth["tau_days"], serde_json::json!([10, 20]));
}

#[test]
fn simulate_requires_an_explicit_seed() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("spec.toml"),
        "kind = \"series\"\nt = 30\ntau = [10, 20]\nmu = [0.3, 0.1, 0.28]\nsigma = 0.02\n",
    )
    .unwrap();
    let out = run(&["simulate", "spec.toml", "--out-dir", "out"], dir.path());
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("seed") && err.contains("mandatory"), "{err}");
}

#[test]
fn simulate_names_an_invalid_spec_field() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("spec.toml"),
        "kind = \"series\"\nt = 30\ntau = [10, 20]\nmu = [0.3, 0.1, 0.28]\nsigma = 0.02\nseed = 1\nwibble = 4\n",
    )
    .unwrap();
    let out = run(&["simulate", "spec.toml", "--out-dir", "out"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("wibble"), "{}", stderr(&out));
}

#[test]
fn signals_writes_one_csv_per_source_with_one_row_per_document() {
    let dir = TempDir::new().unwrap();
    write_two_source_corpus(&dir.path().join("corpus.jsonl"));
    let out = run(
        &[
            "signals",
            "corpus.jsonl",
            "--window",
            "2",
            "--out-dir",
            "out",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    for source in ["morning", "evening"] {
        let csv = fs::read_to_string(dir.path().join(format!("out/signals-{source}.csv"))).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next(),
            Some("id,date,source,novelty,transience,resonance")
        );
        assert_eq!(lines.count(), 6, "one row per document of {source}");
    }
}

#[test]
fn a_missing_input_fails_naming_the_path() {
    let dir = TempDir::new().unwrap();
    let out = run(
        &["signals", "no-such.jsonl", "--out-dir", "out"],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(stderr(&out).contains("no-such.jsonl"), "{}", stderr(&out));
}

#[test]
fn a_too_short_series_fails_naming_source_and_minimum() {
    let dir = TempDir::new().unwrap();
    write_two_source_corpus(&dir.path().join("corpus.jsonl"));
    let out = run(
        &[
            "signals",
            "corpus.jsonl",
            "--window",
            "3",
            "--out-dir",
            "out",
        ],
        dir.path(),
    );
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("evening") || err.contains("morning"), "{err}");
    assert!(err.contains("more than 6"), "{err}");
}

#[test]
fn detect_runs_are_byte_identical_and_print_the_verdict_table() {
    let dir = TempDir::new().unwrap();
    write_series_spec(&dir.path().join("spec.toml"), 11);
    let out = run(&["simulate", "spec.toml", "--out-dir", "sim"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));

    let args = [
        "detect",
        "--series",
        "sim/series.csv",
        "--chains",
        "2",
        "--warmup",
        "300",
        "--out-dir",
        "det",
    ];
    let first = run(&args, dir.path());
    assert!(first.status.success(), "{}", stderr(&first));
    let report = fs::read(dir.path().join("det/report-series.json")).unwrap();
    let second = run(&args, dir.path());
    assert!(second.status.success());
    assert_eq!(
        report,
        fs::read(dir.path().join("det/report-series.json")).unwrap()
    );
    assert_eq!(stdout(&first), stdout(&second));

    let table = stdout(&first);
    for column in ["Source", "NID Start [HDI]", "NID End [HDI]", "NID"] {
        assert!(table.contains(column), "{table}");
    }
    assert!(table.contains("series"), "{table}");

    let parsed: serde_json::Value = serde_json::from_slice(&report).unwrap();
    for field in [
        "source",
        "tau1",
        "tau2",
        "mu",
        "sigma",
        "nid_supported",
        "rhat",
        "seed",
        "trace",
    ] {
        assert!(parsed.get(field).is_some(), "report lacks {field}");
    }
    assert!(parsed["trace"].get("converged").is_some());
}

#[test]
fn slopes_equal_boundaries_become_an_error_entry_with_exit_zero() {
    let dir = TempDir::new().unwrap();
    write_two_source_corpus(&dir.path().join("corpus.jsonl"));
    let out = run(
        &[
            "slopes",
            "corpus.jsonl",
            "--window",
            "2",
            "--tau1",
            "2020-01-03",
            "--tau2",
            "2020-01-03",
            "--out-dir",
            "out",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let rows: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/slopes.json")).unwrap())
            .unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2, "one error entry per source");
    for row in rows {
        assert!(row.get("error").is_some(), "{row}");
        assert!(row.get("beta1").is_none());
    }
}

#[test]
fn slope_rows_carry_exactly_the_published_fields() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("spec.toml"),
        "kind = \"corpus\"\ndays = 40\ndocs_per_day = 2\nvocab_size = 80\nevent_window = [15, 28]\nevent_concentration = 40.0\nseed = 9\n",
    )
    .unwrap();
    let out = run(&["simulate", "spec.toml", "--out-dir", "sim"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let out = run(
        &[
            "slopes",
            "sim/corpus.jsonl",
            "--window",
            "4",
            "--tau1",
            "2019-12-16",
            "--tau2",
            "2019-12-29",
            "--out-dir",
            "out",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let rows: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/slopes.json")).unwrap())
            .unwrap();
    let rows = rows.as_array().unwrap();
    let periods: Vec<&str> = rows.iter().map(|r| r["period"].as_str().unwrap()).collect();
    assert_eq!(periods, ["pre", "nid", "post"]);
    for row in rows {
        let object = row.as_object().unwrap();
        let mut keys: Vec<&String> = object.keys().collect();
        keys.sort();
        assert_eq!(keys, ["beta1", "ci", "n", "period", "source"]);
        assert_eq!(object["ci"].as_array().unwrap().len(), 2);
        assert!(object["beta1"].is_number());
        assert!(object["n"].is_u64());
    }
}

#[test]
fn flags_beat_the_config_file_and_the_resolved_copy_records_it() {
    let dir = TempDir::new().unwrap();
    write_two_source_corpus(&dir.path().join("corpus.jsonl"));
    fs::write(dir.path().join("run.toml"), "[signals]\nwindow = 1\n").unwrap();
    let out = run(
        &[
            "signals",
            "corpus.jsonl",
            "--config",
            "run.toml",
            "--window",
            "2",
            "--out-dir",
            "out",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let resolved = fs::read_to_string(dir.path().join("out/resolved-config.toml")).unwrap();
    assert!(resolved.contains("window = 2"), "{resolved}");
    let parsed: toml::Value = toml::from_str(&resolved).unwrap();
    assert_eq!(parsed["signals"]["window"].as_integer(), Some(2));
    assert_eq!(parsed["seed"].as_integer(), Some(0));
}

#[test]
fn the_env_var_supplies_the_default_output_directory() {
    let dir = TempDir::new().unwrap();
    write_two_source_corpus(&dir.path().join("corpus.jsonl"));
    let out = nid()
        .args(["ingest", "corpus.jsonl"])
        .current_dir(dir.path())
        .env("NID_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("from-env/corpus.jsonl").exists());
    // An explicit flag still wins over the environment.
    let out = nid()
        .args(["ingest", "corpus.jsonl", "--out-dir", "flagged"])
        .current_dir(dir.path())
        .env("NID_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("flagged/corpus.jsonl").exists());
}

#[test]
fn ingest_sorts_documents_and_reports_per_source_counts() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("corpus.jsonl"),
        concat!(
            "{\"id\":\"b\",\"date\":\"2020-01-02\",\"source\":\"m\",\"text\":\"later words\"}\n",
            "{\"id\":\"a\",\"date\":\"2020-01-01\",\"source\":\"m\",\"text\":\"early words\"}\n",
        ),
    )
    .unwrap();
    let out = run(&["ingest", "corpus.jsonl", "--out-dir", "out"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let written = fs::read_to_string(dir.path().join("out/corpus.jsonl")).unwrap();
    let ids: Vec<String> = written
        .lines()
        .map(|l| {
            serde_json::from_str::<serde_json::Value>(l).unwrap()["id"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert_eq!(ids, ["a", "b"]);
    let summary = stdout(&out);
    assert!(summary.contains("2 document(s)"), "{summary}");
    assert!(
        summary.contains("source m: 2 document(s), 2020-01-01 to 2020-01-02"),
        "{summary}"
    );

    fs::write(dir.path().join("bad.jsonl"), "{\"id\":\"x\"}\n").unwrap();
    let out = run(&["ingest", "bad.jsonl", "--out-dir", "out"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
}
