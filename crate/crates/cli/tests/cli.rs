use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn sosbias(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sosbias"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = sosbias(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn generate_then_score_with_config_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(dir.path(), &["generate-dataset"]);
    assert!(stdout.contains("wrote 1638 sentence pairs"));
    std::fs::write(
        dir.path().join("run.conf"),
        "backend = toy-uniform:100\ndataset = dataset.tsv\n",
    )
    .unwrap();
    ok(
        dir.path(),
        &[
            "--config",
            "run.conf",
            "score",
            "--attribute",
            "race",
            "--group",
            "marginalized",
        ],
    );
    let result = std::fs::read_to_string(dir.path().join("sos_result.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&result).unwrap();
    // 10 marginalized race terms times 21 word pairs, all tied under a uniform model.
    assert_eq!(json["overall"]["n"], 210);
    assert_eq!(json["overall"]["ties"], 210);
    assert_eq!(json["provenance"]["filter_attribute"], "race");
    assert!(json["provenance"]["config_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn failures_exit_nonzero_with_context() {
    let dir = tempfile::tempdir().unwrap();
    let out = sosbias(
        dir.path(),
        &["score", "--dataset", "missing.tsv", "--backend", "toy-uniform:4"],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.tsv"));
    ok(dir.path(), &["generate-dataset"]);
    let out = sosbias(dir.path(), &["score", "--dataset", "dataset.tsv", "--backend", "gpt:9"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown backend"));
    std::fs::write(dir.path().join("bad.conf"), "colour = blue\n").unwrap();
    let out = sosbias(dir.path(), &["--config", "bad.conf", "generate-dataset"]);
    assert!(!out.status.success());
    let out = sosbias(
        dir.path(),
        &[
            "score",
            "--dataset",
            "dataset.tsv",
            "--backend",
            "toy-uniform:4",
            "--output",
            "../x.json",
        ],
    );
    assert!(!out.status.success());
}

#[test]
fn debias_pipeline_records_projection_site() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture("corpus.txt");
    ok(dir.path(), &["generate-dataset"]);
    let stdout = ok(
        dir.path(),
        &[
            "debias-estimate",
            "--backend",
            "toy-linear:8:97",
            "--corpus",
            corpus.to_str().unwrap(),
            "--k",
            "2",
            "--pooling",
            "first_token",
        ],
    );
    assert!(stdout.contains("estimated k = 2 of d = 8"));
    let sub = std::fs::read_to_string(dir.path().join("subspace.txt")).unwrap();
    assert!(sub.contains("pooling\tfirst_token"));
    ok(
        dir.path(),
        &[
            "score-debiased",
            "--backend",
            "toy-linear:8:97",
            "--subspace",
            "subspace.txt",
            "--dataset",
            "dataset.tsv",
        ],
    );
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sos_result_debiased.json")).unwrap()).unwrap();
    assert_eq!(
        json["provenance"]["projection_site"],
        "final_hidden_states_all_positions"
    );
    assert_eq!(json["provenance"]["subspace_k"], "2");
    assert_eq!(json["overall"]["n"], 1638);
    // Leaving the head untouched reproduces the plain scores.
    ok(
        dir.path(),
        &[
            "score",
            "--backend",
            "toy-linear:8:97",
            "--dataset",
            "dataset.tsv",
            "--output",
            "plain.json",
        ],
    );
    ok(
        dir.path(),
        &[
            "score-debiased",
            "--backend",
            "toy-linear:8:97",
            "--subspace",
            "subspace.txt",
            "--dataset",
            "dataset.tsv",
            "--projection-site",
            "sentence_representation",
            "--output",
            "site.json",
        ],
    );
    let read = |n: &str| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(dir.path().join(n)).unwrap()).unwrap()
    };
    let (plain, site) = (read("plain.json"), read("site.json"));
    assert_eq!(site["provenance"]["projection_site"], "sentence_representation_only");
    assert_eq!(site["overall"], plain["overall"]);
    // A subspace of the wrong width is rejected.
    let out = sosbias(
        dir.path(),
        &[
            "score-debiased",
            "--backend",
            "toy-linear:4:97",
            "--subspace",
            "subspace.txt",
            "--dataset",
            "dataset.tsv",
        ],
    );
    assert!(!out.status.success());
    // Uniform models expose no hidden states.
    let out = sosbias(
        dir.path(),
        &[
            "score-debiased",
            "--backend",
            "toy-uniform:9",
            "--subspace",
            "subspace.txt",
            "--dataset",
            "dataset.tsv",
        ],
    );
    assert!(!out.status.success());
}

#[test]
fn per_identity_gaps_split_marginalized_groups() {
    let dir = tempfile::tempdir().unwrap();
    let preds = fixture("predictions.tsv");
    ok(
        dir.path(),
        &[
            "fairness",
            "gaps",
            "--predictions",
            preds.to_str().unwrap(),
            "--per-identity",
            "--model",
            "m",
        ],
    );
    let text = std::fs::read_to_string(dir.path().join("gap_report.tsv")).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    let sides: Vec<&str> = rows.iter().map(|r| r.split('\t').nth(2).unwrap()).collect();
    assert_eq!(sides, ["female", "black", "asian", "jewish", "muslim"]);
    // A lone positive and negative tied at the threshold: both predicted positive.
    assert!(rows[3].ends_with("2/3;1/2;0"), "{}", rows[3]);
}

#[test]
fn split_cleans_text_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let posts = fixture("posts.tsv");
    ok(
        dir.path(),
        &[
            "--seed",
            "11",
            "fairness",
            "split",
            "--input",
            posts.to_str().unwrap(),
            "--text-column",
            "text",
        ],
    );
    let mut all = String::new();
    for name in ["train.tsv", "validation.tsv", "test.tsv"] {
        let t = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(t.starts_with("id\tlabel\ttext\tsubgroups\n"));
        all.push_str(&t);
    }
    assert!(all.contains("1\t0\tdo not miss this now !\tgender:female"));
    assert!(all.contains("3\t0\tcaf opening today , i am so happy :)\trace:white"));
    let manifest = std::fs::read_to_string(dir.path().join("split_manifest.tsv")).unwrap();
    let assigned = manifest.lines().filter(|l| !l.starts_with('#')).skip(1).count();
    assert_eq!(assigned, 10);
    assert_eq!(manifest.matches("\ttrain\n").count(), 4);
}

#[test]
fn correlate_against_bundled_survey() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["generate-dataset"]);
    ok(
        dir.path(),
        &[
            "score",
            "--dataset",
            "dataset.tsv",
            "--backend",
            "toy-linear:8:97:1",
            "--output",
            "a.json",
        ],
    );
    ok(
        dir.path(),
        &[
            "score",
            "--dataset",
            "dataset.tsv",
            "--backend",
            "toy-linear:8:97:2",
            "--output",
            "b.json",
        ],
    );
    ok(
        dir.path(),
        &[
            "correlate",
            "--sos",
            "a.json",
            "--sos",
            "b.json",
            "--online-hate",
            "--rows",
            "sos_m",
            "--cols",
            "online_hate",
            "--heatmap",
        ],
    );
    let m = std::fs::read_to_string(dir.path().join("correlation.tsv")).unwrap();
    assert!(m.contains("rho\tfinland\tus\tgermany\tuk"));
    let png = std::fs::read(dir.path().join("correlation.png")).unwrap();
    assert_eq!(&png[..8], b"\x89PNG\r\n\x1a\n");
    ok(
        dir.path(),
        &["report", "--sos", "a.json", "--before", "a.json", "--after", "b.json"],
    );
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("[sos_by_group]") && report.contains("[debias_ttest]"));
}
