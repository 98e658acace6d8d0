//! End-to-end tests of the command-line interface: every subcommand is driven
//! in-process, covering exit codes, output formats, determinism across worker
//! counts, and flag validation.

use std::fs;
use std::path::PathBuf;
use std::sync::LazyLock;

use fsdesc::cli::manifest::{read_manifest, write_manifest, ManifestEntry};
use fsdesc::cli::run_from;
use fsdesc::filterbank::FilterBank;
use fsdesc::store::{load_features, load_model};
use fsdesc::tasks::{AttributorModel, ClusterAssignment, DetectorModel};
use tempfile::TempDir;

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["fsdesc"];
    argv.extend_from_slice(args);
    run_from(argv)
}

/// A small three-source corpus plus every artifact of the full pipeline,
/// built once through the CLI itself.
struct Fixture {
    _dir: TempDir,
    root: PathBuf,
}

impl Fixture {
    fn p(&self, name: &str) -> String {
        self.root.join(name).to_string_lossy().into_owned()
    }
    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }
}

static FX: LazyLock<Fixture> = LazyLock::new(|| {
    // Pin provenance timestamps so byte-identity comparisons are meaningful.
    std::env::set_var("SOURCE_DATE_EPOCH", "1755000000");
    let dir = tempfile::tempdir().expect("tempdir");
    let fx = Fixture {
        root: dir.path().to_path_buf(),
        _dir: dir,
    };
    fs::write(
        fx.path("spec.json"),
        serde_json::json!({
            "seed": 5, "noise_sigma": 0.02, "images_per_source": 6,
            "width": 48, "height": 48, "sources": 3
        })
        .to_string(),
    )
    .expect("write spec");
    assert_eq!(
        run(&["synth-sources", "--spec", &fx.p("spec.json"), "--out-dir", &fx.p("corpus")]),
        0,
        "synth-sources failed"
    );
    assert_eq!(
        run(&[
            "train-filters",
            "--manifest", &fx.p("corpus/manifest.csv"),
            "--out", &fx.p("bank.json"),
            "--k", "2", "--m", "5", "--epochs", "2", "--crop", "40", "--seed", "1",
        ]),
        0,
        "train-filters failed"
    );
    assert_eq!(
        run(&[
            "describe",
            "--manifest", &fx.p("corpus/manifest.csv"),
            "--bank", &fx.p("bank.json"),
            "--out", &fx.p("all.fsdf"),
            "--b", "5", "--scales", "2", "--max-iters", "300",
        ]),
        0,
        "describe failed"
    );
    for s in ["src0", "src1"] {
        assert_eq!(
            run(&[
                "describe",
                "--manifest", &fx.p(&format!("corpus/{s}/manifest.csv")),
                "--bank", &fx.p("bank.json"),
                "--out", &fx.p(&format!("{s}.fsdf")),
                "--b", "5", "--scales", "2", "--max-iters", "300",
            ]),
            0,
            "per-source describe failed"
        );
    }
    assert_eq!(
        run(&[
            "fit-detector",
            "--features", &fx.p("src0.fsdf"),
            "--val-features", &fx.p("src0.fsdf"),
            "--components", "2", "--quantile", "0.1",
            "--out", &fx.p("det.json"), "--seed", "2",
        ]),
        0,
        "fit-detector failed"
    );
    assert_eq!(
        run(&[
            "detect",
            "--features", &fx.p("all.fsdf"),
            "--model", &fx.p("det.json"),
            "--out-scores", &fx.p("scores.csv"),
        ]),
        0,
        "detect failed"
    );

    // Truth manifests for the evaluation commands, derived from the corpus
    // manifest. Detection truth marks src0 as the real class; the open-set
    // truth names sources by their enrolled labels and marks src2 unknown.
    let (_, entries) = read_manifest(&fx.path("corpus/manifest.csv")).expect("corpus manifest");
    let detection: Vec<ManifestEntry> = entries
        .iter()
        .map(|e| ManifestEntry {
            path: e.path.clone(),
            label: Some(if e.label.as_deref() == Some("src0") { "real" } else { "synthetic" }.into()),
        })
        .collect();
    write_manifest(&fx.path("corpus/truth.csv"), &detection, &[]).expect("truth");
    let open_set: Vec<ManifestEntry> = entries
        .iter()
        .map(|e| ManifestEntry {
            path: e.path.clone(),
            label: Some(
                match e.label.as_deref() {
                    Some("src0") => "a",
                    Some("src1") => "b",
                    _ => "unknown",
                }
                .into(),
            ),
        })
        .collect();
    write_manifest(&fx.path("truth_openset.csv"), &open_set, &[]).expect("open-set truth");

    assert_eq!(
        run(&[
            "fit-attributor",
            "--features-per-source", &format!("a={}", fx.p("src0.fsdf")),
            "--features-per-source", &format!("b={}", fx.p("src1.fsdf")),
            "--components", "2", "--quantile", "0.1",
            "--out", &fx.p("att_model.json"), "--seed", "3",
        ]),
        0,
        "fit-attributor failed"
    );
    assert_eq!(
        run(&[
            "attribute",
            "--features", &fx.p("all.fsdf"),
            "--model", &fx.p("att_model.json"),
            "--out", &fx.p("att.csv"),
        ]),
        0,
        "attribute failed"
    );
    assert_eq!(
        run(&[
            "cluster",
            "--features", &fx.p("all.fsdf"),
            "--k", "3", "--restarts", "3", "--seed", "4",
            "--out", &fx.p("clusters.csv"),
            "--out-model", &fx.p("km.json"),
        ]),
        0,
        "cluster failed"
    );
    fx
});

/// Reads a `#`-commented CSV written by the CLI into (comments, header, rows).
fn read_output_csv(path: &std::path::Path) -> (Vec<String>, Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).expect("readable CSV");
    let mut comments = Vec::new();
    let mut lines = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') {
            comments.push(line.to_string());
        } else if !line.is_empty() {
            lines.push(line.to_string());
        }
    }
    let joined = lines.join("\n");
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(joined.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .expect("header")
        .iter()
        .map(str::to_string)
        .collect();
    let rows: Vec<Vec<String>> = rdr
        .records()
        .map(|r| r.expect("row").iter().map(str::to_string).collect())
        .collect();
    (comments, header, rows)
}

#[test]
fn synth_sources_writes_corpus_and_manifests() {
    let fx = &*FX;
    for s in ["src0", "src1", "src2"] {
        for i in 0..6 {
            let img = fx.path(&format!("corpus/{s}/img_{i:04}.png"));
            assert!(img.is_file(), "missing {}", img.display());
        }
        let (_, entries) = read_manifest(&fx.path(&format!("corpus/{s}/manifest.csv")))
            .expect("per-source manifest");
        assert_eq!(entries.len(), 6);
        assert!(entries.iter().all(|e| !e.path.contains('/')));
    }
    let (_, entries) = read_manifest(&fx.path("corpus/manifest.csv")).expect("combined manifest");
    assert_eq!(entries.len(), 18);
    assert!(entries.iter().all(|e| e.label.is_some()));
    let text = fs::read_to_string(fx.path("corpus/manifest.csv")).expect("manifest text");
    assert!(text.starts_with("# seed: 5"), "manifest echoes the seed");
    assert!(text.contains("# config:"), "manifest echoes the config");
}

#[test]
fn usage_errors_exit_2_and_help_exits_0() {
    assert_eq!(run(&["--help"]), 0);
    assert_eq!(run(&["describe", "--help"]), 0);
    assert_eq!(run(&["no-such-command"]), 2);
    assert_eq!(run(&["describe", "--no-such-flag", "x"]), 2);
    assert_eq!(run(&["train-filters"]), 2, "missing required args");
}

#[test]
fn unreadable_inputs_exit_2() {
    let fx = &*FX;
    assert_eq!(
        run(&[
            "describe",
            "--manifest", &fx.p("nope.csv"),
            "--bank", &fx.p("bank.json"),
            "--out", &fx.p("zz1.fsdf"),
        ]),
        2
    );
    assert_eq!(
        run(&["synth-sources", "--spec", &fx.p("nope.json"), "--out-dir", &fx.p("zz2")]),
        2
    );
    assert_eq!(
        run(&[
            "detect",
            "--features", &fx.p("all.fsdf"),
            "--model", &fx.p("nope.json"),
            "--out-scores", &fx.p("zz3.csv"),
        ]),
        2
    );
}

#[test]
fn domain_errors_exit_1() {
    let fx = &*FX;
    // Quantile outside [0, 1].
    assert_eq!(
        run(&[
            "fit-detector",
            "--features", &fx.p("src0.fsdf"),
            "--val-features", &fx.p("src0.fsdf"),
            "--quantile", "1.5",
            "--out", &fx.p("zz4.json"),
        ]),
        1
    );
    // Spec file readable but not a valid corpus description.
    fs::write(fx.path("bad_spec.json"), "{\"seed\": \"not a number\"}").expect("write");
    assert_eq!(
        run(&["synth-sources", "--spec", &fx.p("bad_spec.json"), "--out-dir", &fx.p("zz5")]),
        1
    );
    // Wrong model kind: a filter bank is not a detector.
    assert_eq!(
        run(&[
            "detect",
            "--features", &fx.p("all.fsdf"),
            "--model", &fx.p("bank.json"),
            "--out-scores", &fx.p("zz6.csv"),
        ]),
        1
    );
    // Readable file that is not a model envelope at all.
    fs::write(fx.path("garbage.json"), "not json").expect("write");
    assert_eq!(
        run(&[
            "detect",
            "--features", &fx.p("all.fsdf"),
            "--model", &fx.p("garbage.json"),
            "--out-scores", &fx.p("zz7.csv"),
        ]),
        1
    );
    // k = 0 clusters.
    assert_eq!(
        run(&[
            "cluster",
            "--features", &fx.p("all.fsdf"),
            "--k", "0",
            "--out", &fx.p("zz8.csv"),
        ]),
        1
    );
    // Even filter neighborhood.
    assert_eq!(
        run(&[
            "train-filters",
            "--manifest", &fx.p("corpus/manifest.csv"),
            "--out", &fx.p("zz9.json"),
            "--m", "6",
        ]),
        1
    );
}

#[test]
fn corrupted_artifacts_are_rejected() {
    let fx = &*FX;
    // Tampered filter weight: envelope still parses, invariants fail.
    let text = fs::read_to_string(fx.path("bank.json")).expect("bank json");
    let mut envelope: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    envelope["payload"]["filters"][0][12] = serde_json::json!(0.5);
    fs::write(
        fx.path("bank_tampered.json"),
        serde_json::to_string(&envelope).expect("serialize"),
    )
    .expect("write");
    assert!(load_model::<FilterBank>(&fx.path("bank_tampered.json")).is_err());
    assert_eq!(
        run(&[
            "describe",
            "--manifest", &fx.p("corpus/manifest.csv"),
            "--bank", &fx.p("bank_tampered.json"),
            "--out", &fx.p("zz10.fsdf"),
        ]),
        1
    );

    // Corrupted feature-file magic.
    let mut bytes = fs::read(fx.path("all.fsdf")).expect("fsdf bytes");
    bytes[0] ^= 0xff;
    fs::write(fx.path("bad_magic.fsdf"), &bytes).expect("write");
    assert!(load_features(&fx.path("bad_magic.fsdf")).is_err());
    assert_eq!(
        run(&[
            "detect",
            "--features", &fx.p("bad_magic.fsdf"),
            "--model", &fx.p("det.json"),
            "--out-scores", &fx.p("zz11.csv"),
        ]),
        1
    );

    // Truncated feature data.
    let full = fs::read(fx.path("all.fsdf")).expect("fsdf bytes");
    fs::write(fx.path("truncated.fsdf"), &full[..full.len() / 2]).expect("write");
    assert!(load_features(&fx.path("truncated.fsdf")).is_err());
}

#[test]
fn describe_is_bit_identical_across_worker_counts() {
    let fx = &*FX;
    for (name, workers) in [("w1.fsdf", "1"), ("w3.fsdf", "3")] {
        assert_eq!(
            run(&[
                "describe",
                "--manifest", &fx.p("corpus/manifest.csv"),
                "--bank", &fx.p("bank.json"),
                "--out", &fx.p(name),
                "--b", "5", "--scales", "2", "--max-iters", "300",
                "--workers", workers,
            ]),
            0
        );
    }
    let base = fs::read(fx.path("all.fsdf")).expect("all.fsdf");
    let w1 = fs::read(fx.path("w1.fsdf")).expect("w1.fsdf");
    let w3 = fs::read(fx.path("w3.fsdf")).expect("w3.fsdf");
    assert_eq!(base, w1, "worker count must not change feature bytes");
    assert_eq!(w1, w3, "worker count must not change feature bytes");
}

#[test]
fn feature_file_round_trip_and_sidecar() {
    let fx = &*FX;
    let fm = load_features(&fx.path("all.fsdf")).expect("load features");
    assert_eq!(fm.n(), 18);
    assert_eq!(fm.d(), 2 * (5 * 5 - 1));
    let labels = fm.labels().expect("row identity lines");
    assert_eq!(labels.len(), 18);
    assert!(labels[0].contains("img_0000.png"));

    let sidecar: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(fx.path("all.fsdf.meta.json")).expect("sidecar"),
    )
    .expect("sidecar json");
    assert!(sidecar.get("seed").is_some());
    assert!(sidecar.get("config").is_some());
    assert!(sidecar["inputs"].get("bank").is_some());
    assert!(sidecar["inputs"].get("manifest").is_some());
}

#[test]
fn detect_csv_has_config_echo_and_verdicts() {
    let fx = &*FX;
    let (comments, header, rows) = read_output_csv(&fx.path("scores.csv"));
    assert!(comments.iter().any(|c| c.contains("config:")));
    assert_eq!(header, ["path", "score", "label"]);
    assert_eq!(rows.len(), 18);
    for row in &rows {
        assert!(row[0].contains("img_"));
        row[1].parse::<f64>().expect("numeric score");
        assert!(row[2] == "real" || row[2] == "synthetic");
    }
}

#[test]
fn attribute_csv_names_sources_and_candidates() {
    let fx = &*FX;
    let (comments, header, rows) = read_output_csv(&fx.path("att.csv"));
    assert!(comments.iter().any(|c| c.contains("config:")));
    assert_eq!(header, ["path", "source", "max_ll", "candidate"]);
    assert_eq!(rows.len(), 18);
    for row in &rows {
        assert!(["a", "b", "unknown"].contains(&row[1].as_str()));
        row[2].parse::<f64>().expect("numeric max_ll");
        assert!(["a", "b"].contains(&row[3].as_str()), "candidate is never `unknown`");
    }
}

#[test]
fn eval_detection_metrics() {
    let fx = &*FX;
    assert_eq!(
        run(&[
            "eval", "--metric", "auc",
            "--truth", &fx.p("corpus/truth.csv"),
            "--scores", &fx.p("scores.csv"),
        ]),
        0
    );
    // AUC has no curve output.
    assert_eq!(
        run(&[
            "eval", "--metric", "auc",
            "--truth", &fx.p("corpus/truth.csv"),
            "--scores", &fx.p("scores.csv"),
            "--out-curve", &fx.p("zz12.csv"),
        ]),
        1
    );
    assert_eq!(
        run(&[
            "eval", "--metric", "threshold-sweep",
            "--truth", &fx.p("corpus/truth.csv"),
            "--scores", &fx.p("scores.csv"),
            "--out-curve", &fx.p("sweep.csv"),
        ]),
        0
    );
    let (comments, header, rows) = read_output_csv(&fx.path("sweep.csv"));
    assert!(comments.iter().any(|c| c.contains("best_threshold")));
    assert_eq!(header, ["threshold", "balanced_accuracy"]);
    assert!(!rows.is_empty());
    for row in &rows {
        let acc: f64 = row[1].parse().expect("numeric accuracy");
        assert!((0.0..=1.0).contains(&acc));
    }
}

#[test]
fn eval_open_set_metrics_and_curves() {
    let fx = &*FX;
    assert_eq!(
        run(&[
            "eval", "--metric", "au-crr",
            "--truth", &fx.p("truth_openset.csv"),
            "--scores", &fx.p("att.csv"),
            "--out-curve", &fx.p("crr.csv"),
        ]),
        0
    );
    let (_, header, rows) = read_output_csv(&fx.path("crr.csv"));
    assert_eq!(header, ["acceptance", "rejection"]);
    assert_eq!(rows.first().map(|r| r.as_slice()), Some(["0".to_string(), "1".to_string()].as_slice()));
    assert_eq!(rows.last().map(|r| r.as_slice()), Some(["1".to_string(), "0".to_string()].as_slice()));

    assert_eq!(
        run(&[
            "eval", "--metric", "au-oscr",
            "--truth", &fx.p("truth_openset.csv"),
            "--scores", &fx.p("att.csv"),
            "--out-curve", &fx.p("oscr.csv"),
        ]),
        0
    );
    let (_, header, rows) = read_output_csv(&fx.path("oscr.csv"));
    assert_eq!(header, ["fpr", "ccr"]);
    let first = rows.first().expect("curve rows");
    assert_eq!(first[0], "0");
    assert_eq!(first[1], "0");
    let last = rows.last().expect("curve rows");
    assert_eq!(last[0], "1");
}

#[test]
fn eval_clustering_modes_and_flag_validation() {
    let fx = &*FX;
    assert_eq!(
        run(&[
            "eval", "--metric", "clustering",
            "--truth", &fx.p("corpus/truth.csv"),
            "--assignments", &fx.p("clusters.csv"),
        ]),
        0
    );
    assert_eq!(
        run(&[
            "eval", "--metric", "clustering",
            "--truth", &fx.p("corpus/truth.csv"),
            "--features", &fx.p("all.fsdf"),
            "--k-multiple", "2",
            "--restarts", "2",
        ]),
        0
    );
    // Neither input, both inputs, or a zero multiple are invalid.
    assert_eq!(
        run(&["eval", "--metric", "clustering", "--truth", &fx.p("corpus/truth.csv")]),
        1
    );
    assert_eq!(
        run(&[
            "eval", "--metric", "clustering",
            "--truth", &fx.p("corpus/truth.csv"),
            "--assignments", &fx.p("clusters.csv"),
            "--features", &fx.p("all.fsdf"),
            "--k-multiple", "2",
        ]),
        1
    );
    assert_eq!(
        run(&[
            "eval", "--metric", "clustering",
            "--truth", &fx.p("corpus/truth.csv"),
            "--features", &fx.p("all.fsdf"),
            "--k-multiple", "0",
        ]),
        1
    );
    // Clustering has no curve output.
    assert_eq!(
        run(&[
            "eval", "--metric", "clustering",
            "--truth", &fx.p("corpus/truth.csv"),
            "--assignments", &fx.p("clusters.csv"),
            "--out-curve", &fx.p("zz13.csv"),
        ]),
        1
    );
}

#[test]
fn cluster_outputs_and_determinism() {
    let fx = &*FX;
    let (comments, header, rows) = read_output_csv(&fx.path("clusters.csv"));
    assert!(comments.iter().any(|c| c.contains("config:")));
    assert_eq!(header, ["path", "cluster"]);
    assert_eq!(rows.len(), 18);
    for row in &rows {
        let c: usize = row[1].parse().expect("cluster index");
        assert!(c < 3);
    }
    let (model, _) = load_model::<ClusterAssignment>(&fx.path("km.json")).expect("kmeans model");
    assert_eq!(model.k, 3);
    assert_eq!(model.assignments.len(), 18);

    // Same seed, same bytes — for both the CSV and the model file.
    assert_eq!(
        run(&[
            "cluster",
            "--features", &fx.p("all.fsdf"),
            "--k", "3", "--restarts", "3", "--seed", "4",
            "--out", &fx.p("clusters_rerun.csv"),
            "--out-model", &fx.p("km_rerun.json"),
        ]),
        0
    );
    assert_eq!(
        fs::read(fx.path("clusters.csv")).expect("csv"),
        fs::read(fx.path("clusters_rerun.csv")).expect("csv rerun"),
    );
    assert_eq!(
        fs::read(fx.path("km.json")).expect("model"),
        fs::read(fx.path("km_rerun.json")).expect("model rerun"),
    );
}

#[test]
fn fitted_models_reload_with_their_settings() {
    let fx = &*FX;
    let (det, prov) = load_model::<DetectorModel>(&fx.path("det.json")).expect("detector");
    assert_eq!(det.quantile, 0.1);
    assert!(det.tau_real.is_finite());
    assert_eq!(prov.seed, 2);
    assert!(prov.inputs.contains_key("features"));

    let (att, _) = load_model::<AttributorModel>(&fx.path("att_model.json")).expect("attributor");
    assert_eq!(att.labels(), ["a", "b"]);

    // Same seed reruns are byte-identical (timestamps pinned by the fixture).
    assert_eq!(
        run(&[
            "fit-detector",
            "--features", &fx.p("src0.fsdf"),
            "--val-features", &fx.p("src0.fsdf"),
            "--components", "2", "--quantile", "0.1",
            "--out", &fx.p("det_rerun.json"), "--seed", "2",
        ]),
        0
    );
    assert_eq!(
        fs::read(fx.path("det.json")).expect("detector"),
        fs::read(fx.path("det_rerun.json")).expect("detector rerun"),
    );
}

#[test]
fn describe_skip_errors_drops_failed_rows() {
    let fx = &*FX;
    let (_, entries) = read_manifest(&fx.path("corpus/manifest.csv")).expect("manifest");
    let mut with_bad = entries.clone();
    with_bad.push(ManifestEntry {
        path: "does_not_exist.png".into(),
        label: Some("src0".into()),
    });
    write_manifest(&fx.path("corpus/with_bad.csv"), &with_bad, &[]).expect("write");

    assert_eq!(
        run(&[
            "describe",
            "--manifest", &fx.p("corpus/with_bad.csv"),
            "--bank", &fx.p("bank.json"),
            "--out", &fx.p("zz14.fsdf"),
            "--b", "5", "--scales", "2", "--max-iters", "100",
        ]),
        1,
        "a failing row aborts by default"
    );
    assert_eq!(
        run(&[
            "describe",
            "--manifest", &fx.p("corpus/with_bad.csv"),
            "--bank", &fx.p("bank.json"),
            "--out", &fx.p("skipped.fsdf"),
            "--b", "5", "--scales", "2", "--max-iters", "300",
            "--skip-errors",
        ]),
        0,
        "--skip-errors keeps the good rows"
    );
    let fm = load_features(&fx.path("skipped.fsdf")).expect("features");
    assert_eq!(fm.n(), 18, "the bad row is dropped, good rows survive");
}

#[test]
fn detect_rejects_mismatched_descriptor_width() {
    let fx = &*FX;
    assert_eq!(
        run(&[
            "describe",
            "--manifest", &fx.p("corpus/src0/manifest.csv"),
            "--bank", &fx.p("bank.json"),
            "--out", &fx.p("b7.fsdf"),
            "--b", "7", "--scales", "2", "--max-iters", "100",
        ]),
        0
    );
    assert_eq!(
        run(&[
            "detect",
            "--features", &fx.p("b7.fsdf"),
            "--model", &fx.p("det.json"),
            "--out-scores", &fx.p("zz15.csv"),
        ]),
        1,
        "descriptor width must match the detector"
    );
}

#[test]
fn eval_robustness_reports_per_quality_auc() {
    let fx = &*FX;
    assert_eq!(
        run(&[
            "eval-robustness",
            "--manifest", &fx.p("corpus/truth.csv"),
            "--bank", &fx.p("bank.json"),
            "--detector", &fx.p("det.json"),
            "--qualities", "95,85",
            "--b", "5", "--scales", "2", "--max-iters", "300",
            "--out", &fx.p("robust.csv"),
        ]),
        0
    );
    let (comments, header, rows) = read_output_csv(&fx.path("robust.csv"));
    assert!(comments.iter().any(|c| c.contains("config:")));
    assert_eq!(header, ["quality", "auc"]);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][0], "None", "uncompressed baseline comes first");
    assert_eq!(rows[1][0], "95");
    assert_eq!(rows[2][0], "85");
    for row in &rows {
        let auc: f64 = row[1].parse().expect("numeric auc");
        assert!((0.0..=1.0).contains(&auc));
    }

    // Quality 0 is outside the JPEG range.
    assert_eq!(
        run(&[
            "eval-robustness",
            "--manifest", &fx.p("corpus/truth.csv"),
            "--bank", &fx.p("bank.json"),
            "--detector", &fx.p("det.json"),
            "--qualities", "0",
        ]),
        1
    );
}
