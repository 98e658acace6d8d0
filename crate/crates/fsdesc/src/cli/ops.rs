//! Implementations of the CLI subcommands. Every output embeds its seed and
//! a full configuration echo: model files carry a provenance block, CSVs
//! carry `#`-comment lines, and binary feature files get a JSON sidecar.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use super::manifest::{
    decode_row_key, encode_row_key, read_csv, read_manifest, write_csv, write_manifest,
    ManifestEntry,
};
use super::{
    AttributeArgs, ClusterArgs, DescribeArgs, DetectArgs, EvalArgs, EvalRobustnessArgs,
    FitAttributorArgs, FitDetectorArgs, Metric, SynthSourcesArgs, TrainFiltersArgs,
};
use crate::error::{Error, Result};
use crate::filterbank::{train_filter_bank, FilterBank, TrainConfig};
use crate::imaging::{jpeg_recompress, load_grayscale, GrayImage, PreprocessOptions};
use crate::metrics;
use crate::mixture::{fit_gmm, GmmConfig};
use crate::selfdesc::{describe_image, FitConfig};
use crate::store::{
    atomic_write, file_hash, load_features, load_model, save_features, save_model, FeatureMatrix,
    Provenance,
};
use crate::synth::{write_corpus, CorpusSpec};
use crate::tasks::{
    build_attributor, calibrate_detector, kmeans, AttributorModel, DetectorModel, KmeansConfig,
};

/// Builds a rayon pool with `workers` threads (0 = rayon's default).
fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))
}

/// Loads a feature file and decodes its per-row identity lines.
fn load_keyed_features(path: &Path) -> Result<(FeatureMatrix, Vec<(String, Option<String>)>)> {
    let fm = load_features(path)?;
    let keys = {
        let labels = fm.labels().ok_or_else(|| {
            Error::InvalidConfig(format!(
                "{} carries no per-row identity lines; regenerate it with `describe`",
                path.display()
            ))
        })?;
        labels
            .iter()
            .map(|l| decode_row_key(l))
            .collect::<Result<Vec<_>>>()?
    };
    Ok((fm, keys))
}

/// Truth lookup: manifest path -> required label.
fn truth_map(path: &Path) -> Result<BTreeMap<String, String>> {
    let (_, entries) = read_manifest(path)?;
    let mut map = BTreeMap::new();
    for e in entries {
        let label = e.label.ok_or_else(|| Error::Manifest {
            path: path.to_path_buf(),
            reason: format!("row `{}` has no label; evaluation needs labeled truth", e.path),
        })?;
        map.insert(e.path, label);
    }
    Ok(map)
}

fn lookup_truth<'m>(
    map: &'m BTreeMap<String, String>,
    row_path: &str,
    truth_path: &Path,
) -> Result<&'m str> {
    map.get(row_path).map(String::as_str).ok_or_else(|| Error::Manifest {
        path: truth_path.to_path_buf(),
        reason: format!("scored row `{row_path}` is absent from the truth manifest"),
    })
}

pub fn train_filters(args: &TrainFiltersArgs) -> Result<()> {
    let (base, entries) = read_manifest(&args.manifest)?;
    if entries.is_empty() {
        return Err(Error::EmptyInput("manifest has no rows".into()));
    }
    let opts = PreprocessOptions {
        filter_neighborhood: args.m,
        ..Default::default()
    };
    let corpus: Vec<GrayImage> = entries
        .iter()
        .map(|e| load_grayscale(&e.resolve(&base), &opts))
        .collect::<Result<Vec<_>>>()?;

    let cfg = TrainConfig {
        k: args.k,
        m: args.m,
        lambda: args.lambda,
        lr: args.lr,
        epochs: args.epochs,
        crop: args.crop,
        seed: args.seed,
        ..Default::default()
    };
    let outcome = train_filter_bank(&corpus, &cfg)?;
    let last = outcome.trace.last().expect("training ran at least one step");

    let config = json!({
        "command": "train-filters",
        "k": args.k, "m": args.m, "lambda": args.lambda, "lr": args.lr,
        "epochs": args.epochs, "crop": args.crop, "seed": args.seed,
        "images": corpus.len(),
    });
    let provenance =
        Provenance::new(args.seed, &config).with_input("manifest", file_hash(&args.manifest)?);
    save_model(&args.out, &outcome.bank, &provenance)?;
    println!("energy {}", last.energy);
    println!("diversity {}", last.diversity);
    println!("sigma_min {}", last.sigma_min);
    println!(
        "trained {} filters ({}x{}) on {} images -> {}",
        args.k,
        args.m,
        args.m,
        corpus.len(),
        args.out.display()
    );
    Ok(())
}

pub fn describe(args: &DescribeArgs) -> Result<()> {
    let (base, entries) = read_manifest(&args.manifest)?;
    if entries.is_empty() {
        return Err(Error::EmptyInput("manifest has no rows".into()));
    }
    let (bank, _) = load_model::<FilterBank>(&args.bank)?;
    let opts = PreprocessOptions {
        filter_neighborhood: bank.m(),
        ..Default::default()
    };
    let fit_cfg = FitConfig {
        lr: args.lr,
        max_iters: args.max_iters,
        ..Default::default()
    };

    let pool = thread_pool(args.workers)?;
    let results: Vec<Result<Vec<f64>>> = pool.install(|| {
        entries
            .par_iter()
            .map(|e| {
                let img = load_grayscale(&e.resolve(&base), &opts)?;
                let desc = describe_image(&img, &bank, args.b, args.scales, &fit_cfg)?;
                Ok(desc.vector().to_vec())
            })
            .collect()
    });

    let mut rows = Vec::new();
    let mut keys = Vec::new();
    let mut failures = Vec::new();
    for (e, r) in entries.iter().zip(results) {
        match r {
            Ok(v) => {
                keys.push(encode_row_key(&e.path, e.label.as_deref())?);
                rows.push(v);
            }
            Err(err) => failures.push(format!("{}: {err}", e.path)),
        }
    }
    for f in &failures {
        eprintln!("warning: {f}");
    }
    if !failures.is_empty() {
        eprintln!(
            "warning: {} of {} images failed",
            failures.len(),
            entries.len()
        );
        if !args.skip_errors {
            return Err(Error::InvalidConfig(format!(
                "{} of {} images failed; rerun with --skip-errors to drop them",
                failures.len(),
                entries.len()
            )));
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("every image failed to describe".into()));
    }

    let fm = FeatureMatrix::from_rows(&rows, Some(keys))?;
    save_features(&args.out, &fm)?;

    let config = json!({
        "command": "describe",
        "b": args.b, "scales": args.scales, "max_iters": args.max_iters,
        "lr": args.lr, "workers": args.workers, "skip_errors": args.skip_errors,
        "rows": fm.n(), "d": fm.d(),
    });
    let provenance = Provenance::new(0, &config)
        .with_input("bank", file_hash(&args.bank)?)
        .with_input("manifest", file_hash(&args.manifest)?);
    let mut sidecar = args.out.as_os_str().to_os_string();
    sidecar.push(".meta.json");
    let mut body = serde_json::to_string_pretty(&provenance)
        .map_err(|e| Error::CodecFailure(format!("sidecar serialization: {e}")))?;
    body.push('\n');
    atomic_write(Path::new(&sidecar), body.as_bytes())?;

    println!(
        "described {} images (d = {}) -> {}",
        fm.n(),
        fm.d(),
        args.out.display()
    );
    Ok(())
}

pub fn fit_detector(args: &FitDetectorArgs) -> Result<()> {
    let train = load_features(&args.features)?;
    let val = load_features(&args.val_features)?;
    let gmm_cfg = GmmConfig {
        components: args.components,
        seed: args.seed,
        ..Default::default()
    };
    let fit = fit_gmm(&train.rows_f64(), &gmm_cfg)?;
    let detector = calibrate_detector(fit.model, &val.rows_f64(), args.quantile)?;

    let config = json!({
        "command": "fit-detector",
        "components": args.components, "quantile": args.quantile, "seed": args.seed,
        "train_rows": train.n(), "validation_rows": val.n(), "d": train.d(),
    });
    let provenance = Provenance::new(args.seed, &config)
        .with_input("features", file_hash(&args.features)?)
        .with_input("val_features", file_hash(&args.val_features)?);
    save_model(&args.out, &detector, &provenance)?;
    println!(
        "tau_real {} (quantile {} over {} validation rows) -> {}",
        detector.tau_real,
        args.quantile,
        detector.validation_size,
        args.out.display()
    );
    Ok(())
}

pub fn detect(args: &DetectArgs) -> Result<()> {
    let (model, _) = load_model::<DetectorModel>(&args.model)?;
    let (fm, keys) = load_keyed_features(&args.features)?;
    let rows_f = fm.rows_f64();
    let mut rows = Vec::with_capacity(rows_f.len());
    let mut real = 0usize;
    for (x, (path, _)) in rows_f.iter().zip(&keys) {
        let d = crate::tasks::detect(&model, x)?;
        if d.is_real {
            real += 1;
        }
        rows.push(vec![path.clone(), format!("{}", d.score), d.label().to_string()]);
    }
    let config = json!({
        "command": "detect",
        "model": args.model.display().to_string(),
        "tau_real": model.tau_real,
        "rows": rows.len(),
    });
    write_csv(
        &args.out_scores,
        &[format!("config: {config}")],
        &["path", "score", "label"],
        rows,
    )?;
    println!(
        "scored {} rows: {} real, {} synthetic -> {}",
        keys.len(),
        real,
        keys.len() - real,
        args.out_scores.display()
    );
    Ok(())
}

pub fn fit_attributor(args: &FitAttributorArgs) -> Result<()> {
    let mut source_features: Vec<(String, Vec<Vec<f64>>)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut inputs = Vec::new();
    for pair in &args.features_per_source {
        let (label, path) = pair.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!(
                "--features-per-source takes LABEL=PATH pairs, got `{pair}`"
            ))
        })?;
        if label.is_empty() || path.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "--features-per-source takes LABEL=PATH pairs, got `{pair}`"
            )));
        }
        if !seen.insert(label.to_string()) {
            return Err(Error::InvalidConfig(format!(
                "duplicate source label `{label}`"
            )));
        }
        let fm = load_features(Path::new(path))?;
        source_features.push((label.to_string(), fm.rows_f64()));
        inputs.push((label.to_string(), file_hash(Path::new(path))?));
    }

    let gmm_cfg = GmmConfig {
        components: args.components,
        seed: args.seed,
        ..Default::default()
    };
    let model = build_attributor(&source_features, &gmm_cfg, args.quantile)?;

    let config = json!({
        "command": "fit-attributor",
        "components": args.components, "quantile": args.quantile, "seed": args.seed,
        "sources": model.labels(),
    });
    let mut provenance = Provenance::new(args.seed, &config);
    for (label, hash) in inputs {
        provenance = provenance.with_input(&format!("features:{label}"), hash);
    }
    save_model(&args.out, &model, &provenance)?;
    println!(
        "fitted {} sources, tau_reject {} -> {}",
        model.sources().len(),
        model.tau_reject,
        args.out.display()
    );
    Ok(())
}

pub fn attribute(args: &AttributeArgs) -> Result<()> {
    let (model, _) = load_model::<AttributorModel>(&args.model)?;
    let (fm, keys) = load_keyed_features(&args.features)?;
    let mut rows = Vec::with_capacity(keys.len());
    let mut rejected = 0usize;
    for (x, (path, _)) in fm.rows_f64().iter().zip(&keys) {
        let att = crate::tasks::attribute(&model, x)?;
        if att.source.is_none() {
            rejected += 1;
        }
        rows.push(vec![
            path.clone(),
            att.source.clone().unwrap_or_else(|| "unknown".to_string()),
            format!("{}", att.max_ll),
            att.candidate,
        ]);
    }
    let config = json!({
        "command": "attribute",
        "model": args.model.display().to_string(),
        "tau_reject": model.tau_reject,
        "sources": model.labels(),
        "rows": rows.len(),
    });
    write_csv(
        &args.out,
        &[format!("config: {config}")],
        &["path", "source", "max_ll", "candidate"],
        rows,
    )?;
    println!(
        "attributed {} rows ({} rejected as unknown) -> {}",
        keys.len(),
        rejected,
        args.out.display()
    );
    Ok(())
}

pub fn cluster(args: &ClusterArgs) -> Result<()> {
    let (fm, keys) = load_keyed_features(&args.features)?;
    let cfg = KmeansConfig {
        restarts: args.restarts,
        seed: args.seed,
        ..Default::default()
    };
    let outcome = kmeans(&fm.rows_f64(), args.k, &cfg)?;

    let rows: Vec<Vec<String>> = keys
        .iter()
        .zip(&outcome.assignment.assignments)
        .map(|((path, _), c)| vec![path.clone(), c.to_string()])
        .collect();
    let config = json!({
        "command": "cluster",
        "k": args.k, "restarts": args.restarts, "seed": args.seed,
        "inertia": outcome.assignment.inertia,
        "rows": rows.len(),
    });
    write_csv(
        &args.out,
        &[format!("config: {config}")],
        &["path", "cluster"],
        rows,
    )?;
    if let Some(out_model) = &args.out_model {
        let provenance = Provenance::new(args.seed, &config)
            .with_input("features", file_hash(&args.features)?);
        save_model(out_model, &outcome.assignment, &provenance)?;
    }
    println!(
        "clustered {} rows into k = {} (inertia {}) -> {}",
        keys.len(),
        args.k,
        outcome.assignment.inertia,
        args.out.display()
    );
    Ok(())
}

/// Reads a score CSV (from `detect` or `attribute`) and joins each row's
/// truth label: returns `(truth_label, numeric score, extra column)` where
/// `extra` is the named optional column (e.g. the attribution candidate).
fn joined_scores(
    scores_path: &Path,
    truth_path: &Path,
    score_col: &str,
    extra_col: Option<&str>,
) -> Result<Vec<(String, f64, Option<String>)>> {
    let table = read_csv(scores_path)?;
    let pi = table.column("path", scores_path)?;
    let si = table.column(score_col, scores_path)?;
    let ei = match extra_col {
        Some(name) => Some(table.column(name, scores_path)?),
        None => None,
    };
    let truth = truth_map(truth_path)?;
    let mut out = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let path = &row[pi];
        let label = lookup_truth(&truth, path, truth_path)?;
        let score: f64 = row[si].parse().map_err(|e| Error::Manifest {
            path: scores_path.to_path_buf(),
            reason: format!("row `{path}`: bad {score_col} `{}`: {e}", row[si]),
        })?;
        out.push((label.to_string(), score, ei.map(|i| row[i].clone())));
    }
    if out.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{} has no score rows",
            scores_path.display()
        )));
    }
    Ok(out)
}

fn require_scores<'a>(args: &'a EvalArgs, what: &str) -> Result<&'a PathBuf> {
    args.scores.as_ref().ok_or_else(|| {
        Error::InvalidConfig(format!("--metric {what} needs --scores"))
    })
}

fn reject_curve_flag(args: &EvalArgs, what: &str) -> Result<()> {
    if args.out_curve.is_some() {
        return Err(Error::InvalidConfig(format!(
            "--out-curve does not apply to --metric {what}"
        )));
    }
    Ok(())
}

fn write_curve(path: &Path, header: [&str; 2], points: &[(f64, f64)], config: &serde_json::Value) -> Result<()> {
    let rows = points
        .iter()
        .map(|(x, y)| vec![format!("{x}"), format!("{y}")])
        .collect();
    write_csv(path, &[format!("config: {config}")], &header, rows)
}

/// The label that marks the positive detection class in truth manifests.
const REAL_LABEL: &str = "real";
/// The label that marks open-set unknowns in truth manifests.
const UNKNOWN_LABEL: &str = "unknown";

pub fn eval(args: &EvalArgs) -> Result<()> {
    match args.metric {
        Metric::Auc => {
            reject_curve_flag(args, "auc")?;
            let rows = joined_scores(require_scores(args, "auc")?, &args.truth, "score", None)?;
            let real: Vec<f64> = rows.iter().filter(|r| r.0 == REAL_LABEL).map(|r| r.1).collect();
            let synth: Vec<f64> = rows.iter().filter(|r| r.0 != REAL_LABEL).map(|r| r.1).collect();
            let auc = metrics::auc(&real, &synth)?;
            println!("auc {auc}");
        }
        Metric::AuCrr => {
            let rows =
                joined_scores(require_scores(args, "au-crr")?, &args.truth, "max_ll", None)?;
            let known: Vec<f64> = rows.iter().filter(|r| r.0 != UNKNOWN_LABEL).map(|r| r.1).collect();
            let unknown: Vec<f64> = rows.iter().filter(|r| r.0 == UNKNOWN_LABEL).map(|r| r.1).collect();
            let area = metrics::au_crr(&known, &unknown)?;
            println!("au_crr {area}");
            if let Some(out) = &args.out_curve {
                let pts = metrics::crr_curve(&known, &unknown)?;
                write_curve(out, ["acceptance", "rejection"], &pts, &json!({
                    "command": "eval", "metric": "au-crr", "area": area,
                }))?;
            }
        }
        Metric::AuOscr => {
            let rows = joined_scores(
                require_scores(args, "au-oscr")?,
                &args.truth,
                "max_ll",
                Some("candidate"),
            )?;
            let known: Vec<metrics::OscrSample> = rows
                .iter()
                .filter(|r| r.0 != UNKNOWN_LABEL)
                .map(|r| metrics::OscrSample {
                    score: r.1,
                    correct: r.2.as_deref() == Some(r.0.as_str()),
                })
                .collect();
            let unknown: Vec<f64> = rows.iter().filter(|r| r.0 == UNKNOWN_LABEL).map(|r| r.1).collect();
            let area = metrics::au_oscr(&known, &unknown)?;
            println!("au_oscr {area}");
            if let Some(out) = &args.out_curve {
                let pts = metrics::oscr_curve(&known, &unknown)?;
                write_curve(out, ["fpr", "ccr"], &pts, &json!({
                    "command": "eval", "metric": "au-oscr", "area": area,
                }))?;
            }
        }
        Metric::ThresholdSweep => {
            let rows = joined_scores(
                require_scores(args, "threshold-sweep")?,
                &args.truth,
                "score",
                None,
            )?;
            let real: Vec<f64> = rows.iter().filter(|r| r.0 == REAL_LABEL).map(|r| r.1).collect();
            let synth: Vec<f64> = rows.iter().filter(|r| r.0 != REAL_LABEL).map(|r| r.1).collect();
            let mut grid: Vec<f64> = rows.iter().map(|r| r.1).collect();
            grid.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
            grid.dedup();
            let curve = metrics::accuracy_vs_threshold(&real, &synth, &grid)?;
            let (best_t, best_a) = curve
                .iter()
                .copied()
                .fold((f64::NAN, f64::NEG_INFINITY), |best, (t, a)| {
                    if a > best.1 {
                        (t, a)
                    } else {
                        best
                    }
                });
            println!("best_threshold {best_t}");
            println!("balanced_accuracy {best_a}");
            if let Some(out) = &args.out_curve {
                write_curve(out, ["threshold", "balanced_accuracy"], &curve, &json!({
                    "command": "eval", "metric": "threshold-sweep",
                    "best_threshold": best_t, "balanced_accuracy": best_a,
                }))?;
            }
        }
        Metric::Clustering => {
            reject_curve_flag(args, "clustering")?;
            let truth = truth_map(&args.truth)?;
            let (assignments, truth_labels): (Vec<usize>, Vec<String>) = match (
                &args.assignments,
                &args.features,
                args.k_multiple,
            ) {
                (Some(assignments_path), None, None) => {
                    let table = read_csv(assignments_path)?;
                    let pi = table.column("path", assignments_path)?;
                    let ci = table.column("cluster", assignments_path)?;
                    let mut a = Vec::new();
                    let mut t = Vec::new();
                    for row in &table.rows {
                        let cluster: usize = row[ci].parse().map_err(|e| Error::Manifest {
                            path: assignments_path.to_path_buf(),
                            reason: format!("row `{}`: bad cluster `{}`: {e}", row[pi], row[ci]),
                        })?;
                        a.push(cluster);
                        t.push(lookup_truth(&truth, &row[pi], &args.truth)?.to_string());
                    }
                    (a, t)
                }
                (None, Some(features_path), Some(multiple)) => {
                    if multiple == 0 {
                        return Err(Error::InvalidConfig("--k-multiple must be >= 1".into()));
                    }
                    let (fm, keys) = load_keyed_features(features_path)?;
                    let t = keys
                        .iter()
                        .map(|(p, _)| lookup_truth(&truth, p, &args.truth).map(str::to_string))
                        .collect::<Result<Vec<_>>>()?;
                    let classes: BTreeSet<&String> = t.iter().collect();
                    let k = multiple * classes.len();
                    let outcome = kmeans(
                        &fm.rows_f64(),
                        k,
                        &KmeansConfig {
                            restarts: args.restarts,
                            seed: args.seed,
                            ..Default::default()
                        },
                    )?;
                    (outcome.assignment.assignments, t)
                }
                _ => {
                    return Err(Error::InvalidConfig(
                        "--metric clustering needs either --assignments, or --features with \
                         --k-multiple"
                            .into(),
                    ))
                }
            };
            if assignments.is_empty() {
                return Err(Error::EmptyInput("no rows to score".into()));
            }
            let classes: Vec<String> = {
                let set: BTreeSet<&String> = truth_labels.iter().collect();
                set.into_iter().cloned().collect()
            };
            let class_of = |l: &String| classes.binary_search(l).expect("label from the set");
            let truth_idx: Vec<usize> = truth_labels.iter().map(class_of).collect();
            let scores = metrics::clustering_scores(&assignments, &truth_idx)?;
            let n_clusters = assignments.iter().max().map_or(0, |m| m + 1);
            println!("clusters {n_clusters}");
            println!("classes {}", classes.len());
            println!("accuracy {}", scores.accuracy);
            println!("purity {}", scores.purity);
            println!("nmi {}", scores.nmi);
        }
    }
    Ok(())
}

pub fn synth_sources(args: &SynthSourcesArgs) -> Result<()> {
    let bytes = std::fs::read(&args.spec).map_err(|e| Error::unreadable(&args.spec, e))?;
    let spec: CorpusSpec = serde_json::from_slice(&bytes).map_err(|e| {
        Error::InvalidConfig(format!("{}: spec parse: {e}", args.spec.display()))
    })?;
    let (cfg, specs) = spec.resolve()?;
    let rows = write_corpus(&cfg, &specs, &args.out_dir)?;

    let config = serde_json::to_value(&spec)
        .map_err(|e| Error::CodecFailure(format!("spec echo: {e}")))?;
    let comments = vec![
        format!("seed: {}", cfg.seed),
        format!("config: {config}"),
    ];
    let combined: Vec<ManifestEntry> = rows
        .iter()
        .map(|r| ManifestEntry {
            path: r.relative_path.to_string_lossy().into_owned(),
            label: Some(r.label.clone()),
        })
        .collect();
    write_manifest(&args.out_dir.join("manifest.csv"), &combined, &comments)?;
    for s in &specs {
        let per: Vec<ManifestEntry> = rows
            .iter()
            .filter(|r| r.label == s.label)
            .map(|r| ManifestEntry {
                path: r
                    .relative_path
                    .file_name()
                    .expect("corpus rows are files")
                    .to_string_lossy()
                    .into_owned(),
                label: Some(r.label.clone()),
            })
            .collect();
        write_manifest(&args.out_dir.join(&s.label).join("manifest.csv"), &per, &comments)?;
    }
    println!(
        "wrote {} sources x {} images -> {}",
        specs.len(),
        cfg.images_per_source,
        args.out_dir.display()
    );
    Ok(())
}

pub fn eval_robustness(args: &EvalRobustnessArgs) -> Result<()> {
    for q in &args.qualities {
        if !(1..=100).contains(q) {
            return Err(Error::InvalidConfig(format!(
                "JPEG quality must be 1..=100, got {q}"
            )));
        }
    }
    let (base, entries) = read_manifest(&args.manifest)?;
    let mut labeled = Vec::new();
    for e in &entries {
        let label = e.label.as_deref().ok_or_else(|| Error::Manifest {
            path: args.manifest.to_path_buf(),
            reason: format!("row `{}` has no label; robustness needs real/synthetic truth", e.path),
        })?;
        labeled.push((e.resolve(&base), label == REAL_LABEL));
    }
    if !labeled.iter().any(|(_, r)| *r) || !labeled.iter().any(|(_, r)| !*r) {
        return Err(Error::EmptyInput(
            "robustness needs both `real`-labeled and other rows".into(),
        ));
    }

    let (bank, _) = load_model::<FilterBank>(&args.bank)?;
    let (detector, _) = load_model::<DetectorModel>(&args.detector)?;
    let opts = PreprocessOptions {
        filter_neighborhood: bank.m(),
        ..Default::default()
    };
    let fit_cfg = FitConfig {
        lr: args.lr,
        max_iters: args.max_iters,
        ..Default::default()
    };

    let pool = thread_pool(args.workers)?;
    let images: Vec<(GrayImage, bool)> = pool.install(|| {
        labeled
            .par_iter()
            .map(|(path, is_real)| Ok((load_grayscale(path, &opts)?, *is_real)))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut table_rows = Vec::new();
    println!("quality,auc");
    for quality in std::iter::once(None).chain(args.qualities.iter().copied().map(Some)) {
        let scored: Vec<(f64, bool)> = pool.install(|| {
            images
                .par_iter()
                .map(|(img, is_real)| {
                    let processed = match quality {
                        Some(q) => jpeg_recompress(img, q)?,
                        None => img.clone(),
                    };
                    let desc = describe_image(&processed, &bank, args.b, args.scales, &fit_cfg)?;
                    let det = crate::tasks::detect(&detector, desc.vector())?;
                    Ok((det.score, *is_real))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let real: Vec<f64> = scored.iter().filter(|(_, r)| *r).map(|(s, _)| *s).collect();
        let synth: Vec<f64> = scored.iter().filter(|(_, r)| !*r).map(|(s, _)| *s).collect();
        let auc = metrics::auc(&real, &synth)?;
        let name = quality.map_or_else(|| "None".to_string(), |q| q.to_string());
        println!("{name},{auc}");
        table_rows.push(vec![name, format!("{auc}")]);
    }

    if let Some(out) = &args.out {
        let config = json!({
            "command": "eval-robustness",
            "qualities": args.qualities,
            "b": args.b, "scales": args.scales,
            "max_iters": args.max_iters, "lr": args.lr,
            "rows": images.len(),
        });
        write_csv(out, &[format!("config: {config}")], &["quality", "auc"], table_rows)?;
    }
    Ok(())
}
