//! Command-line front end wiring the full pipeline: filter-bank training,
//! batch descriptor extraction, detector/attributor fitting, scoring,
//! clustering, metric evaluation, synthetic corpus generation, and the JPEG
//! robustness harness.
//!
//! Exit codes: 0 on success, 1 on domain errors (bad data, failed fits),
//! 2 on usage and file-access errors.

pub mod manifest;
mod ops;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "fsdesc",
    version,
    about = "Forensic self-descriptions: residual modeling for image provenance",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn the constrained predictive filter bank from real images.
    TrainFilters(TrainFiltersArgs),
    /// Extract one self-description vector per manifest image.
    Describe(DescribeArgs),
    /// Fit the zero-shot detector: a mixture over real-image descriptors
    /// plus a calibrated threshold.
    FitDetector(FitDetectorArgs),
    /// Score descriptors against a detector and write real/synthetic calls.
    Detect(DetectArgs),
    /// Fit one mixture per known source plus a rejection threshold.
    FitAttributor(FitAttributorArgs),
    /// Attribute descriptors to known sources, rejecting to `unknown`.
    Attribute(AttributeArgs),
    /// Cluster descriptors with seeded, restarted k-means.
    Cluster(ClusterArgs),
    /// Compute evaluation metrics from score/assignment files.
    Eval(EvalArgs),
    /// Materialize the synthetic multi-source PNG corpus from a spec file.
    SynthSources(SynthSourcesArgs),
    /// Measure detector AUC under JPEG recompression at several qualities.
    EvalRobustness(EvalRobustnessArgs),
}

#[derive(Debug, Args)]
pub struct TrainFiltersArgs {
    /// Manifest CSV of real training images.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output filter-bank model file (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Number of filters.
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    /// Odd filter neighborhood side.
    #[arg(long, default_value_t = 11)]
    pub m: usize,
    /// Weight of the spectral diversity penalty.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Adam learning rate.
    #[arg(long, default_value_t = 0.001)]
    pub lr: f64,
    /// Passes over the corpus.
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    /// Side of the random training crop drawn per image per epoch.
    #[arg(long, default_value_t = 128)]
    pub crop: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    /// Manifest CSV of images to describe.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Filter-bank model file.
    #[arg(long)]
    pub bank: PathBuf,
    /// Output feature matrix file; a `<out>.meta.json` sidecar records the
    /// configuration and input hashes.
    #[arg(long)]
    pub out: PathBuf,
    /// Odd residual-model neighborhood side.
    #[arg(long, default_value_t = 11)]
    pub b: usize,
    /// Number of dyadic scales.
    #[arg(long, default_value_t = 3)]
    pub scales: usize,
    /// Worker threads (0 = one per CPU). Output bytes are identical for any
    /// worker count.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Iteration cap for the per-image coefficient fit.
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Initial learning rate for the per-image coefficient fit.
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,
    /// Drop images that fail (with a warning summary) instead of erroring.
    #[arg(long)]
    pub skip_errors: bool,
}

#[derive(Debug, Args)]
pub struct FitDetectorArgs {
    /// Feature matrix of real-image descriptors (training).
    #[arg(long)]
    pub features: PathBuf,
    /// Feature matrix of held-out real-image descriptors (calibration).
    #[arg(long)]
    pub val_features: PathBuf,
    /// Mixture components.
    #[arg(long, default_value_t = 8)]
    pub components: usize,
    /// Calibration quantile of validation log-likelihoods.
    #[arg(long, default_value_t = 0.05)]
    pub quantile: f64,
    /// Output detector model file (JSON).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Feature matrix to score (with per-row identity lines).
    #[arg(long)]
    pub features: PathBuf,
    /// Detector model file.
    #[arg(long)]
    pub model: PathBuf,
    /// Output CSV `path,score,label`.
    #[arg(long)]
    pub out_scores: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitAttributorArgs {
    /// One `label=features.fsdf` pair per known source (repeatable).
    #[arg(long = "features-per-source", value_name = "LABEL=PATH", required = true)]
    pub features_per_source: Vec<String>,
    /// Mixture components per source.
    #[arg(long, default_value_t = 8)]
    pub components: usize,
    /// Per-source quantile of training log-likelihoods; the rejection
    /// threshold is the minimum over sources.
    #[arg(long, default_value_t = 0.05)]
    pub quantile: f64,
    /// Output attributor model file (JSON).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AttributeArgs {
    /// Feature matrix to attribute (with per-row identity lines).
    #[arg(long)]
    pub features: PathBuf,
    /// Attributor model file.
    #[arg(long)]
    pub model: PathBuf,
    /// Output CSV `path,source,max_ll,candidate` (`source` is `unknown`
    /// when rejected; `candidate` is the pre-rejection argmax).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Feature matrix to cluster (with per-row identity lines).
    #[arg(long)]
    pub features: PathBuf,
    /// Number of clusters.
    #[arg(long)]
    pub k: usize,
    /// Independent seeded restarts; lowest inertia wins.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV `path,cluster`.
    #[arg(long)]
    pub out: PathBuf,
    /// Optionally save the clustering (centroids, inertia) as a model file.
    #[arg(long)]
    pub out_model: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    /// Detection AUC: `real`-labeled rows vs all others, from a detect CSV.
    Auc,
    /// Area under the correct-rejection curve, from an attribute CSV.
    AuCrr,
    /// Area under the open-set classification-rate curve, from an attribute
    /// CSV.
    AuOscr,
    /// Accuracy / purity / NMI of a clustering against labeled truth.
    Clustering,
    /// Balanced-accuracy sweep over detection thresholds, from a detect CSV.
    ThresholdSweep,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Which metric to compute.
    #[arg(long, value_enum)]
    pub metric: Metric,
    /// Truth manifest CSV (`path,label`); every scored row must appear.
    /// The literal label `unknown` marks open-set unknowns; the literal
    /// label `real` marks the positive detection class.
    #[arg(long)]
    pub truth: PathBuf,
    /// Score CSV from `detect` (auc, threshold-sweep) or `attribute`
    /// (au-crr, au-oscr).
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Assignment CSV from `cluster` (clustering metric).
    #[arg(long)]
    pub assignments: Option<PathBuf>,
    /// Feature matrix; with --k-multiple, clustering runs in-process at
    /// k = multiple x number-of-truth-classes.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Cluster-count multiple of the truth class count (the 1/2/4 protocol).
    #[arg(long)]
    pub k_multiple: Option<usize>,
    /// K-means restarts for --k-multiple runs.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    /// Seed for --k-multiple runs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the metric's curve points as CSV (au-crr, au-oscr,
    /// threshold-sweep only).
    #[arg(long)]
    pub out_curve: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthSourcesArgs {
    /// Corpus spec JSON: seed, noise, counts, size, and sources (a count
    /// drawing from the built-in kernel library, or explicit kernels).
    #[arg(long)]
    pub spec: PathBuf,
    /// Directory to materialize PNGs and manifests into.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalRobustnessArgs {
    /// Manifest CSV with `real` vs other labels (both classes required).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Filter-bank model file.
    #[arg(long)]
    pub bank: PathBuf,
    /// Detector model file.
    #[arg(long)]
    pub detector: PathBuf,
    /// JPEG qualities to re-encode at; the uncompressed (`None`) row is
    /// always reported first.
    #[arg(long, value_delimiter = ',', default_value = "100,90,80,70,60,50")]
    pub qualities: Vec<u8>,
    /// Optionally also write the `quality,auc` table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Odd residual-model neighborhood side.
    #[arg(long, default_value_t = 11)]
    pub b: usize,
    /// Number of dyadic scales.
    #[arg(long, default_value_t = 3)]
    pub scales: usize,
    /// Iteration cap for the per-image coefficient fit.
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Initial learning rate for the per-image coefficient fit.
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,
    /// Worker threads (0 = one per CPU).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

/// Parses and runs the process arguments; returns the process exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Parses and runs any argument list (used by tests to drive the CLI
/// in-process). Returns the exit code: 0 success, 1 domain error, 2 usage
/// or file-access error.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::TrainFilters(a) => ops::train_filters(&a),
        Command::Describe(a) => ops::describe(&a),
        Command::FitDetector(a) => ops::fit_detector(&a),
        Command::Detect(a) => ops::detect(&a),
        Command::FitAttributor(a) => ops::fit_attributor(&a),
        Command::Attribute(a) => ops::attribute(&a),
        Command::Cluster(a) => ops::cluster(&a),
        Command::Eval(a) => ops::eval(&a),
        Command::SynthSources(a) => ops::synth_sources(&a),
        Command::EvalRobustness(a) => ops::eval_robustness(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
