//! The three applications built on descriptor mixtures: zero-shot detection,
//! open-set source attribution, and unsupervised clustering.
//!
//! * Detection fits one mixture to *real* images only and thresholds the
//!   log-likelihood at a calibrated quantile `tau_real`: an image is called
//!   real iff its score is at or above the threshold.
//! * Attribution keeps one mixture per known source, picks the argmax source
//!   (ties broken by lexicographic label order), and rejects to "unknown"
//!   when even the best log-likelihood falls below `tau_reject`.
//! * Clustering runs seeded, restarted k-means over descriptors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::{check_matrix, fit_gmm, kmeans_pp_indices, sq_dist, GaussianMixture, GmmConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Derives a stream-specific seed from a base seed (splitmix64 step),
/// so independent sub-tasks (restarts, per-source fits, per-image noise)
/// get decorrelated but reproducible randomness.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(stream.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Lower quantile with linear interpolation between order statistics
/// (`h = (n-1) q`, the common "type 7" rule): `q = 0` gives the minimum,
/// `q = 1` the maximum.
pub fn linear_quantile(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput("quantile of an empty sample".into()));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidConfig(format!(
            "quantile must be in [0, 1], got {q}"
        )));
    }
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// A calibrated zero-shot detector: a mixture over real-image descriptors
/// plus a log-likelihood threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    /// Mixture fitted on real images only.
    pub gmm: GaussianMixture,
    /// Log-likelihood at or above which an image is called real.
    pub tau_real: f64,
    /// The validation quantile `tau_real` was calibrated at.
    pub quantile: f64,
    /// Size of the calibration set.
    pub validation_size: usize,
}

impl DetectorModel {
    pub fn validate(&self) -> Result<()> {
        self.gmm.validate()?;
        if !self.tau_real.is_finite() {
            return Err(Error::InvalidConfig(
                "detector threshold must be finite".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.quantile) {
            return Err(Error::InvalidConfig(
                "detector calibration quantile must be in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Calibrates `tau_real` as the given lower quantile of the validation
/// reals' log-likelihoods.
pub fn calibrate_detector(
    gmm: GaussianMixture,
    validation_reals: &[Vec<f64>],
    quantile: f64,
) -> Result<DetectorModel> {
    if validation_reals.is_empty() {
        return Err(Error::EmptyInput("detector validation set".into()));
    }
    let mut lls = validation_reals
        .iter()
        .map(|x| gmm.log_likelihood(x))
        .collect::<Result<Vec<f64>>>()?;
    lls.sort_by(|a, b| a.partial_cmp(b).expect("finite log-likelihoods"));
    let tau_real = linear_quantile(&lls, quantile)?;
    let model = DetectorModel {
        gmm,
        tau_real,
        quantile,
        validation_size: validation_reals.len(),
    };
    model.validate()?;
    Ok(model)
}

/// One detection decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    /// Log-likelihood under the real-image mixture.
    pub score: f64,
    /// `score >= tau_real` (the boundary itself is called real).
    pub is_real: bool,
}

impl Detection {
    pub fn label(&self) -> &'static str {
        if self.is_real {
            "real"
        } else {
            "synthetic"
        }
    }
}

/// Scores a descriptor and applies the threshold rule.
pub fn detect(model: &DetectorModel, x: &[f64]) -> Result<Detection> {
    let score = model.gmm.log_likelihood(x)?;
    Ok(Detection {
        score,
        is_real: score >= model.tau_real,
    })
}

/// One known source inside an attributor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceEntry {
    pub label: String,
    pub model: GaussianMixture,
    /// This source's own calibration quantile of training log-likelihoods
    /// (the rejection threshold is the minimum of these).
    pub own_tau: f64,
}

/// Open-set attributor: one mixture per known source plus a rejection
/// threshold on the max log-likelihood. Sources are kept sorted by label so
/// argmax ties resolve lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributorModel {
    sources: Vec<SourceEntry>,
    pub tau_reject: f64,
}

impl AttributorModel {
    /// Assembles an attributor from per-source mixtures; labels must be
    /// unique and dimensions must agree. `tau_reject` may be infinite
    /// (`-inf` never rejects, `+inf` always rejects).
    pub fn new(mut sources: Vec<SourceEntry>, tau_reject: f64) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::EmptyInput("attributor with no sources".into()));
        }
        sources.sort_by(|a, b| a.label.cmp(&b.label));
        let model = AttributorModel {
            sources,
            tau_reject,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sources.is_empty() {
            return Err(Error::EmptyInput("attributor with no sources".into()));
        }
        let d = self.sources[0].model.d();
        for pair in self.sources.windows(2) {
            if pair[0].label >= pair[1].label {
                return Err(Error::InvalidConfig(format!(
                    "source labels must be unique and sorted, found '{}' then '{}'",
                    pair[0].label, pair[1].label
                )));
            }
        }
        for s in &self.sources {
            s.model.validate()?;
            if s.model.d() != d {
                return Err(Error::InvalidConfig(format!(
                    "source '{}' has dimension {}, expected {d}",
                    s.label,
                    s.model.d()
                )));
            }
            if s.own_tau.is_nan() {
                return Err(Error::InvalidConfig(format!(
                    "source '{}' calibration threshold is NaN",
                    s.label
                )));
            }
        }
        if self.tau_reject.is_nan() {
            return Err(Error::InvalidConfig(
                "rejection threshold must not be NaN".into(),
            ));
        }
        Ok(())
    }

    /// Sources in model (lexicographic) order.
    pub fn sources(&self) -> &[SourceEntry] {
        &self.sources
    }

    pub fn labels(&self) -> Vec<&str> {
        self.sources.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn d(&self) -> usize {
        self.sources[0].model.d()
    }
}

/// One attribution decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Attribution {
    /// The attributed source, or `None` when rejected as unknown.
    pub source: Option<String>,
    /// The pre-rejection argmax source (used by open-set curves, which need
    /// the hypothetical classification of every sample).
    pub candidate: String,
    /// Log-likelihood of the argmax source.
    pub max_ll: f64,
    /// Per-source log-likelihoods, in model label order.
    pub scores: Vec<f64>,
}

/// Index of the maximum score; ties resolve to the first (lexicographically
/// smallest label, since sources are sorted). Invariant under adding any
/// common constant to all scores.
fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

/// Scores a descriptor against every known source and applies the
/// argmax/reject rule: unknown iff the best log-likelihood is below
/// `tau_reject`.
pub fn attribute(model: &AttributorModel, x: &[f64]) -> Result<Attribution> {
    let scores = model
        .sources
        .iter()
        .map(|s| s.model.log_likelihood(x))
        .collect::<Result<Vec<f64>>>()?;
    let best = argmax(&scores);
    let max_ll = scores[best];
    let candidate = model.sources[best].label.clone();
    let source = if max_ll < model.tau_reject {
        None
    } else {
        Some(candidate.clone())
    };
    Ok(Attribution {
        source,
        candidate,
        max_ll,
        scores,
    })
}

/// Fits one mixture per source and calibrates the rejection threshold as the
/// minimum over sources of each source's own `quantile` of training
/// log-likelihoods. Per-source seeds derive from `cfg.seed` and the source's
/// position in sorted label order.
pub fn build_attributor(
    source_features: &[(String, Vec<Vec<f64>>)],
    cfg: &GmmConfig,
    quantile: f64,
) -> Result<AttributorModel> {
    if source_features.is_empty() {
        return Err(Error::EmptyInput("attributor with no sources".into()));
    }
    let mut order: Vec<usize> = (0..source_features.len()).collect();
    order.sort_by(|&a, &b| source_features[a].0.cmp(&source_features[b].0));
    let mut sources = Vec::with_capacity(order.len());
    for (rank, &i) in order.iter().enumerate() {
        let (label, features) = &source_features[i];
        let fit = fit_gmm(
            features,
            &GmmConfig {
                seed: derive_seed(cfg.seed, rank as u64),
                ..cfg.clone()
            },
        )?;
        let mut lls = features
            .iter()
            .map(|x| fit.model.log_likelihood(x))
            .collect::<Result<Vec<f64>>>()?;
        lls.sort_by(|a, b| a.partial_cmp(b).expect("finite log-likelihoods"));
        let own_tau = linear_quantile(&lls, quantile)?;
        sources.push(SourceEntry {
            label: label.clone(),
            model: fit.model,
            own_tau,
        });
    }
    let tau_reject = sources
        .iter()
        .map(|s| s.own_tau)
        .fold(f64::INFINITY, f64::min);
    AttributorModel::new(sources, tau_reject)
}

/// Settings for [`kmeans`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KmeansConfig {
    /// Independent seeded restarts; the lowest-inertia run wins (ties to the
    /// earliest restart). Default 10.
    pub restarts: usize,
    /// Lloyd iteration cap per restart. Default 300.
    pub max_iters: usize,
    /// Stop when no centroid moves farther than this. Default 1e-6.
    pub tol: f64,
    /// Base RNG seed; restart `r` uses a seed derived from it.
    pub seed: u64,
}

impl Default for KmeansConfig {
    fn default() -> Self {
        KmeansConfig {
            restarts: 10,
            max_iters: 300,
            tol: 1e-6,
            seed: 0,
        }
    }
}

/// A k-means clustering result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    /// Cluster index per input row, each in `[0, k)`.
    pub assignments: Vec<usize>,
    /// Cluster centers.
    pub centroids: Vec<Vec<f64>>,
    /// Total squared distance of rows to their centroids.
    pub inertia: f64,
    pub k: usize,
}

impl ClusterAssignment {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.centroids.len() != self.k {
            return Err(Error::InvalidConfig(format!(
                "clustering must hold k >= 1 centroids, got {} for k = {}",
                self.centroids.len(),
                self.k
            )));
        }
        if self.assignments.iter().any(|a| *a >= self.k) {
            return Err(Error::InvalidConfig(
                "cluster index out of range".into(),
            ));
        }
        let d = self.centroids[0].len();
        if self.centroids.iter().any(|c| c.len() != d) {
            return Err(Error::InvalidConfig(
                "centroids must share one dimension".into(),
            ));
        }
        if self
            .centroids
            .iter()
            .flatten()
            .any(|v| !v.is_finite())
            || !self.inertia.is_finite()
            || self.inertia < 0.0
        {
            return Err(Error::InvalidConfig(
                "centroids and inertia must be finite (inertia >= 0)".into(),
            ));
        }
        Ok(())
    }
}

/// K-means plus the winning restart's inertia trace (one entry per Lloyd
/// assignment phase, non-increasing).
#[derive(Debug, Clone)]
pub struct KmeansOutcome {
    pub assignment: ClusterAssignment,
    pub inertia_trace: Vec<f64>,
}

fn nearest_centroid(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = sq_dist(point, &centroids[0]);
    for (i, c) in centroids.iter().enumerate().skip(1) {
        let d = sq_dist(point, c);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    (best, best_d)
}

/// Moves each empty cluster's centroid onto the point currently farthest
/// from its assigned centroid (ties to the lowest row index); each empty
/// cluster consumes a different point. Returns true if anything moved.
fn reseed_empty_clusters(
    centroids: &mut [Vec<f64>],
    assignments: &[usize],
    points: &[Vec<f64>],
) -> bool {
    let k = centroids.len();
    let mut counts = vec![0usize; k];
    for &a in assignments {
        counts[a] += 1;
    }
    let mut used: Vec<usize> = Vec::new();
    let mut moved = false;
    for l in 0..k {
        if counts[l] > 0 {
            continue;
        }
        let far = points
            .iter()
            .enumerate()
            .filter(|(i, _)| !used.contains(i))
            .map(|(i, p)| (i, sq_dist(p, &centroids[assignments[i]])))
            .max_by(|a, b| {
                a.1.partial_cmp(&b.1)
                    .expect("finite distances")
                    .then(b.0.cmp(&a.0)) // ties -> lowest index
            })
            .map(|(i, _)| i);
        if let Some(i) = far {
            centroids[l] = points[i].clone();
            used.push(i);
            moved = true;
        }
    }
    moved
}

/// Seeded k-means with k-means++ initialization, restarts, and deterministic
/// empty-cluster re-seeding. Returns the restart with minimum inertia.
pub fn kmeans(features: &[Vec<f64>], k: usize, cfg: &KmeansConfig) -> Result<KmeansOutcome> {
    let d = check_matrix(features)?;
    let n = features.len();
    if k == 0 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    if n < k {
        return Err(Error::TooFewSamples {
            have: n,
            need: k,
            context: "k-means needs at least one row per cluster".into(),
        });
    }
    if cfg.restarts == 0 || cfg.max_iters == 0 || !(cfg.tol >= 0.0) {
        return Err(Error::InvalidConfig(
            "restarts and max_iters must be >= 1 and tol >= 0".into(),
        ));
    }

    let mut best: Option<KmeansOutcome> = None;
    for restart in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, restart as u64));
        let seeds = kmeans_pp_indices(features, k, &mut rng);
        let mut centroids: Vec<Vec<f64>> = seeds.iter().map(|&i| features[i].clone()).collect();
        let mut assignments = vec![0usize; n];
        let mut trace = Vec::new();

        for _ in 0..cfg.max_iters {
            // Assignment phase.
            let mut step_inertia = 0.0;
            for (i, p) in features.iter().enumerate() {
                let (a, dd) = nearest_centroid(p, &centroids);
                assignments[i] = a;
                step_inertia += dd;
            }
            trace.push(step_inertia);

            // Update phase.
            let mut sums = vec![vec![0.0f64; d]; k];
            let mut counts = vec![0usize; k];
            for (p, &a) in features.iter().zip(&assignments) {
                counts[a] += 1;
                for (s, v) in sums[a].iter_mut().zip(p) {
                    *s += v;
                }
            }
            let mut shift: f64 = 0.0;
            for l in 0..k {
                if counts[l] > 0 {
                    let mut c = sums[l].clone();
                    for v in &mut c {
                        *v /= counts[l] as f64;
                    }
                    shift = shift.max(sq_dist(&c, &centroids[l]).sqrt());
                    centroids[l] = c;
                }
            }
            let reseeded = reseed_empty_clusters(&mut centroids, &assignments, features);
            if !reseeded && shift < cfg.tol {
                break;
            }
        }

        // Final assignment against the final centroids.
        let mut inertia = 0.0;
        for (i, p) in features.iter().enumerate() {
            let (a, dd) = nearest_centroid(p, &centroids);
            assignments[i] = a;
            inertia += dd;
        }
        trace.push(inertia);

        let better = match &best {
            None => true,
            Some(b) => inertia < b.assignment.inertia,
        };
        if better {
            best = Some(KmeansOutcome {
                assignment: ClusterAssignment {
                    assignments: assignments.clone(),
                    centroids,
                    inertia,
                    k,
                },
                inertia_trace: trace,
            });
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// Mean silhouette coefficient over all points: `(b - a) / max(a, b)` with
/// `a` the mean intra-cluster distance and `b` the smallest mean distance to
/// another cluster. Singleton clusters contribute 0, as does the 0/0 case of
/// coincident points.
pub fn silhouette(features: &[Vec<f64>], assignments: &[usize]) -> Result<f64> {
    check_matrix(features)?;
    if features.len() != assignments.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows vs {} assignments",
            features.len(),
            assignments.len()
        )));
    }
    let k = assignments.iter().max().map_or(0, |m| m + 1);
    if k < 2 {
        return Err(Error::SingleCluster);
    }
    let mut counts = vec![0usize; k];
    for &a in assignments {
        counts[a] += 1;
    }
    if let Some(empty) = counts.iter().position(|&c| c == 0) {
        return Err(Error::InvalidConfig(format!(
            "silhouette requires every cluster non-empty; cluster {empty} is empty"
        )));
    }
    let n = features.len();
    let mut total = 0.0;
    for i in 0..n {
        let own = assignments[i];
        if counts[own] == 1 {
            continue; // singleton contributes 0
        }
        let mut dist_sum = vec![0.0f64; k];
        for j in 0..n {
            if i != j {
                dist_sum[assignments[j]] += sq_dist(&features[i], &features[j]).sqrt();
            }
        }
        let a = dist_sum[own] / (counts[own] - 1) as f64;
        let b = (0..k)
            .filter(|&l| l != own)
            .map(|l| dist_sum[l] / counts[l] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        } // else 0/0 -> contributes 0
    }
    Ok(total / n as f64)
}
