//! Diagonal-covariance Gaussian mixture models over descriptor vectors.
//!
//! Descriptors are standardized per dimension (mean 0, std 1 over the
//! training set) before any density is evaluated; the standardization is part
//! of the model, so scoring always takes raw vectors. Fitting seeds the means
//! with k-means++ plus one Lloyd pass and then runs expectation-maximization
//! with per-dimension variances floored for conditioning. Scoring uses the
//! log-sum-exp stabilization, so log-likelihoods stay finite for any finite
//! input.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest per-dimension standard deviation used for standardization.
pub const STD_FLOOR: f64 = 1e-8;
/// Smallest per-dimension variance a mixture component may carry
/// (standardized space).
pub const VARIANCE_FLOOR: f64 = 1e-6;
/// Component responsibility mass below which the component is re-seeded.
const DEGENERATE_MASS: f64 = 1e-10;

/// Per-dimension standardization parameters fitted on a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl FeatureStats {
    /// Fits mean and (population) standard deviation per dimension, flooring
    /// the std at [`STD_FLOOR`].
    pub fn fit(features: &[Vec<f64>]) -> Result<Self> {
        let d = check_matrix(features)?;
        let n = features.len() as f64;
        let mut mean = vec![0.0; d];
        for row in features {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; d];
        for row in features {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var.iter().map(|s| (s / n).sqrt().max(STD_FLOOR)).collect();
        Ok(FeatureStats { mean, std })
    }

    pub fn d(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    /// Maps a raw vector into standardized space.
    pub fn standardize(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d() {
            return Err(Error::ShapeMismatch(format!(
                "vector has {} dimensions, statistics have {}",
                x.len(),
                self.d()
            )));
        }
        Ok(x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect())
    }

    fn validate(&self) -> Result<()> {
        if self.mean.is_empty() || self.mean.len() != self.std.len() {
            return Err(Error::InvalidConfig(
                "feature statistics must hold matching non-empty mean/std".into(),
            ));
        }
        if self.mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("feature means must be finite".into()));
        }
        if self.std.iter().any(|s| !s.is_finite() || *s < STD_FLOOR) {
            return Err(Error::InvalidConfig(format!(
                "feature stds must be finite and >= {STD_FLOOR}"
            )));
        }
        Ok(())
    }
}

/// A diagonal-covariance Gaussian mixture in standardized feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    variances: Vec<Vec<f64>>,
    stats: FeatureStats,
}

impl GaussianMixture {
    /// Assembles a mixture, validating every invariant.
    pub fn new(
        weights: Vec<f64>,
        means: Vec<Vec<f64>>,
        variances: Vec<Vec<f64>>,
        stats: FeatureStats,
    ) -> Result<Self> {
        let gmm = GaussianMixture {
            weights,
            means,
            variances,
            stats,
        };
        gmm.validate()?;
        Ok(gmm)
    }

    /// Component count.
    pub fn c(&self) -> usize {
        self.weights.len()
    }

    /// Feature dimension.
    pub fn d(&self) -> usize {
        self.stats.d()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Component means, standardized space.
    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    /// Per-dimension component variances, standardized space.
    pub fn variances(&self) -> &[Vec<f64>] {
        &self.variances
    }

    pub fn stats(&self) -> &FeatureStats {
        &self.stats
    }

    /// Revalidates every invariant (simplex weights, variance floor, shapes).
    pub fn validate(&self) -> Result<()> {
        self.stats.validate()?;
        let c = self.weights.len();
        if c == 0 {
            return Err(Error::InvalidConfig("mixture must have >= 1 component".into()));
        }
        if self.means.len() != c || self.variances.len() != c {
            return Err(Error::InvalidConfig(format!(
                "mixture holds {} means and {} variance rows for {c} weights",
                self.means.len(),
                self.variances.len()
            )));
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig(
                "mixture weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "mixture weights sum to {total}, must be 1 within 1e-9"
            )));
        }
        let d = self.stats.d();
        for l in 0..c {
            if self.means[l].len() != d || self.variances[l].len() != d {
                return Err(Error::InvalidConfig(format!(
                    "component {l} does not match dimension {d}"
                )));
            }
            if self.means[l].iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "component {l} mean must be finite"
                )));
            }
            if self.variances[l]
                .iter()
                .any(|v| !v.is_finite() || *v < VARIANCE_FLOOR)
            {
                return Err(Error::InvalidConfig(format!(
                    "component {l} variances must be finite and >= {VARIANCE_FLOOR}"
                )));
            }
        }
        Ok(())
    }

    /// Log-density of a raw vector under the mixture:
    /// `log sum_l pi_l N(standardize(x); mu_l, Sigma_l)`, via log-sum-exp.
    pub fn log_likelihood(&self, x: &[f64]) -> Result<f64> {
        let z = self.stats.standardize(x)?;
        Ok(self.log_likelihood_standardized(&z))
    }

    fn log_likelihood_standardized(&self, z: &[f64]) -> f64 {
        let logs: Vec<f64> = (0..self.c()).map(|l| self.log_joint(l, z)).collect();
        log_sum_exp(&logs)
    }

    /// `log pi_l + log N(z; mu_l, Sigma_l)` for one component.
    fn log_joint(&self, l: usize, z: &[f64]) -> f64 {
        let mut quad = 0.0;
        let mut logdet = 0.0;
        for ((v, m), var) in z.iter().zip(&self.means[l]).zip(&self.variances[l]) {
            let dm = v - m;
            quad += dm * dm / var;
            logdet += (2.0 * std::f64::consts::PI * var).ln();
        }
        self.weights[l].ln() + -0.5 * (logdet + quad)
    }
}

/// `log sum exp(v)` with the max-shift stabilization.
fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m; // all -inf (zero-weight components only) or a NaN input
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Settings for [`fit_gmm`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GmmConfig {
    /// Mixture components. Default 8.
    pub components: usize,
    /// Maximum EM iterations. Default 200.
    pub max_iters: usize,
    /// Relative mean-log-likelihood improvement below which EM stops.
    /// Default 1e-6.
    pub rel_tol: f64,
    /// RNG seed for the k-means++ initialization.
    pub seed: u64,
}

impl Default for GmmConfig {
    fn default() -> Self {
        GmmConfig {
            components: 8,
            max_iters: 200,
            rel_tol: 1e-6,
            seed: 0,
        }
    }
}

/// A fitted mixture plus its training trace.
#[derive(Debug, Clone)]
pub struct GmmFit {
    pub model: GaussianMixture,
    /// Mean log-likelihood before each M step. Monotonically non-decreasing;
    /// restarted if a degenerate component forces a re-seed.
    pub ll_trace: Vec<f64>,
}

/// Validates a feature matrix and returns its dimension.
pub(crate) fn check_matrix(features: &[Vec<f64>]) -> Result<usize> {
    let d = features
        .first()
        .map(|r| r.len())
        .ok_or_else(|| Error::EmptyInput("empty feature matrix".into()))?;
    if d == 0 {
        return Err(Error::EmptyInput("zero-dimensional features".into()));
    }
    for (i, row) in features.iter().enumerate() {
        if row.len() != d {
            return Err(Error::ShapeMismatch(format!(
                "feature row {i} has {} dimensions, expected {d}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "feature row {i} contains a non-finite value"
            )));
        }
    }
    Ok(d)
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding: returns `k` row indices, the first uniform, each next
/// drawn with probability proportional to its squared distance to the
/// nearest already-chosen row.
pub(crate) fn kmeans_pp_indices(
    points: &[Vec<f64>],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let n = points.len();
    debug_assert!(k >= 1 && n >= k);
    let mut chosen = Vec::with_capacity(k);
    let first = rng.gen_range(0..n);
    chosen.push(first);
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[first])).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut r = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, w) in d2.iter().enumerate() {
                if r < *w {
                    pick = i;
                    break;
                }
                r -= w;
            }
            pick
        } else {
            // All remaining points coincide with a chosen one.
            rng.gen_range(0..n)
        };
        chosen.push(next);
        for (i, p) in points.iter().enumerate() {
            let nd = sq_dist(p, &points[next]);
            if nd < d2[i] {
                d2[i] = nd;
            }
        }
    }
    chosen
}

/// Fits a diagonal-covariance Gaussian mixture by EM on standardized
/// features. Deterministic given the seed.
pub fn fit_gmm(features: &[Vec<f64>], cfg: &GmmConfig) -> Result<GmmFit> {
    let d = check_matrix(features)?;
    let c = cfg.components;
    if c == 0 {
        return Err(Error::InvalidConfig("component count must be >= 1".into()));
    }
    if cfg.max_iters == 0 || !(cfg.rel_tol >= 0.0) {
        return Err(Error::InvalidConfig(
            "max_iters must be >= 1 and rel_tol >= 0".into(),
        ));
    }
    let n = features.len();
    if n < c {
        return Err(Error::TooFewSamples {
            have: n,
            need: c,
            context: "mixture fitting needs at least one sample per component".into(),
        });
    }

    let stats = FeatureStats::fit(features)?;
    let z: Vec<Vec<f64>> = features
        .iter()
        .map(|r| stats.standardize(r).expect("dimension checked"))
        .collect();

    // Global per-dimension variance of standardized data (the re-seed and
    // init variance); ~1 except for floored dimensions.
    let global_var: Vec<f64> = {
        let mut mean = vec![0.0; d];
        for row in &z {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v / n as f64;
            }
        }
        let mut var = vec![0.0; d];
        for row in &z {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m) / n as f64;
            }
        }
        var.iter().map(|v| v.max(VARIANCE_FLOOR)).collect()
    };

    // Initialization: k-means++ seeding plus one Lloyd pass for the means.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seeds = kmeans_pp_indices(&z, c, &mut rng);
    let mut means: Vec<Vec<f64>> = seeds.iter().map(|&i| z[i].clone()).collect();
    {
        let assign: Vec<usize> = z
            .iter()
            .map(|p| {
                (0..c)
                    .min_by(|&a, &b| {
                        sq_dist(p, &means[a])
                            .partial_cmp(&sq_dist(p, &means[b]))
                            .expect("finite distances")
                    })
                    .expect("c >= 1")
            })
            .collect();
        for l in 0..c {
            let members: Vec<&Vec<f64>> =
                z.iter().zip(&assign).filter(|(_, a)| **a == l).map(|(p, _)| p).collect();
            if !members.is_empty() {
                let mut m = vec![0.0; d];
                for p in &members {
                    for (mm, v) in m.iter_mut().zip(p.iter()) {
                        *mm += v / members.len() as f64;
                    }
                }
                means[l] = m;
            }
        }
    }
    let mut weights = vec![1.0 / c as f64; c];
    let mut variances = vec![global_var.clone(); c];

    let mut trace: Vec<f64> = Vec::new();
    let mut reseeds = 0usize;
    let mut t = 0usize;
    while t < cfg.max_iters {
        t += 1;
        let model = GaussianMixture {
            weights: weights.clone(),
            means: means.clone(),
            variances: variances.clone(),
            stats: stats.clone(),
        };
        // E step.
        let mut resp = vec![vec![0.0f64; c]; n];
        let mut mean_ll = 0.0;
        for (i, zi) in z.iter().enumerate() {
            let logs: Vec<f64> = (0..c).map(|l| model.log_joint(l, zi)).collect();
            let lse = log_sum_exp(&logs);
            mean_ll += lse / n as f64;
            for l in 0..c {
                resp[i][l] = (logs[l] - lse).exp();
            }
        }
        if !mean_ll.is_finite() {
            return Err(Error::NonFinite {
                what: "mixture training log-likelihood".into(),
                step: t,
            });
        }

        // Degenerate component: responsibility mass underflow. Re-seed from
        // the worst-fit point and restart the recorded trace (the re-seed is
        // a discontinuity, so monotonicity is only promised per segment).
        let masses: Vec<f64> = (0..c)
            .map(|l| resp.iter().map(|r| r[l]).sum::<f64>())
            .collect();
        if let Some(bad) = masses.iter().position(|m| *m < DEGENERATE_MASS) {
            reseeds += 1;
            if reseeds > c {
                return Err(Error::DegenerateComponent {
                    component: bad,
                    reason: format!(
                        "responsibility mass underflowed {reseeds} times (limit {c})"
                    ),
                });
            }
            let worst = (0..n)
                .min_by(|&a, &b| {
                    let la = model.log_likelihood_standardized(&z[a]);
                    let lb = model.log_likelihood_standardized(&z[b]);
                    la.partial_cmp(&lb).expect("finite log-likelihoods")
                })
                .expect("n >= 1");
            means[bad] = z[worst].clone();
            variances[bad] = global_var.clone();
            let floor = 1.0 / n as f64;
            weights[bad] = weights[bad].max(floor);
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            trace.clear();
            continue;
        }

        trace.push(mean_ll);
        // Convergence on relative improvement.
        if trace.len() >= 2 {
            let prev = trace[trace.len() - 2];
            let rel = (mean_ll - prev) / prev.abs().max(f64::MIN_POSITIVE);
            if rel < cfg.rel_tol {
                break;
            }
        }

        // M step.
        for l in 0..c {
            weights[l] = masses[l] / n as f64;
            let mut mu = vec![0.0; d];
            for (zi, ri) in z.iter().zip(&resp) {
                for (m, v) in mu.iter_mut().zip(zi) {
                    *m += ri[l] * v;
                }
            }
            for m in &mut mu {
                *m /= masses[l];
            }
            let mut var = vec![0.0; d];
            for (zi, ri) in z.iter().zip(&resp) {
                for ((s, v), m) in var.iter_mut().zip(zi).zip(&mu) {
                    *s += ri[l] * (v - m) * (v - m);
                }
            }
            for v in &mut var {
                *v = (*v / masses[l]).max(VARIANCE_FLOOR);
            }
            means[l] = mu;
            variances[l] = var;
        }
        // Normalize away summation drift so the simplex invariant holds
        // exactly enough for validation.
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
    }

    let model = GaussianMixture::new(weights, means, variances, stats)?;
    Ok(GmmFit {
        model,
        ll_trace: trace,
    })
}
