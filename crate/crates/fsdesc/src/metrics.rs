//! Evaluation metrics: ROC-AUC, open-set separation curves, clustering
//! quality, and threshold sweeps.
//!
//! All curve areas use trapezoidal integration over thresholds swept at every
//! distinct observed score plus the two infinite endpoints. The AUC is the
//! Mann-Whitney statistic with half credit for ties, computed by sorting; its
//! final division is canonicalized so that `auc(pos, neg) + auc(neg, pos)`
//! is *exactly* 1.0 in floating point, not merely close.

use crate::error::{Error, Result};

fn check_scores(scores: &[f64], what: &str) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::EmptyInput(format!("{what} scores")));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "{what} scores contain a non-finite value"
        )));
    }
    Ok(())
}

/// Area under the ROC curve via the Mann-Whitney statistic:
/// `(#{pos > neg} + 0.5 #{pos = neg}) / (n_pos * n_neg)`.
///
/// Pair counts are accumulated by binary search over the sorted negatives
/// (O(n log n)). Counts and their total are exact in f64 up to ~2^52 pairs,
/// and the final division is canonicalized (the smaller of `U` and
/// `total - U` is divided, the other side obtained by subtraction from 1) so
/// the complement identity holds exactly.
pub fn auc(pos: &[f64], neg: &[f64]) -> Result<f64> {
    check_scores(pos, "positive")?;
    check_scores(neg, "negative")?;
    let mut sorted_neg = neg.to_vec();
    sorted_neg.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    let mut u = 0.0f64; // exact: sums of integers and halves
    for p in pos {
        let below = sorted_neg.partition_point(|n| n < p);
        let not_above = sorted_neg.partition_point(|n| n <= p);
        u += below as f64 + 0.5 * (not_above - below) as f64;
    }
    let total = (pos.len() as f64) * (neg.len() as f64);
    Ok(if 2.0 * u <= total {
        u / total
    } else {
        1.0 - (total - u) / total
    })
}

/// Trapezoidal area under a polyline given in threshold-sweep order. The
/// x coordinate must be non-decreasing along the path; points are integrated
/// in the order given (never re-sorted) so that vertical runs of the curve
/// contribute nothing instead of being cut diagonally.
fn path_area(points: &[(f64, f64)]) -> f64 {
    debug_assert!(
        points.windows(2).all(|w| w[1].0 >= w[0].0),
        "curve path must move left to right"
    );
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) * 0.5)
        .sum()
}

/// Sorted distinct values of all given score lists.
fn distinct_thresholds(lists: &[&[f64]]) -> Vec<f64> {
    let mut all: Vec<f64> = lists.iter().flat_map(|l| l.iter().copied()).collect();
    all.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    all.dedup();
    all
}

/// Area under the correct-rejection-rate curve for known-vs-unknown
/// separation.
///
/// Sweeps the threshold over every observed score: x = fraction of known
/// samples accepted (score >= t), y = fraction of unknown samples rejected
/// (score < t). By construction the area equals `auc(known, unknown)`; that
/// identity is asserted internally as a self-check.
pub fn au_crr(known: &[f64], unknown: &[f64]) -> Result<f64> {
    let points = crr_curve(known, unknown)?;
    let area = path_area(&points);
    let reference = auc(known, unknown)?;
    assert!(
        (area - reference).abs() <= 1e-9,
        "correct-rejection area {area} deviates from its Mann-Whitney \
         equivalent {reference}; the sweep construction is inconsistent"
    );
    Ok(area)
}

/// The correct-rejection curve itself, as `(acceptance, rejection)` points in
/// sweep order from `(0, 1)` to `(1, 0)`.
pub fn crr_curve(known: &[f64], unknown: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_scores(known, "known")?;
    check_scores(unknown, "unknown")?;
    let nk = known.len() as f64;
    let nu = unknown.len() as f64;
    // Sweep the threshold downward: acceptance (x) grows while correct
    // rejection (y) shrinks, tracing the curve from (0, 1) to (1, 0).
    let mut points = vec![(0.0, 1.0)]; // t = +inf
    for t in distinct_thresholds(&[known, unknown]).into_iter().rev() {
        let x = known.iter().filter(|s| **s >= t).count() as f64 / nk;
        let y = unknown.iter().filter(|s| **s < t).count() as f64 / nu;
        points.push((x, y));
    }
    points.push((1.0, 0.0)); // t = -inf
    Ok(points)
}

/// One known sample for the open-set classification-rate curve.
#[derive(Debug, Clone, Copy)]
pub struct OscrSample {
    /// The max log-likelihood over known sources.
    pub score: f64,
    /// Whether the pre-rejection argmax matched the true source.
    pub correct: bool,
}

/// Area under the open-set classification-rate curve: correct classification
/// rate of known samples (prediction right *and* score >= t) against the
/// false positive rate on unknown samples (score >= t), swept over all
/// distinct scores with the FPR in {0, 1} endpoints included.
pub fn au_oscr(known: &[OscrSample], unknown: &[f64]) -> Result<f64> {
    Ok(path_area(&oscr_curve(known, unknown)?))
}

/// The open-set classification-rate curve itself, as `(fpr, ccr)` points in
/// sweep order from `(0, 0)` to `(1, overall ccr)`.
pub fn oscr_curve(known: &[OscrSample], unknown: &[f64]) -> Result<Vec<(f64, f64)>> {
    if known.is_empty() {
        return Err(Error::EmptyInput("known samples".into()));
    }
    if known.iter().any(|s| !s.score.is_finite()) {
        return Err(Error::InvalidConfig(
            "known scores contain a non-finite value".into(),
        ));
    }
    check_scores(unknown, "unknown")?;
    let nk = known.len() as f64;
    let nu = unknown.len() as f64;
    let known_scores: Vec<f64> = known.iter().map(|s| s.score).collect();
    let overall_ccr = known.iter().filter(|s| s.correct).count() as f64 / nk;
    // Sweep the threshold downward: both the false positive rate (x) and the
    // correct classification rate (y) grow monotonically.
    let mut points = vec![(0.0, 0.0)]; // t = +inf
    for t in distinct_thresholds(&[&known_scores, unknown]).into_iter().rev() {
        let fpr = unknown.iter().filter(|s| **s >= t).count() as f64 / nu;
        let ccr = known
            .iter()
            .filter(|s| s.correct && s.score >= t)
            .count() as f64
            / nk;
        points.push((fpr, ccr));
    }
    points.push((1.0, overall_ccr)); // t = -inf
    Ok(points)
}

/// Clustering quality against ground-truth classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusteringScores {
    /// Optimal one-to-one accuracy when #clusters = #classes; majority-map
    /// macro recall otherwise.
    pub accuracy: f64,
    /// Majority-class fraction per cluster, weighted by cluster size.
    pub purity: f64,
    /// Normalized mutual information, arithmetic-mean normalization.
    pub nmi: f64,
}

/// Computes accuracy, purity, and NMI of a cluster assignment against truth
/// class indices. Both slices use dense indices starting at 0.
///
/// Accuracy follows the evaluation protocol for each regime: with as many
/// clusters as classes, the optimal one-to-one cluster-to-class assignment
/// (the Hungarian-algorithm optimum, computed here by subset dynamic
/// programming, exact for up to 20 classes); with more clusters than classes
/// (over-clustering), each cluster maps to its majority class and the
/// macro-averaged per-class recall is reported. Fewer clusters than classes
/// also uses the majority mapping.
pub fn clustering_scores(assignments: &[usize], truth: &[usize]) -> Result<ClusteringScores> {
    if assignments.is_empty() {
        return Err(Error::EmptyInput("cluster assignments".into()));
    }
    if assignments.len() != truth.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} assignments vs {} truth labels",
            assignments.len(),
            truth.len()
        )));
    }
    let n = assignments.len();
    let n_clusters = assignments.iter().max().unwrap() + 1;
    let n_classes = truth.iter().max().unwrap() + 1;
    let mut confusion = vec![vec![0usize; n_classes]; n_clusters];
    for (&c, &y) in assignments.iter().zip(truth) {
        confusion[c][y] += 1;
    }

    let purity = confusion
        .iter()
        .map(|row| row.iter().max().copied().unwrap_or(0))
        .sum::<usize>() as f64
        / n as f64;

    let accuracy = if n_clusters == n_classes {
        optimal_assignment_total(&confusion)? as f64 / n as f64
    } else {
        majority_macro_recall(&confusion)
    };

    Ok(ClusteringScores {
        accuracy,
        purity,
        nmi: nmi_from_confusion(&confusion, n),
    })
}

/// Maximum total count achievable by a one-to-one cluster-to-class
/// assignment: subset DP over classes, O(n 2^n), exact.
fn optimal_assignment_total(confusion: &[Vec<usize>]) -> Result<usize> {
    let k = confusion.len();
    if k > 20 {
        return Err(Error::InvalidConfig(format!(
            "optimal one-to-one accuracy supports up to 20 classes, got {k}"
        )));
    }
    let full = 1usize << k;
    let mut dp = vec![0usize; full];
    for mask in 1..full {
        let cluster = (mask as u32).count_ones() as usize - 1;
        let mut best = 0;
        for class in 0..k {
            if mask & (1 << class) != 0 {
                let prev = dp[mask ^ (1 << class)] + confusion[cluster][class];
                best = best.max(prev);
            }
        }
        dp[mask] = best;
    }
    Ok(dp[full - 1])
}

/// Maps each cluster to its majority class (ties to the smallest class
/// index) and returns the macro-averaged per-class recall.
fn majority_macro_recall(confusion: &[Vec<usize>]) -> f64 {
    let n_classes = confusion.first().map_or(0, Vec::len);
    let mut correct_per_class = vec![0usize; n_classes];
    for row in confusion {
        if let Some(majority) = (0..n_classes).max_by_key(|&y| (row[y], n_classes - y)) {
            correct_per_class[majority] += row[majority];
        }
    }
    let mut recalls = Vec::new();
    for y in 0..n_classes {
        let size: usize = confusion.iter().map(|row| row[y]).sum();
        if size > 0 {
            recalls.push(correct_per_class[y] as f64 / size as f64);
        }
    }
    recalls.iter().sum::<f64>() / recalls.len() as f64
}

/// `2 I(C;Y) / (H(C) + H(Y))`. Both partitions trivial (single cluster and
/// single class) means they are identical, giving 1.0; otherwise a zero
/// entropy in either partition yields 0 through `I = 0`.
fn nmi_from_confusion(confusion: &[Vec<usize>], n: usize) -> f64 {
    let nf = n as f64;
    let cluster_tot: Vec<usize> = confusion.iter().map(|r| r.iter().sum()).collect();
    let n_classes = confusion.first().map_or(0, Vec::len);
    let class_tot: Vec<usize> = (0..n_classes)
        .map(|y| confusion.iter().map(|r| r[y]).sum())
        .collect();
    let entropy = |tots: &[usize]| -> f64 {
        -tots
            .iter()
            .filter(|&&t| t > 0)
            .map(|&t| {
                let p = t as f64 / nf;
                p * p.ln()
            })
            .sum::<f64>()
    };
    let h_c = entropy(&cluster_tot);
    let h_y = entropy(&class_tot);
    if h_c + h_y == 0.0 {
        return 1.0; // both partitions are the same single block
    }
    let mut mi = 0.0;
    for (c, row) in confusion.iter().enumerate() {
        for (y, &cnt) in row.iter().enumerate() {
            if cnt > 0 {
                let p = cnt as f64 / nf;
                mi += p * (nf * cnt as f64 / (cluster_tot[c] as f64 * class_tot[y] as f64)).ln();
            }
        }
    }
    (2.0 * mi.max(0.0) / (h_c + h_y)).clamp(0.0, 1.0)
}

/// Balanced accuracy `0.5 (TPR_real + TNR_synth)` at each grid threshold,
/// with "real" meaning score >= threshold.
pub fn accuracy_vs_threshold(
    real: &[f64],
    synth: &[f64],
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    check_scores(real, "real")?;
    check_scores(synth, "synthetic")?;
    let nr = real.len() as f64;
    let ns = synth.len() as f64;
    Ok(grid
        .iter()
        .map(|&t| {
            let tpr = real.iter().filter(|s| **s >= t).count() as f64 / nr;
            let tnr = synth.iter().filter(|s| **s < t).count() as f64 / ns;
            (t, 0.5 * (tpr + tnr))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// O(n^2) pair-counting oracle.
    fn auc_brute(pos: &[f64], neg: &[f64]) -> f64 {
        let mut u = 0.0;
        for p in pos {
            for n in neg {
                if p > n {
                    u += 1.0;
                } else if p == n {
                    u += 0.5;
                }
            }
        }
        let total = (pos.len() * neg.len()) as f64;
        if 2.0 * u <= total {
            u / total
        } else {
            1.0 - (total - u) / total
        }
    }

    #[test]
    fn auc_textbook_cases() {
        assert_eq!(auc(&[1.0, 2.0], &[0.0]).unwrap(), 1.0);
        assert_eq!(auc(&[1.0], &[1.0]).unwrap(), 0.5);
        assert_eq!(auc(&[0.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!(matches!(auc(&[], &[1.0]), Err(Error::EmptyInput(_))));
        assert!(matches!(auc(&[1.0], &[]), Err(Error::EmptyInput(_))));
        assert!(auc(&[f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn auc_matches_pair_counting_with_heavy_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let np = rng.gen_range(1..40);
            let nn = rng.gen_range(1..40);
            // Integer grid forces ties within and across classes.
            let pos: Vec<f64> = (0..np).map(|_| rng.gen_range(0..10) as f64).collect();
            let neg: Vec<f64> = (0..nn).map(|_| rng.gen_range(0..10) as f64).collect();
            assert_eq!(auc(&pos, &neg).unwrap(), auc_brute(&pos, &neg));
        }
    }

    proptest! {
        /// The complement identity holds exactly, and the AUC is invariant
        /// under a strictly increasing transform of all scores.
        #[test]
        fn auc_complement_and_monotone_invariance(
            pos in proptest::collection::vec(-50i32..50, 1..30),
            neg in proptest::collection::vec(-50i32..50, 1..30),
        ) {
            let p: Vec<f64> = pos.iter().map(|v| *v as f64).collect();
            let n: Vec<f64> = neg.iter().map(|v| *v as f64).collect();
            let a = auc(&p, &n).unwrap();
            let b = auc(&n, &p).unwrap();
            prop_assert_eq!(a + b, 1.0);

            let grow = |v: f64| (0.1 * v).exp() + v; // strictly increasing
            let pt: Vec<f64> = p.iter().map(|v| grow(*v)).collect();
            let nt: Vec<f64> = n.iter().map(|v| grow(*v)).collect();
            prop_assert_eq!(auc(&pt, &nt).unwrap(), a);
        }
    }

    #[test]
    fn au_crr_matches_auc_and_endpoints() {
        assert_eq!(au_crr(&[2.0, 3.0], &[0.0, 1.0]).unwrap(), 1.0);
        let same = [1.0, 2.0, 3.0];
        assert_eq!(au_crr(&same, &same).unwrap(), 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let k: Vec<f64> = (0..15).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let u: Vec<f64> = (0..12).map(|_| rng.gen_range(-4.0..2.0)).collect();
            let area = au_crr(&k, &u).unwrap();
            let reference = auc(&k, &u).unwrap();
            assert!((area - reference).abs() <= 1e-9);
        }
    }

    /// Exhaustive-threshold oracle for the OSCR area, written independently:
    /// enumerates every distinct score as a threshold, counts directly, and
    /// integrates with the same endpoint convention.
    fn au_oscr_brute(known: &[OscrSample], unknown: &[f64]) -> f64 {
        let mut ts: Vec<f64> = known
            .iter()
            .map(|s| s.score)
            .chain(unknown.iter().copied())
            .collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup();
        let mut pts: Vec<(f64, f64)> = Vec::new();
        pts.push((0.0, 0.0));
        let nk = known.len() as f64;
        let nu = unknown.len() as f64;
        pts.push((1.0, known.iter().filter(|s| s.correct).count() as f64 / nk));
        for t in ts {
            let mut fp = 0;
            for u in unknown {
                if *u >= t {
                    fp += 1;
                }
            }
            let mut cc = 0;
            for s in known {
                if s.correct && s.score >= t {
                    cc += 1;
                }
            }
            pts.push((fp as f64 / nu, cc as f64 / nk));
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut area = 0.0;
        for w in pts.windows(2) {
            area += (w[1].0 - w[0].0) * (w[0].1 + w[1].1) * 0.5;
        }
        area
    }

    #[test]
    fn au_oscr_extremes_and_oracle() {
        let correct_sep: Vec<OscrSample> = [5.0, 6.0, 7.0]
            .iter()
            .map(|&score| OscrSample { score, correct: true })
            .collect();
        assert_eq!(au_oscr(&correct_sep, &[1.0, 2.0]).unwrap(), 1.0);

        let wrong: Vec<OscrSample> = [5.0, 6.0]
            .iter()
            .map(|&score| OscrSample { score, correct: false })
            .collect();
        assert_eq!(au_oscr(&wrong, &[1.0, 7.0]).unwrap(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..25 {
            let known: Vec<OscrSample> = (0..12)
                .map(|_| OscrSample {
                    score: rng.gen_range(0..8) as f64,
                    correct: rng.gen_bool(0.7),
                })
                .collect();
            let unknown: Vec<f64> = (0..8).map(|_| rng.gen_range(0..8) as f64).collect();
            let fast = au_oscr(&known, &unknown).unwrap();
            let brute = au_oscr_brute(&known, &unknown);
            assert!((fast - brute).abs() < 1e-12, "{fast} vs {brute}");
        }
    }

    #[test]
    fn au_oscr_never_exceeds_known_unknown_separation() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let known: Vec<OscrSample> = (0..15)
                .map(|_| OscrSample {
                    score: rng.gen_range(-2.0..4.0),
                    correct: rng.gen_bool(0.6),
                })
                .collect();
            let unknown: Vec<f64> = (0..10).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let scores: Vec<f64> = known.iter().map(|s| s.score).collect();
            assert!(
                au_oscr(&known, &unknown).unwrap() <= auc(&scores, &unknown).unwrap() + 1e-12
            );
        }
    }

    #[test]
    fn clustering_textbook_cases() {
        let s = clustering_scores(&[0, 1, 2, 0], &[0, 1, 2, 0]).unwrap();
        assert_eq!(s.accuracy, 1.0);
        assert_eq!(s.purity, 1.0);
        assert_eq!(s.nmi, 1.0);

        // Clusters {A,A,B} and {B,B}: purity (2+2)/5.
        let s = clustering_scores(&[0, 0, 0, 1, 1], &[0, 0, 1, 1, 1]).unwrap();
        assert!((s.purity - 0.8).abs() < 1e-15);

        // Relabeled perfect clustering: accuracy recovered by matching.
        let s = clustering_scores(&[1, 1, 0, 0], &[0, 0, 1, 1]).unwrap();
        assert_eq!(s.accuracy, 1.0);
        assert_eq!(s.nmi, 1.0);

        assert!(clustering_scores(&[], &[]).is_err());
        assert!(clustering_scores(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn hungarian_accuracy_on_known_confusion() {
        // Confusion [[5,1],[2,4]]: identity matching scores 9/12.
        let mut assignments = Vec::new();
        let mut truth = Vec::new();
        for (c, y, count) in [(0, 0, 5), (0, 1, 1), (1, 0, 2), (1, 1, 4)] {
            for _ in 0..count {
                assignments.push(c);
                truth.push(y);
            }
        }
        let s = clustering_scores(&assignments, &truth).unwrap();
        assert!((s.accuracy - 9.0 / 12.0).abs() < 1e-15);

        // NMI against a direct entropy-formula computation.
        let n = 12.0;
        let p = |x: f64| x / n;
        let h_c = -(p(6.0) * p(6.0).ln() + p(6.0) * p(6.0).ln());
        let h_y = -(p(7.0) * p(7.0).ln() + p(5.0) * p(5.0).ln());
        let mut mi = 0.0;
        for (joint, row, col) in [
            (5.0, 6.0, 7.0),
            (1.0, 6.0, 5.0),
            (2.0, 6.0, 7.0),
            (4.0, 6.0, 5.0),
        ] {
            mi += p(joint) * ((n * joint) / (row * col)).ln();
        }
        assert!((s.nmi - 2.0 * mi / (h_c + h_y)).abs() < 1e-12);
    }

    /// Brute-force optimal one-to-one accuracy by permutation search.
    fn permutation_accuracy(assignments: &[usize], truth: &[usize]) -> f64 {
        let k = assignments.iter().max().unwrap() + 1;
        let mut perm: Vec<usize> = (0..k).collect();
        let mut best = 0usize;
        // Heap's algorithm.
        fn heaps(k: usize, perm: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
            if k <= 1 {
                visit(perm);
                return;
            }
            for i in 0..k {
                heaps(k - 1, perm, visit);
                if k % 2 == 0 {
                    perm.swap(i, k - 1);
                } else {
                    perm.swap(0, k - 1);
                }
            }
        }
        let mut visit = |p: &[usize]| {
            let score = assignments
                .iter()
                .zip(truth)
                .filter(|(&c, &y)| p[c] == y)
                .count();
            best = best.max(score);
        };
        heaps(k, &mut perm, &mut visit);
        best as f64 / assignments.len() as f64
    }

    #[test]
    fn subset_dp_matches_brute_force_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..30 {
            let k = rng.gen_range(2..=6);
            let n = rng.gen_range(k..60);
            // Force every cluster and class index to appear so the square
            // case is exercised.
            let mut assignments: Vec<usize> = (0..k).collect();
            let mut truth: Vec<usize> = (0..k).collect();
            for _ in k..n {
                assignments.push(rng.gen_range(0..k));
                truth.push(rng.gen_range(0..k));
            }
            let s = clustering_scores(&assignments, &truth).unwrap();
            assert_eq!(s.accuracy, permutation_accuracy(&assignments, &truth));
        }
    }

    #[test]
    fn over_clustering_uses_majority_macro_recall() {
        // 4 clusters over 2 classes; clusters 0,1 -> class 0, cluster 2 ->
        // class 1, cluster 3 ties 1:1 -> class 0 (smallest index).
        let assignments = [0, 0, 1, 1, 2, 2, 2, 3, 3];
        let truth = [0, 0, 0, 0, 1, 1, 1, 0, 1];
        let s = clustering_scores(&assignments, &truth).unwrap();
        // class 0: clusters 0,1 contribute 4 correct, cluster 3 adds 1 -> 5/5.
        // class 1: cluster 2 contributes 3 -> 3/4.
        let expected = 0.5 * (5.0 / 5.0 + 3.0 / 4.0);
        assert!((s.accuracy - expected).abs() < 1e-15, "{}", s.accuracy);
    }

    #[test]
    fn purity_dominates_accuracy_in_the_square_case_and_nmi_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..20 {
            let k = rng.gen_range(2..5);
            let n = rng.gen_range(k..50);
            let mut a: Vec<usize> = (0..k).collect();
            let mut t: Vec<usize> = (0..k).collect();
            for _ in k..n {
                a.push(rng.gen_range(0..k));
                t.push(rng.gen_range(0..k));
            }
            let s = clustering_scores(&a, &t).unwrap();
            assert!(s.purity >= s.accuracy - 1e-12);
            assert!(s.purity >= 1.0 / k as f64);
            let swapped = clustering_scores(&t, &a).unwrap();
            assert!((s.nmi - swapped.nmi).abs() < 1e-12);
        }
    }

    #[test]
    fn threshold_sweep_balanced_accuracy() {
        let real = [1.0, 2.0, 3.0];
        let synth = [-1.0, -2.0];
        let curve = accuracy_vs_threshold(&real, &synth, &[-10.0, 0.0, 10.0]).unwrap();
        assert_eq!(curve[0], (-10.0, 0.5)); // everything called real
        assert_eq!(curve[1], (0.0, 1.0)); // perfect separation
        assert_eq!(curve[2], (10.0, 0.5)); // everything called synthetic

        // Random instance against a direct counting oracle.
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let r: Vec<f64> = (0..20).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let s: Vec<f64> = (0..15).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let grid: Vec<f64> = (0..11).map(|i| -2.0 + 0.4 * i as f64).collect();
        for (t, acc) in accuracy_vs_threshold(&r, &s, &grid).unwrap() {
            let tp = r.iter().filter(|v| **v >= t).count() as f64;
            let tn = s.iter().filter(|v| **v < t).count() as f64;
            let expected = 0.5 * (tp / r.len() as f64 + tn / s.len() as f64);
            assert_eq!(acc, expected);
        }
    }
}
