//! Unsupervised source discovery: cluster per-image descriptors with
//! restarted k-means, once with k equal to the number of pipelines and once
//! over-clustered, and score the groupings against the hidden truth.
//!
//! Run with `cargo run --release --example source_clustering`.

use fsdesc::filterbank::{fixed_highpass_bank, FixedBankKind};
use fsdesc::metrics::clustering_scores;
use fsdesc::selfdesc::{describe_image, FitConfig};
use fsdesc::synth::{render, source_specs, SynthConfig};
use fsdesc::tasks::{kmeans, silhouette, KmeansConfig};

const B: usize = 7;
const LEVELS: usize = 2;

fn main() -> fsdesc::Result<()> {
    // Four pipelines, twenty images each; nobody tells the clusterer which
    // image came from which pipeline.
    let cfg = SynthConfig {
        sources: 4,
        images_per_source: 20,
        width: 64,
        height: 64,
        noise_sigma: 0.01,
        seed: 23,
    };
    let specs = source_specs(cfg.sources)?;
    let bank = fixed_highpass_bank(FixedBankKind::Hp3x3);
    let fit_cfg = FitConfig {
        max_iters: 2000,
        ..FitConfig::default()
    };

    let mut features: Vec<Vec<f64>> = Vec::new();
    let mut truth: Vec<usize> = Vec::new();
    for source in 0..cfg.sources {
        for index in 0..cfg.images_per_source {
            let img = render(&cfg, &specs, source, index)?;
            features.push(describe_image(&img, &bank, B, LEVELS, &fit_cfg)?.vector().to_vec());
            truth.push(source);
        }
    }
    println!(
        "described {} images from {} hidden pipelines (d = {})",
        features.len(),
        cfg.sources,
        features[0].len()
    );

    let km_cfg = KmeansConfig {
        restarts: 8,
        seed: 31,
        ..KmeansConfig::default()
    };

    // k = number of pipelines: can the clusters be matched one-to-one?
    let outcome = kmeans(&features, cfg.sources, &km_cfg)?;
    let scores = clustering_scores(&outcome.assignment.assignments, &truth)?;
    let sil = silhouette(&features, &outcome.assignment.assignments)?;
    println!(
        "k = {}: inertia {:.4} ({} trace steps), accuracy {:.3}, purity {:.3}, NMI {:.3}",
        cfg.sources,
        outcome.assignment.inertia,
        outcome.inertia_trace.len(),
        scores.accuracy,
        scores.purity,
        scores.nmi
    );
    println!("silhouette at k = {}: {:.3}", cfg.sources, sil);

    // Over-clustering (k = 2x pipelines): purity stays meaningful because
    // each cluster still maps to its majority pipeline.
    let k_over = 2 * cfg.sources;
    let over = kmeans(&features, k_over, &km_cfg)?;
    let over_scores = clustering_scores(&over.assignment.assignments, &truth)?;
    println!(
        "k = {}: accuracy {:.3} (macro recall), purity {:.3}, NMI {:.3}",
        k_over, over_scores.accuracy, over_scores.purity, over_scores.nmi
    );

    // Per-cluster composition at the matched k, as a small contingency table.
    println!("cluster composition (rows = clusters, columns = true pipelines):");
    let mut table = vec![vec![0usize; cfg.sources]; cfg.sources];
    for (&c, &t) in outcome.assignment.assignments.iter().zip(&truth) {
        table[c][t] += 1;
    }
    for (c, row) in table.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|n| format!("{n:3}")).collect();
        println!("  cluster {c}: {}", cells.join(" "));
    }

    assert!(scores.purity > 0.6, "expected mostly pure clusters");
    Ok(())
}
