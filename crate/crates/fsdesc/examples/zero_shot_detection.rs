//! Zero-shot synthetic-image detection: the detector sees only real images
//! (filter training, density fitting, threshold calibration) and is then
//! asked to flag images from processing pipelines it has never seen.
//!
//! Run with `cargo run --release --example zero_shot_detection`.

use fsdesc::filterbank::{train_filter_bank, FilterBank, TrainConfig};
use fsdesc::metrics::auc;
use fsdesc::mixture::{fit_gmm, GmmConfig};
use fsdesc::selfdesc::{describe_image, FitConfig};
use fsdesc::synth::{render, source_specs, SourceSpec, SynthConfig};
use fsdesc::tasks::{calibrate_detector, detect};

const B: usize = 5;
const LEVELS: usize = 2;

fn main() -> fsdesc::Result<()> {
    // Source 0 is the identity pipeline and plays the role of real images;
    // sources 1..=3 are unseen resampling pipelines (the "generators").
    let cfg = SynthConfig {
        sources: 4,
        images_per_source: 60,
        width: 64,
        height: 64,
        noise_sigma: 0.01,
        seed: 42,
    };
    let specs = source_specs(cfg.sources)?;

    // Real-image splits: filters + density on train, threshold on val,
    // scoring on test. Synthetic test images reuse the test scene indices so
    // the only difference is the pipeline, never the content.
    let train_idx: Vec<usize> = (0..30).collect();
    let val_idx: Vec<usize> = (30..45).collect();
    let test_idx: Vec<usize> = (45..60).collect();

    let train_reals: Vec<_> = train_idx
        .iter()
        .map(|&i| render(&cfg, &specs, 0, i))
        .collect::<fsdesc::Result<_>>()?;
    println!("training {}-filter bank on {} real images...", 2, train_reals.len());
    let outcome = train_filter_bank(
        &train_reals,
        &TrainConfig {
            k: 2,
            m: 5,
            epochs: 4,
            crop: 48,
            seed: 3,
            ..TrainConfig::default()
        },
    )?;
    let bank = outcome.bank;
    println!(
        "bank trained: sigma_min {:.4} -> {:.4} (diverse filters)",
        outcome.init_sigma_min,
        outcome.trace.last().map_or(f64::NAN, |s| s.sigma_min)
    );

    let fit_cfg = FitConfig {
        max_iters: 2000,
        ..FitConfig::default()
    };
    let feats = |source: usize, indices: &[usize]| -> fsdesc::Result<Vec<Vec<f64>>> {
        descriptors(&cfg, &specs, source, indices, &bank, &fit_cfg)
    };

    let train_feats = feats(0, &train_idx)?;
    let val_feats = feats(0, &val_idx)?;
    let real_test = feats(0, &test_idx)?;
    println!(
        "descriptors: d = {} ({} train / {} val / {} real test)",
        train_feats[0].len(),
        train_feats.len(),
        val_feats.len(),
        real_test.len()
    );

    // Density of real descriptors + the 5% validation quantile as the
    // real-vs-synthetic threshold. No synthetic image is used anywhere here.
    let gmm_fit = fit_gmm(
        &train_feats,
        &GmmConfig {
            components: 2,
            seed: 5,
            ..GmmConfig::default()
        },
    )?;
    let detector = calibrate_detector(gmm_fit.model, &val_feats, 0.05)?;
    println!(
        "detector: tau_real = {:.3} (q = {}, {} validation reals)",
        detector.tau_real, detector.quantile, detector.validation_size
    );

    let real_detections = real_test
        .iter()
        .map(|x| detect(&detector, x))
        .collect::<fsdesc::Result<Vec<_>>>()?;
    let real_scores: Vec<f64> = real_detections.iter().map(|d| d.score).collect();
    let kept = real_detections.iter().filter(|d| d.is_real).count();
    println!("real test: {}/{} accepted as real", kept, real_test.len());

    let mut all_synth_scores = Vec::new();
    for source in 1..cfg.sources {
        let synth_feats = feats(source, &test_idx)?;
        let detections = synth_feats
            .iter()
            .map(|x| detect(&detector, x))
            .collect::<fsdesc::Result<Vec<_>>>()?;
        let scores: Vec<f64> = detections.iter().map(|d| d.score).collect();
        let flagged = detections.iter().filter(|d| !d.is_real).count();
        let source_auc = auc(&real_scores, &scores)?;
        println!(
            "source {} ({}): {}/{} flagged synthetic, AUC vs real = {:.3}",
            specs[source].label,
            source,
            flagged,
            scores.len(),
            source_auc
        );
        all_synth_scores.extend(scores);
    }

    let overall = auc(&real_scores, &all_synth_scores)?;
    println!("overall zero-shot AUC (real vs all unseen pipelines) = {:.3}", overall);
    assert!(overall > 0.8, "expected clear separation, got AUC {overall}");
    Ok(())
}

fn descriptors(
    cfg: &SynthConfig,
    specs: &[SourceSpec],
    source: usize,
    indices: &[usize],
    bank: &FilterBank,
    fit_cfg: &FitConfig,
) -> fsdesc::Result<Vec<Vec<f64>>> {
    indices
        .iter()
        .map(|&i| {
            let img = render(cfg, specs, source, i)?;
            Ok(describe_image(&img, bank, B, LEVELS, fit_cfg)?.vector().to_vec())
        })
        .collect()
}
