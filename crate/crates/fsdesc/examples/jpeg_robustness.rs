//! Robustness check: how well does real-vs-synthetic detection survive JPEG
//! recompression of the test images at decreasing quality factors?
//!
//! Run with `cargo run --release --example jpeg_robustness`.

use fsdesc::filterbank::{fixed_highpass_bank, FixedBankKind};
use fsdesc::imaging::{jpeg_recompress, GrayImage};
use fsdesc::metrics::auc;
use fsdesc::mixture::{fit_gmm, GmmConfig};
use fsdesc::selfdesc::{describe_image, FitConfig};
use fsdesc::synth::{render, source_specs, SynthConfig};
use fsdesc::tasks::{calibrate_detector, detect};

const B: usize = 5;
const LEVELS: usize = 2;

fn main() -> fsdesc::Result<()> {
    // Source 0 stands in for real images, source 1 for a synthesis pipeline.
    let cfg = SynthConfig {
        sources: 2,
        images_per_source: 55,
        width: 64,
        height: 64,
        noise_sigma: 0.01,
        seed: 77,
    };
    let specs = source_specs(cfg.sources)?;
    let bank = fixed_highpass_bank(FixedBankKind::Hp3x3);
    let fit_cfg = FitConfig {
        max_iters: 2000,
        ..FitConfig::default()
    };
    let describe = |img: &GrayImage| -> fsdesc::Result<Vec<f64>> {
        Ok(describe_image(img, &bank, B, LEVELS, &fit_cfg)?.vector().to_vec())
    };

    // Calibrate the detector on clean real images only (30 train, 10 val).
    let train_feats: Vec<Vec<f64>> = (0..30)
        .map(|i| describe(&render(&cfg, &specs, 0, i)?))
        .collect::<fsdesc::Result<_>>()?;
    let val_feats: Vec<Vec<f64>> = (30..40)
        .map(|i| describe(&render(&cfg, &specs, 0, i)?))
        .collect::<fsdesc::Result<_>>()?;
    let gmm_fit = fit_gmm(
        &train_feats,
        &GmmConfig {
            components: 2,
            seed: 13,
            ..GmmConfig::default()
        },
    )?;
    let detector = calibrate_detector(gmm_fit.model, &val_feats, 0.05)?;
    println!(
        "detector calibrated on clean reals (d = {}, tau_real = {:.3})",
        train_feats[0].len(),
        detector.tau_real
    );

    // Held-out test images, loaded once and recompressed per quality level.
    let test_reals: Vec<GrayImage> = (40..55)
        .map(|i| render(&cfg, &specs, 0, i))
        .collect::<fsdesc::Result<_>>()?;
    let test_synths: Vec<GrayImage> = (40..55)
        .map(|i| render(&cfg, &specs, 1, i))
        .collect::<fsdesc::Result<_>>()?;

    println!("quality, auc");
    let mut clean_auc = f64::NAN;
    let mut last_auc = f64::NAN;
    for quality in [None, Some(90u8), Some(70), Some(50)] {
        let score_all = |imgs: &[GrayImage]| -> fsdesc::Result<Vec<f64>> {
            imgs.iter()
                .map(|img| {
                    let processed = match quality {
                        Some(q) => jpeg_recompress(img, q)?,
                        None => img.clone(),
                    };
                    Ok(detect(&detector, &describe(&processed)?)?.score)
                })
                .collect()
        };
        let value = auc(&score_all(&test_reals)?, &score_all(&test_synths)?)?;
        match quality {
            None => {
                clean_auc = value;
                println!("none, {value:.3}");
            }
            Some(q) => println!("{q}, {value:.3}"),
        }
        last_auc = value;
    }

    println!(
        "degradation from clean to quality 50: {:.3}",
        clean_auc - last_auc
    );
    assert!(clean_auc > 0.8, "clean separation should be clear");
    Ok(())
}
