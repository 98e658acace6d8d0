//! Open-set source attribution: name which known pipeline produced an image,
//! or reject it as coming from an unknown one. Measures closed-set accuracy,
//! unknown rejection, and the AU-CRR / AU-OSCR open-set curves.
//!
//! Uses a fixed high-pass filter bank so the example runs in seconds; the
//! production pipeline trains the bank on real images first (see the
//! `train_filters` and `zero_shot_detection` examples).
//!
//! Run with `cargo run --release --example open_set_attribution`.

use fsdesc::filterbank::{fixed_highpass_bank, FixedBankKind};
use fsdesc::metrics::{au_crr, au_oscr, OscrSample};
use fsdesc::mixture::GmmConfig;
use fsdesc::selfdesc::{describe_image, FitConfig};
use fsdesc::synth::{render, source_specs, SynthConfig};
use fsdesc::tasks::{attribute, build_attributor};

const B: usize = 7;
const LEVELS: usize = 2;
const KNOWN: usize = 4;

fn main() -> fsdesc::Result<()> {
    // Six pipelines: sources 0..=3 are known at enrollment time, 4..=5 stay
    // hidden until test time.
    let cfg = SynthConfig {
        sources: 6,
        images_per_source: 35,
        width: 64,
        height: 64,
        noise_sigma: 0.01,
        seed: 9,
    };
    let specs = source_specs(cfg.sources)?;
    let bank = fixed_highpass_bank(FixedBankKind::Hp3x3);
    let fit_cfg = FitConfig {
        max_iters: 2000,
        ..FitConfig::default()
    };

    let describe = |source: usize, indices: std::ops::Range<usize>| -> fsdesc::Result<Vec<Vec<f64>>> {
        indices
            .map(|i| {
                let img = render(&cfg, &specs, source, i)?;
                Ok(describe_image(&img, &bank, B, LEVELS, &fit_cfg)?.vector().to_vec())
            })
            .collect()
    };

    // Enroll each known source: 25 images for its density model, quantile
    // thresholds derived from the same enrollment set.
    println!("enrolling {KNOWN} known sources (25 images each)...");
    let enrollment: Vec<(String, Vec<Vec<f64>>)> = (0..KNOWN)
        .map(|s| Ok((specs[s].label.clone(), describe(s, 0..25)?)))
        .collect::<fsdesc::Result<_>>()?;
    let attributor = build_attributor(
        &enrollment,
        &GmmConfig {
            components: 2,
            seed: 17,
            ..GmmConfig::default()
        },
        0.05,
    )?;
    println!(
        "attributor: sources = [{}], tau_reject = {:.3}",
        attributor.labels().join(", "),
        attributor.tau_reject
    );

    // Known-source test images: were they named correctly, and did any get
    // wrongly rejected?
    let mut known_samples: Vec<OscrSample> = Vec::new();
    let mut correct = 0usize;
    let mut known_total = 0usize;
    let mut known_rejected = 0usize;
    for s in 0..KNOWN {
        for x in &describe(s, 25..35)? {
            let att = attribute(&attributor, x)?;
            let is_correct = att.candidate == specs[s].label;
            correct += usize::from(is_correct);
            known_rejected += usize::from(att.source.is_none());
            known_samples.push(OscrSample {
                score: att.max_ll,
                correct: is_correct,
            });
            known_total += 1;
        }
    }
    println!(
        "known test: {}/{} attributed to the right source, {} wrongly rejected",
        correct, known_total, known_rejected
    );

    // Unknown-source test images: the only right answer is rejection.
    let mut unknown_lls: Vec<f64> = Vec::new();
    let mut unknown_rejected = 0usize;
    for s in KNOWN..cfg.sources {
        let mut rejected = 0usize;
        let feats = describe(s, 25..35)?;
        for x in &feats {
            let att = attribute(&attributor, x)?;
            rejected += usize::from(att.source.is_none());
            unknown_lls.push(att.max_ll);
        }
        println!(
            "unknown source {}: {}/{} rejected",
            specs[s].label,
            rejected,
            feats.len()
        );
        unknown_rejected += rejected;
    }

    // Threshold-free open-set quality: AU-CRR sweeps the rejection threshold,
    // AU-OSCR trades correct classification against false acceptance.
    let known_lls: Vec<f64> = known_samples.iter().map(|s| s.score).collect();
    let crr = au_crr(&known_lls, &unknown_lls)?;
    let oscr = au_oscr(&known_samples, &unknown_lls)?;
    println!("AU-CRR = {:.3}, AU-OSCR = {:.3}", crr, oscr);

    let closed_acc = correct as f64 / known_total as f64;
    let reject_rate = unknown_rejected as f64 / unknown_lls.len() as f64;
    println!(
        "closed-set accuracy = {:.3}, unknown rejection rate = {:.3}",
        closed_acc, reject_rate
    );
    assert!(closed_acc > 0.7, "expected decent closed-set accuracy");
    assert!(crr > 0.6, "expected better-than-chance unknown separation");
    Ok(())
}
