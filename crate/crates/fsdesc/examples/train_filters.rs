//! Train a constrained predictive filter bank on "plain capture" images.
//!
//! The bank learns to predict each pixel from its neighborhood under two hard
//! constraints (zero center weight, remaining weights summing to one), with a
//! spectral diversity penalty keeping the filters from collapsing onto each
//! other. Run with `cargo run --example train_filters`.

use fsdesc::filterbank::{train_filter_bank, FilterBank, TrainConfig};
use fsdesc::store::{load_model, save_model, Provenance};
use fsdesc::synth::{render, source_specs, SynthConfig};

fn main() -> fsdesc::Result<()> {
    // Sixteen 96x96 images from the identity pipeline: shared smoothed-noise
    // scenes plus per-image sensor-like noise.
    let corpus_cfg = SynthConfig {
        sources: 1,
        images_per_source: 16,
        width: 96,
        height: 96,
        noise_sigma: 0.02,
        seed: 11,
    };
    let specs = source_specs(corpus_cfg.sources)?;
    let corpus = (0..corpus_cfg.images_per_source)
        .map(|i| render(&corpus_cfg, &specs, 0, i))
        .collect::<fsdesc::Result<Vec<_>>>()?;
    println!("training corpus: {} images, 96x96", corpus.len());

    let cfg = TrainConfig {
        k: 4,
        m: 7,
        epochs: 6,
        crop: 64,
        seed: 0,
        ..Default::default()
    };
    let outcome = train_filter_bank(&corpus, &cfg)?;
    let first = outcome.trace.first().expect("at least one step");
    let last = outcome.trace.last().expect("at least one step");

    println!("optimizer steps: {}", outcome.trace.len());
    println!(
        "residual energy:   {:.6} -> {:.6}",
        first.energy, last.energy
    );
    println!(
        "diversity penalty: {:+.3} -> {:+.3}",
        first.diversity, last.diversity
    );
    println!(
        "sigma_min of the stacked bank: {:.6} (right after init: {:.6})",
        last.sigma_min, outcome.init_sigma_min
    );
    println!(
        "constraint drift after projection: |center| <= {:.2e}, |sum-1| <= {:.2e}",
        last.center_abs_max, last.sum_dev_max
    );

    // Persist the bank and load it back; loading re-validates every filter
    // constraint, so no invalid bank can come out of a file.
    let dir = tempfile::tempdir().expect("temporary directory");
    let path = dir.path().join("bank.json");
    let provenance = Provenance::new(cfg.seed, &serde_json::json!({
        "k": cfg.k, "m": cfg.m, "epochs": cfg.epochs, "crop": cfg.crop,
    }));
    save_model(&path, &outcome.bank, &provenance)?;
    let (reloaded, prov) = load_model::<FilterBank>(&path)?;
    assert_eq!(reloaded, outcome.bank);
    println!(
        "saved + reloaded bank: {} filters of {}x{}, created_unix {}",
        reloaded.k(),
        reloaded.m(),
        reloaded.m(),
        prov.created_unix
    );
    Ok(())
}
