//! A seeded generator of toy image sources with distinct linear processing
//! signatures, for end-to-end exercises of detection, attribution, and
//! clustering.
//!
//! Every source renders the *same* underlying scenes (seeded smoothed noise,
//! shared across sources by image index) so that descriptors can only tell
//! sources apart by their processing pipelines, never by content. A source's
//! pipeline is a small convolution kernel (source 0 is the identity — the
//! "plain capture" analog) followed by i.i.d. Gaussian pixel noise whose seed
//! depends on both source and image index.

use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::correlate_valid;
use crate::imaging::{save_png16, GrayImage};
use crate::tasks::derive_seed;

/// Largest number of sources the built-in kernel library supports.
pub const MAX_SOURCES: usize = 10;

/// Settings for corpus generation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Number of distinct sources (1 ..= [`MAX_SOURCES`]); source 0 is the
    /// identity pipeline.
    pub sources: usize,
    pub images_per_source: usize,
    pub width: usize,
    pub height: usize,
    /// Standard deviation of the per-pixel Gaussian noise, in [0, 1] units.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            sources: 5,
            images_per_source: 40,
            width: 192,
            height: 192,
            noise_sigma: 0.02,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sources == 0 {
            return Err(Error::InvalidConfig("sources must be >= 1".into()));
        }
        if self.images_per_source == 0 {
            return Err(Error::InvalidConfig("images_per_source must be >= 1".into()));
        }
        if self.width < 16 || self.height < 16 {
            return Err(Error::TooSmall {
                width: self.width,
                height: self.height,
                min_side: 16,
                context: "synthetic corpus image size".into(),
            });
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "noise_sigma must be finite and >= 0, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// One source's identity: a label and its processing kernel (row-major
/// `m x m`, entries summing to 1).
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub label: String,
    pub kernel: Vec<f64>,
    pub m: usize,
}

/// Blend `(1 - beta) * identity + beta * shape` for a 3x3 `shape`.
fn blend3(shape: [f64; 9], beta: f64) -> Vec<f64> {
    let mut k = vec![0.0; 9];
    k[4] = 1.0 - beta;
    for (dst, s) in k.iter_mut().zip(shape) {
        *dst += beta * s;
    }
    k
}

/// The first `n` sources from the built-in library. Source 0 is the
/// identity; the rest apply distinct low-order linear signatures (directional
/// blurs, box/Gaussian blurs, sharpening, sub-pixel shifts).
pub fn source_specs(n: usize) -> Result<Vec<SourceSpec>> {
    if n == 0 || n > MAX_SOURCES {
        return Err(Error::InvalidConfig(format!(
            "sources must be 1..={MAX_SOURCES}, got {n}"
        )));
    }
    let t = 1.0 / 3.0;
    let mut identity = vec![0.0; 9];
    identity[4] = 1.0;
    let sharpen: Vec<f64> = {
        // identity + lambda * (identity - box): sum stays 1.
        let lambda = 0.7;
        let mut k = vec![-lambda / 9.0; 9];
        k[4] += 1.0 + lambda;
        k
    };
    let kernels: [Vec<f64>; MAX_SOURCES] = [
        identity,
        blend3([0.0, 0.0, 0.0, t, t, t, 0.0, 0.0, 0.0], 0.8), // horizontal blur
        blend3([0.0, t, 0.0, 0.0, t, 0.0, 0.0, t, 0.0], 0.8), // vertical blur
        blend3([1.0 / 9.0; 9], 0.8),                          // box blur
        blend3([t, 0.0, 0.0, 0.0, t, 0.0, 0.0, 0.0, t], 0.8), // diagonal blur
        blend3([0.0, 0.0, t, 0.0, t, 0.0, t, 0.0, 0.0], 0.8), // anti-diagonal
        sharpen,
        blend3(
            [
                1.0 / 16.0,
                2.0 / 16.0,
                1.0 / 16.0,
                2.0 / 16.0,
                4.0 / 16.0,
                2.0 / 16.0,
                1.0 / 16.0,
                2.0 / 16.0,
                1.0 / 16.0,
            ],
            0.9,
        ), // Gaussian blur
        blend3([0.0, 0.0, 0.0, 0.0, 0.3, 0.7, 0.0, 0.0, 0.0], 1.0), // horizontal sub-pixel shift
        blend3([0.0, 0.0, 0.0, 0.0, 0.3, 0.0, 0.0, 0.7, 0.0], 1.0), // vertical sub-pixel shift
    ];
    let specs: Vec<SourceSpec> = kernels
        .into_iter()
        .take(n)
        .enumerate()
        .map(|(i, kernel)| SourceSpec {
            label: format!("src{i}"),
            kernel,
            m: 3,
        })
        .collect();
    // Paranoia: kernels must each sum to 1 and be pairwise distinct, or the
    // sources would be indistinguishable by construction.
    for s in &specs {
        let sum: f64 = s.kernel.iter().sum();
        debug_assert!((sum - 1.0).abs() < 1e-12, "kernel '{}' sums to {sum}", s.label);
    }
    for i in 0..specs.len() {
        for j in i + 1..specs.len() {
            let gap = specs[i]
                .kernel
                .iter()
                .zip(&specs[j].kernel)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if gap < 1e-6 {
                return Err(Error::InvalidConfig(format!(
                    "kernels for '{}' and '{}' coincide",
                    specs[i].label, specs[j].label
                )));
            }
        }
    }
    Ok(specs)
}

/// The shared scene for image `index`: smoothed seeded noise, rescaled into
/// `[0.1, 0.9]`, oversized by `margin` pixels on each side so a later valid
/// convolution lands exactly on `height x width`.
pub fn scene(cfg: &SynthConfig, index: usize, margin: usize) -> Array2<f64> {
    let h = cfg.height + margin;
    let w = cfg.width + margin;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, index as u64));
    let mut field = Array2::from_shape_fn((h, w), |_| rng.gen_range(0.0..1.0));

    // Two passes of a separable 5-tap box blur give the content gentle
    // spatial correlation without any spectral fine structure of its own.
    let radius = 2usize;
    for _ in 0..2 {
        let mut tmp = field.clone();
        for y in 0..h {
            for x in 0..w {
                let lo = x.saturating_sub(radius);
                let hi = (x + radius).min(w - 1);
                let mut acc = 0.0;
                for xx in lo..=hi {
                    acc += field[(y, xx)];
                }
                tmp[(y, x)] = acc / (hi - lo + 1) as f64;
            }
        }
        for x in 0..w {
            for y in 0..h {
                let lo = y.saturating_sub(radius);
                let hi = (y + radius).min(h - 1);
                let mut acc = 0.0;
                for yy in lo..=hi {
                    acc += tmp[(yy, x)];
                }
                field[(y, x)] = acc / (hi - lo + 1) as f64;
            }
        }
    }

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in field.iter() {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if hi > lo {
        field.mapv_inplace(|v| 0.1 + 0.8 * (v - lo) / (hi - lo));
    } else {
        field.fill(0.5);
    }
    field
}

/// Renders one image: shared scene, valid convolution with the source's
/// kernel, per-(source, image) Gaussian noise, clamp to `[0, 1]`.
pub fn render(cfg: &SynthConfig, specs: &[SourceSpec], source: usize, index: usize) -> Result<GrayImage> {
    cfg.validate()?;
    let spec = specs.get(source).ok_or_else(|| {
        Error::InvalidConfig(format!("source index {source} out of range"))
    })?;
    let bg = scene(cfg, index, spec.m - 1);
    let mut out = correlate_valid(&bg, &spec.kernel, spec.m);

    if cfg.noise_sigma > 0.0 {
        let noise_base = derive_seed(cfg.seed ^ 0x6e6f_6973_65u64, source as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(noise_base, index as u64));
        for v in out.iter_mut() {
            *v += cfg.noise_sigma * randn(&mut rng);
        }
    }
    out.mapv_inplace(|v| v.clamp(0.0, 1.0));
    GrayImage::from_array(out)
}

/// One standard normal draw (Box-Muller).
fn randn(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// A corpus row: where an image was written and which source made it.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusRow {
    /// Path relative to the corpus root, e.g. `src2/img_0013.png`.
    pub relative_path: PathBuf,
    pub label: String,
}

/// Renders the whole corpus under `out_dir` as 16-bit PNGs, one subdirectory
/// per source, and returns the rows in (source, index) order.
pub fn write_corpus(cfg: &SynthConfig, specs: &[SourceSpec], out_dir: &Path) -> Result<Vec<CorpusRow>> {
    cfg.validate()?;
    if specs.is_empty() {
        return Err(Error::EmptyInput("corpus with no sources".into()));
    }
    let mut rows = Vec::with_capacity(specs.len() * cfg.images_per_source);
    for (s, spec) in specs.iter().enumerate() {
        let dir = out_dir.join(&spec.label);
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for i in 0..cfg.images_per_source {
            let img = render(cfg, specs, s, i)?;
            let rel = PathBuf::from(&spec.label).join(format!("img_{i:04}.png"));
            save_png16(&out_dir.join(&rel), &img)?;
            rows.push(CorpusRow {
                relative_path: rel,
                label: spec.label.clone(),
            });
        }
    }
    Ok(rows)
}

/// The JSON document accepted as a corpus specification: generation settings
/// plus either a source count (drawing kernels from the built-in library) or
/// explicit per-source kernels.
///
/// ```json
/// { "seed": 7, "noise_sigma": 0.02, "images_per_source": 40,
///   "width": 192, "height": 192, "sources": 5 }
/// ```
///
/// or, with explicit kernels (each a square odd-sided matrix summing to 1):
///
/// ```json
/// { "seed": 7, "noise_sigma": 0.02, "images_per_source": 40,
///   "width": 192, "height": 192,
///   "sources": [ { "label": "cam", "kernel": [[0,0,0],[0,1,0],[0,0,0]] } ] }
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub noise_sigma: f64,
    pub images_per_source: usize,
    pub width: usize,
    pub height: usize,
    pub sources: SourceSet,
}

/// Either "use the first n library sources" or explicit per-source kernels.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SourceSet {
    Count(usize),
    Explicit(Vec<ExplicitSource>),
}

/// One explicitly specified source: a label and a square odd-sided kernel
/// whose entries sum to 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplicitSource {
    pub label: String,
    pub kernel: Vec<Vec<f64>>,
}

impl CorpusSpec {
    /// Validates the document and lowers it to generation settings plus
    /// concrete source specs. Kernels must be pairwise distinct and labels
    /// unique.
    pub fn resolve(&self) -> Result<(SynthConfig, Vec<SourceSpec>)> {
        let specs = match &self.sources {
            SourceSet::Count(n) => source_specs(*n)?,
            SourceSet::Explicit(list) => {
                if list.is_empty() {
                    return Err(Error::EmptyInput("corpus with no sources".into()));
                }
                let mut specs = Vec::with_capacity(list.len());
                for src in list {
                    if src.label.is_empty() || src.label.contains(['/', '\n', ',']) {
                        return Err(Error::InvalidConfig(format!(
                            "source label '{}' must be non-empty and free of '/', ',' and newlines",
                            src.label
                        )));
                    }
                    let m = src.kernel.len();
                    if m == 0 || m % 2 == 0 || src.kernel.iter().any(|r| r.len() != m) {
                        return Err(Error::InvalidConfig(format!(
                            "kernel for '{}' must be square with odd side",
                            src.label
                        )));
                    }
                    let flat: Vec<f64> = src.kernel.iter().flatten().copied().collect();
                    if flat.iter().any(|v| !v.is_finite()) {
                        return Err(Error::InvalidConfig(format!(
                            "kernel for '{}' contains a non-finite entry",
                            src.label
                        )));
                    }
                    let sum: f64 = flat.iter().sum();
                    if (sum - 1.0).abs() > 1e-9 {
                        return Err(Error::InvalidConfig(format!(
                            "kernel for '{}' sums to {sum}, must be 1",
                            src.label
                        )));
                    }
                    specs.push(SourceSpec {
                        label: src.label.clone(),
                        kernel: flat,
                        m,
                    });
                }
                for i in 0..specs.len() {
                    for j in i + 1..specs.len() {
                        if specs[i].label == specs[j].label {
                            return Err(Error::InvalidConfig(format!(
                                "duplicate source label '{}'",
                                specs[i].label
                            )));
                        }
                        if specs[i].m == specs[j].m {
                            let gap = specs[i]
                                .kernel
                                .iter()
                                .zip(&specs[j].kernel)
                                .map(|(a, b)| (a - b).abs())
                                .fold(0.0f64, f64::max);
                            if gap < 1e-6 {
                                return Err(Error::InvalidConfig(format!(
                                    "kernels for '{}' and '{}' coincide",
                                    specs[i].label, specs[j].label
                                )));
                            }
                        }
                    }
                }
                specs
            }
        };
        let cfg = SynthConfig {
            sources: specs.len(),
            images_per_source: self.images_per_source,
            width: self.width,
            height: self.height,
            noise_sigma: self.noise_sigma,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok((cfg, specs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SynthConfig {
        SynthConfig {
            sources: 3,
            images_per_source: 2,
            width: 48,
            height: 40,
            noise_sigma: 0.02,
            seed: 7,
        }
    }

    #[test]
    fn kernels_sum_to_one_and_differ() {
        let specs = source_specs(MAX_SOURCES).unwrap();
        assert_eq!(specs.len(), MAX_SOURCES);
        for s in &specs {
            let sum: f64 = s.kernel.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "{}: {sum}", s.label);
            assert_eq!(s.kernel.len(), s.m * s.m);
        }
        assert!(source_specs(0).is_err());
        assert!(source_specs(MAX_SOURCES + 1).is_err());
        // Labels sort in source order.
        let labels: Vec<&str> = specs.iter().map(|s| s.label.as_str()).collect();
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        assert_eq!(labels, sorted);
    }

    #[test]
    fn rendering_is_deterministic_and_in_range() {
        let cfg = small();
        let specs = source_specs(cfg.sources).unwrap();
        let a = render(&cfg, &specs, 1, 0).unwrap();
        let b = render(&cfg, &specs, 1, 0).unwrap();
        assert_eq!(a.as_array(), b.as_array());
        assert_eq!((a.height(), a.width()), (cfg.height, cfg.width));
        assert!(a.as_array().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn identity_source_reproduces_the_scene_without_noise() {
        let cfg = SynthConfig {
            noise_sigma: 0.0,
            ..small()
        };
        let specs = source_specs(cfg.sources).unwrap();
        let img = render(&cfg, &specs, 0, 1).unwrap();
        let bg = scene(&cfg, 1, 2);
        // Valid correlation with the identity kernel is the center crop.
        for y in 0..cfg.height {
            for x in 0..cfg.width {
                assert_eq!(img.as_array()[(y, x)], bg[(y + 1, x + 1)]);
            }
        }
    }

    #[test]
    fn sources_share_scenes_but_differ_in_processing() {
        let cfg = SynthConfig {
            noise_sigma: 0.0,
            ..small()
        };
        let specs = source_specs(cfg.sources).unwrap();
        let a = render(&cfg, &specs, 0, 0).unwrap();
        let b = render(&cfg, &specs, 1, 0).unwrap();
        let c = render(&cfg, &specs, 0, 1).unwrap();

        let mean_abs = |x: &GrayImage, y: &GrayImage| {
            x.as_array()
                .iter()
                .zip(y.as_array())
                .map(|(p, q)| (p - q).abs())
                .sum::<f64>()
                / (cfg.width * cfg.height) as f64
        };
        let kernel_gap = mean_abs(&a, &b);
        let scene_gap = mean_abs(&a, &c);
        assert!(kernel_gap > 1e-5, "kernels must leave a visible signature");
        assert!(
            scene_gap > kernel_gap,
            "content changes across indices ({scene_gap:.4}) should dwarf \
             the kernel signature within one scene ({kernel_gap:.4})"
        );
    }

    #[test]
    fn per_source_noise_streams_are_decorrelated() {
        let cfg = small();
        let specs = source_specs(cfg.sources).unwrap();
        // Same scene and kernel index 0 vs noise: two sources with the
        // identity kernel would coincide iff they shared a noise stream.
        let clean = SynthConfig {
            noise_sigma: 0.0,
            ..cfg.clone()
        };
        let noisy_a = render(&cfg, &specs, 0, 0).unwrap();
        let bare = render(&clean, &specs, 0, 0).unwrap();
        assert_ne!(noisy_a.as_array(), bare.as_array());
    }

    #[test]
    fn corpus_writes_loadable_files_with_labels() {
        let cfg = small();
        let dir = tempfile::tempdir().unwrap();
        let rows = write_corpus(&cfg, &source_specs(cfg.sources).unwrap(), dir.path()).unwrap();
        assert_eq!(rows.len(), cfg.sources * cfg.images_per_source);
        let opts = crate::imaging::PreprocessOptions {
            crop_max_side: None,
            ..Default::default()
        };
        for row in &rows {
            assert!(row.relative_path.starts_with(&row.label));
            let img = crate::imaging::load_grayscale(&dir.path().join(&row.relative_path), &opts)
                .unwrap();
            assert_eq!((img.height(), img.width()), (cfg.height, cfg.width));
        }
        // Round-trip is faithful to 16-bit quantization.
        let specs = source_specs(cfg.sources).unwrap();
        let fresh = render(&cfg, &specs, 0, 0).unwrap();
        let loaded =
            crate::imaging::load_grayscale(&dir.path().join(&rows[0].relative_path), &opts)
                .unwrap();
        let worst = fresh
            .as_array()
            .iter()
            .zip(loaded.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst <= 0.5 / 65535.0 + 1e-12, "worst gap {worst}");
    }

    #[test]
    fn config_validation_rejects_nonsense() {
        let mut cfg = small();
        cfg.width = 4;
        assert!(cfg.validate().is_err());
        let mut cfg = small();
        cfg.noise_sigma = -0.1;
        assert!(cfg.validate().is_err());
        let mut cfg = small();
        cfg.images_per_source = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn corpus_spec_resolves_counts_and_explicit_kernels() {
        let by_count: CorpusSpec = serde_json::from_str(
            r#"{ "seed": 3, "noise_sigma": 0.01, "images_per_source": 2,
                 "width": 48, "height": 48, "sources": 4 }"#,
        )
        .unwrap();
        let (cfg, specs) = by_count.resolve().unwrap();
        assert_eq!(cfg.sources, 4);
        assert_eq!(specs.len(), 4);
        assert_eq!(specs[0].label, "src0");

        let explicit: CorpusSpec = serde_json::from_str(
            r#"{ "seed": 3, "noise_sigma": 0.01, "images_per_source": 2,
                 "width": 48, "height": 48,
                 "sources": [
                   { "label": "cam", "kernel": [[0,0,0],[0,1,0],[0,0,0]] },
                   { "label": "gen", "kernel": [[0,0,0],[0.5,0.5,0],[0,0,0]] }
                 ] }"#,
        )
        .unwrap();
        let (cfg, specs) = explicit.resolve().unwrap();
        assert_eq!(cfg.sources, 2);
        assert_eq!(specs[0].label, "cam");
        assert_eq!(specs[1].kernel, vec![0.0, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);

        // Coinciding kernels and bad sums are rejected.
        let dup: CorpusSpec = serde_json::from_str(
            r#"{ "seed": 3, "noise_sigma": 0.01, "images_per_source": 2,
                 "width": 48, "height": 48,
                 "sources": [
                   { "label": "a", "kernel": [[0,0,0],[0,1,0],[0,0,0]] },
                   { "label": "b", "kernel": [[0,0,0],[0,1,0],[0,0,0]] }
                 ] }"#,
        )
        .unwrap();
        assert!(dup.resolve().is_err());
        let bad_sum: CorpusSpec = serde_json::from_str(
            r#"{ "seed": 3, "noise_sigma": 0.01, "images_per_source": 2,
                 "width": 48, "height": 48,
                 "sources": [ { "label": "a", "kernel": [[0.5]] } ] }"#,
        )
        .unwrap();
        assert!(bad_sum.resolve().is_err());
    }
}
