//! Forensic self-descriptions for image sources.
//!
//! Every image-creation pipeline — a camera's demosaicing and denoising, a
//! generative model's upsampling — leaves faint correlations between nearby
//! pixels. This crate turns those correlations into a compact per-image
//! feature vector and builds three applications on top of it:
//!
//! 1. A small bank of constrained linear filters is trained on real images
//!    only to predict each pixel from its neighborhood ([`filterbank`]).
//!    Subtracting the predictions leaves residual fields that carry the
//!    pipeline's microstructure.
//! 2. For each image, a compact multi-scale autoregressive model of those
//!    residuals is fitted; its coefficients are the image's *self-description*
//!    ([`selfdesc`]).
//! 3. Gaussian mixtures over self-descriptions ([`mixture`]) drive zero-shot
//!    synthetic-image detection, open-set source attribution, and
//!    unsupervised source clustering ([`tasks`]), evaluated with ROC/open-set/
//!    clustering metrics ([`metrics`]).
//!
//! Trained artifacts persist through [`store`]; [`synth`] generates seeded
//! synthetic corpora with planted source microstructure for end-to-end
//! validation; [`cli`] wires everything into a multi-command binary.
//!
//! # Runnable examples
//!
//! Each major capability has a self-contained example under `examples/`:
//!
//! * `train_filters` — train a constrained predictive filter bank.
//! * `describe_image` — extract one image's self-description.
//! * `zero_shot_detection` — calibrate a detector on real images only and
//!   score unseen synthetic sources.
//! * `open_set_attribution` — attribute images among known sources and
//!   reject unknown ones.
//! * `source_clustering` — cluster mixed-source images without labels.
//! * `jpeg_robustness` — measure detection AUC under JPEG recompression.

pub mod cli;
pub mod error;
pub mod filterbank;
pub mod imaging;
pub mod metrics;
pub mod mixture;
pub mod selfdesc;
pub mod store;
pub mod synth;
pub mod tasks;

pub use error::{Error, Result};
