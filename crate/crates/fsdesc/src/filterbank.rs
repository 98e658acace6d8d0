//! Constrained predictive filter banks.
//!
//! A bank holds `K` linear filters over an odd `M x M` neighborhood. Each
//! filter predicts a pixel from its surroundings — the center weight is pinned
//! to 0 and the remaining weights sum to 1, so every filter is an unbiased
//! scene interpolator and the residual `r_k = I - S_hat_k` isolates whatever
//! the neighborhood cannot explain (noise, demosaicing traces, generator
//! artifacts). Banks are trained on real images only by minimizing total
//! residual energy plus a spectral diversity penalty that keeps the K filters
//! linearly independent: stacking the vectorized filters into a `K x M^2`
//! matrix `W`, the penalty is `-sum_i log(sigma_i + alpha)` over its singular
//! values.
//!
//! Training uses Adam-style updates followed by exact Euclidean projection
//! back onto the constraint set after every step, so the invariants hold at
//! every point of the trajectory, not just at convergence.

use nalgebra::DMatrix;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::GrayImage;

/// How far a filter's non-center weight sum may drift from 1.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A bank of `K` constrained predictive filters.
///
/// Invariants (enforced at construction and after every load):
/// * `M` odd, at least 3;
/// * every filter is `M x M` with center weight exactly 0;
/// * every filter's non-center weights sum to 1 within [`SUM_TOLERANCE`];
/// * all weights finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterBank {
    m: usize,
    filters: Vec<Vec<f64>>, // row-major M*M grids; serialized form
}

impl FilterBank {
    /// Builds a bank from `M x M` weight grids, validating all invariants.
    pub fn new(filters: Vec<Array2<f64>>) -> Result<Self> {
        if filters.is_empty() {
            return Err(Error::EmptyInput("filter bank with K = 0".into()));
        }
        let (mh, mw) = filters[0].dim();
        if mh != mw || mh < 3 || mh % 2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "filter neighborhood must be odd and >= 3, got {mh}x{mw}"
            )));
        }
        let bank = FilterBank {
            m: mh,
            filters: filters
                .iter()
                .map(|f| f.iter().copied().collect())
                .collect(),
        };
        for (k, f) in filters.iter().enumerate() {
            if f.dim() != (mh, mw) {
                return Err(Error::ShapeMismatch(format!(
                    "filter {k} is {:?}, expected {mh}x{mw}",
                    f.dim()
                )));
            }
        }
        bank.validate()?;
        Ok(bank)
    }

    /// Re-checks every invariant; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        let m = self.m;
        if m < 3 || m % 2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "filter neighborhood must be odd and >= 3, got {m}"
            )));
        }
        let center = (m / 2) * m + m / 2;
        for (k, f) in self.filters.iter().enumerate() {
            if f.len() != m * m {
                return Err(Error::ShapeMismatch(format!(
                    "filter {k} has {} weights, expected {}",
                    f.len(),
                    m * m
                )));
            }
            if f.iter().any(|w| !w.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "filter {k} contains a non-finite weight"
                )));
            }
            if f[center] != 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "filter {k} center weight is {}, must be exactly 0",
                    f[center]
                )));
            }
            let sum: f64 = f.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::InvalidConfig(format!(
                    "filter {k} non-center weights sum to {sum}, must be 1 within {SUM_TOLERANCE}"
                )));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.filters.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Filter `k` as an `M x M` grid.
    pub fn filter(&self, k: usize) -> Array2<f64> {
        Array2::from_shape_vec((self.m, self.m), self.filters[k].clone())
            .expect("stored filter length matches M*M")
    }

    /// All filters as grids.
    pub fn filters(&self) -> Vec<Array2<f64>> {
        (0..self.k()).map(|k| self.filter(k)).collect()
    }

    pub(crate) fn filter_slices(&self) -> &[Vec<f64>] {
        &self.filters
    }

    /// Minimum singular value of the stacked `K x M^2` filter matrix.
    pub fn sigma_min(&self) -> f64 {
        singular_values(&self.filters, self.m)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Projects a weight grid onto the constraint set: center is zeroed, then the
/// uniform shift `(1 - s) / (M^2 - 1)` (with `s` the non-center sum) is added
/// to every non-center entry. This is the exact Euclidean projection onto
/// `{w : w_center = 0, sum w = 1}`.
pub fn project_constraints(weights: &Array2<f64>) -> Array2<f64> {
    let (mh, mw) = weights.dim();
    assert_eq!(mh, mw, "filter grid must be square");
    assert!(mh % 2 == 1, "filter grid must have odd side");
    let mut out = weights.clone();
    out[[mh / 2, mw / 2]] = 0.0;
    let s: f64 = out.iter().sum();
    let shift = (1.0 - s) / ((mh * mw - 1) as f64);
    for ((y, x), w) in out.indexed_iter_mut() {
        if (y, x) != (mh / 2, mw / 2) {
            *w += shift;
        }
    }
    out
}

/// Valid-region correlation of `field` with one `M x M` weight grid: output
/// pixel `(y, x)` is the weighted sum of the window whose top-left corner is
/// `(y, x)`, i.e. the prediction for the window's center. No padding.
pub(crate) fn correlate_valid(field: &Array2<f64>, weights: &[f64], m: usize) -> Array2<f64> {
    let (h, w) = field.dim();
    debug_assert!(h >= m && w >= m);
    let (oh, ow) = (h - m + 1, w - m + 1);
    let src = field.as_slice().expect("field is standard layout");
    let mut out = vec![0.0f64; oh * ow];
    for r in 0..m {
        for c in 0..m {
            let wt = weights[r * m + c];
            if wt == 0.0 {
                continue; // contributes exactly 0 to every sum
            }
            for oy in 0..oh {
                let src_row = &src[(oy + r) * w + c..(oy + r) * w + c + ow];
                let dst_row = &mut out[oy * ow..(oy + 1) * ow];
                for (d, s) in dst_row.iter_mut().zip(src_row) {
                    *d += wt * s;
                }
            }
        }
    }
    Array2::from_shape_vec((oh, ow), out).expect("shape matches buffer")
}

/// Predicted scene content, one field per filter, over the valid region
/// `(H - M + 1) x (W - M + 1)`.
pub fn predict_scene(bank: &FilterBank, img: &GrayImage) -> Result<Vec<Array2<f64>>> {
    let m = bank.m();
    if img.height() < m || img.width() < m {
        return Err(Error::TooSmall {
            width: img.width(),
            height: img.height(),
            min_side: m,
            context: format!("prediction with an {m}x{m} neighborhood"),
        });
    }
    Ok(bank
        .filter_slices()
        .iter()
        .map(|f| correlate_valid(img.as_array(), f, m))
        .collect())
}

/// `K` residual fields of identical shape, all over the valid region of one
/// source image.
#[derive(Debug, Clone)]
pub struct ResidualStack {
    fields: Vec<Array2<f64>>,
    /// Dimensions (height, width) of the source image the residuals came from.
    pub source_dims: (usize, usize),
}

impl ResidualStack {
    /// Wraps residual fields, validating shared shape and finiteness.
    pub fn new(fields: Vec<Array2<f64>>, source_dims: (usize, usize)) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::EmptyInput("residual stack with K = 0".into()));
        }
        let dim = fields[0].dim();
        for (k, f) in fields.iter().enumerate() {
            if f.dim() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "residual field {k} is {:?}, expected {:?}",
                    f.dim(),
                    dim
                )));
            }
            if f.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "residual field {k} contains a non-finite value"
                )));
            }
        }
        Ok(ResidualStack {
            fields,
            source_dims,
        })
    }

    pub fn k(&self) -> usize {
        self.fields.len()
    }

    pub fn fields(&self) -> &[Array2<f64>] {
        &self.fields
    }

    pub fn dim(&self) -> (usize, usize) {
        self.fields[0].dim()
    }
}

/// Residuals `r_k = I - S_hat_k` over the valid region.
pub fn extract_residuals(bank: &FilterBank, img: &GrayImage) -> Result<ResidualStack> {
    let predictions = predict_scene(bank, img)?;
    let m = bank.m();
    let h = (m - 1) / 2;
    let arr = img.as_array();
    let fields = predictions
        .into_iter()
        .map(|p| {
            let (oh, ow) = p.dim();
            let center = arr.slice(ndarray::s![h..h + oh, h..h + ow]);
            &center - &p
        })
        .collect();
    ResidualStack::new(fields, (img.height(), img.width()))
}

/// Mean residual energy of a bank over a batch of images, plus its gradient.
///
/// The loss is `sum_k sum_{images, valid locations} (I - S_hat_k)^2` divided by
/// `K` times the total number of valid locations, so values are comparable
/// across crop sizes. The gradient is with respect to every weight, with the
/// center entries zeroed (they are pinned by the constraint).
pub fn energy_loss(bank: &FilterBank, batch: &[GrayImage]) -> Result<(f64, Vec<Array2<f64>>)> {
    energy_loss_raw(&bank.filters(), batch)
}

/// [`energy_loss`] on unconstrained weight grids. Split out so optimizer steps
/// and finite-difference checks can evaluate off-constraint points.
pub fn energy_loss_raw(
    filters: &[Array2<f64>],
    batch: &[GrayImage],
) -> Result<(f64, Vec<Array2<f64>>)> {
    if batch.is_empty() {
        return Err(Error::EmptyInput("energy loss over an empty batch".into()));
    }
    if filters.is_empty() {
        return Err(Error::EmptyInput("energy loss with K = 0".into()));
    }
    let m = filters[0].nrows();
    let flat: Vec<Vec<f64>> = filters.iter().map(|f| f.iter().copied().collect()).collect();
    let mut sse = 0.0;
    let mut grads = vec![vec![0.0f64; m * m]; flat.len()];
    let mut n_locations = 0usize;

    for img in batch {
        if img.height() < m || img.width() < m {
            return Err(Error::TooSmall {
                width: img.width(),
                height: img.height(),
                min_side: m,
                context: format!("energy loss with an {m}x{m} neighborhood"),
            });
        }
        let arr = img.as_array();
        let (ih, iw) = arr.dim();
        let (oh, ow) = (ih - m + 1, iw - m + 1);
        let src = arr.as_slice().expect("image is standard layout");
        let half = (m - 1) / 2;
        n_locations += oh * ow;

        for (k, f) in flat.iter().enumerate() {
            let pred = correlate_valid(arr, f, m);
            let pred_s = pred.as_slice().expect("prediction is standard layout");
            // Residual r = I_center - prediction, kept flat for the dot
            // products below.
            let mut res = vec![0.0f64; oh * ow];
            for oy in 0..oh {
                let img_row = &src[(oy + half) * iw + half..(oy + half) * iw + half + ow];
                let pred_row = &pred_s[oy * ow..(oy + 1) * ow];
                let res_row = &mut res[oy * ow..(oy + 1) * ow];
                for ((r0, i0), p0) in res_row.iter_mut().zip(img_row).zip(pred_row) {
                    *r0 = i0 - p0;
                    sse += *r0 * *r0;
                }
            }
            // d(sse)/dw_k(r,c) = -2 sum_loc res(loc) * I(loc shifted by (r,c)).
            let g = &mut grads[k];
            for r in 0..m {
                for c in 0..m {
                    let mut acc = 0.0;
                    for oy in 0..oh {
                        let img_row = &src[(oy + r) * iw + c..(oy + r) * iw + c + ow];
                        let res_row = &res[oy * ow..(oy + 1) * ow];
                        for (rv, iv) in res_row.iter().zip(img_row) {
                            acc += rv * iv;
                        }
                    }
                    g[r * m + c] += -2.0 * acc;
                }
            }
        }
    }

    let norm = (n_locations * flat.len()) as f64;
    let loss = sse / norm;
    let center = (m / 2) * m + m / 2;
    let grads = grads
        .into_iter()
        .map(|mut g| {
            for v in g.iter_mut() {
                *v /= norm;
            }
            g[center] = 0.0;
            Array2::from_shape_vec((m, m), g).expect("shape matches buffer")
        })
        .collect();
    Ok((loss, grads))
}

/// Result of [`diversity_loss`]: the penalty, its gradient per filter (center
/// entries zeroed), and the singular values of the stacked filter matrix.
pub struct DiversityLoss {
    pub loss: f64,
    pub grads: Vec<Array2<f64>>,
    pub singular_values: Vec<f64>,
}

/// Spectral diversity penalty `-sum_i log(sigma_i + alpha)` over the singular
/// values of the `K x M^2` matrix of vectorized filters, with its gradient
/// `-U diag(1/(sigma_i + alpha)) V^T` reshaped per filter.
pub fn diversity_loss(bank: &FilterBank, alpha: f64) -> DiversityLoss {
    diversity_loss_raw(&bank.filters(), alpha)
}

/// [`diversity_loss`] on unconstrained weight grids.
pub fn diversity_loss_raw(filters: &[Array2<f64>], alpha: f64) -> DiversityLoss {
    assert!(alpha > 0.0, "stabilizer must be positive");
    let k = filters.len();
    let m = filters[0].nrows();
    let n = m * m;
    let w = DMatrix::from_fn(k, n, |r, c| filters[r].as_slice().unwrap()[c]);
    let svd = w.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let sigmas: Vec<f64> = svd.singular_values.iter().copied().collect();

    let loss = -sigmas.iter().map(|s| (s + alpha).ln()).sum::<f64>();
    // dL/dW = -U diag(1/(sigma+alpha)) V^T over the thin triplets.
    let inv: Vec<f64> = sigmas.iter().map(|s| -1.0 / (s + alpha)).collect();
    let grad_w = &u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(inv.clone())) * &v_t;

    let center = (m / 2) * m + m / 2;
    let grads = (0..k)
        .map(|r| {
            let mut g: Vec<f64> = (0..n).map(|c| grad_w[(r, c)]).collect();
            g[center] = 0.0;
            Array2::from_shape_vec((m, m), g).expect("shape matches buffer")
        })
        .collect();
    DiversityLoss {
        loss,
        grads,
        singular_values: sigmas,
    }
}

fn singular_values(filters: &[Vec<f64>], m: usize) -> Vec<f64> {
    let k = filters.len();
    let w = DMatrix::from_fn(k, m * m, |r, c| filters[r][c]);
    w.singular_values().iter().copied().collect()
}

/// Training hyperparameters for [`train_filter_bank`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Number of filters K. Default 8.
    pub k: usize,
    /// Odd neighborhood side M. Default 11.
    pub m: usize,
    /// Weight of the diversity penalty. Default 1.0.
    pub lambda: f64,
    /// Singular-value stabilizer inside the log. Default 1e-6.
    pub alpha: f64,
    /// Adam learning rate. Default 0.001.
    pub lr: f64,
    /// Passes over the corpus. Default 10.
    pub epochs: usize,
    /// Side length of the random training crops. Default 128.
    pub crop: usize,
    /// Crops drawn per image per epoch. Default 1.
    pub crops_per_image: usize,
    /// RNG seed for initialization and crop selection.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            k: 8,
            m: 11,
            lambda: 1.0,
            alpha: 1e-6,
            lr: 0.001,
            epochs: 10,
            crop: 128,
            crops_per_image: 1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be >= 1".into()));
        }
        if self.m < 3 || self.m % 2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "m must be odd and >= 3, got {}",
                self.m
            )));
        }
        if self.lambda < 0.0 || !self.lambda.is_finite() {
            return Err(Error::InvalidConfig("lambda must be >= 0".into()));
        }
        if self.alpha <= 0.0 || !self.alpha.is_finite() {
            return Err(Error::InvalidConfig("alpha must be > 0".into()));
        }
        if self.lr <= 0.0 || !self.lr.is_finite() {
            return Err(Error::InvalidConfig("learning rate must be > 0".into()));
        }
        if self.epochs == 0 || self.crops_per_image == 0 {
            return Err(Error::InvalidConfig(
                "epochs and crops_per_image must be >= 1".into(),
            ));
        }
        if self.crop < self.m {
            return Err(Error::InvalidConfig(format!(
                "crop {} smaller than neighborhood {}",
                self.crop, self.m
            )));
        }
        Ok(())
    }
}

/// Per-step diagnostics recorded while training.
#[derive(Debug, Clone)]
pub struct StepStats {
    /// Mean residual energy at this step's crop (pre-update weights).
    pub energy: f64,
    /// Diversity penalty (pre-update weights).
    pub diversity: f64,
    /// Minimum singular value of the stacked bank after the step's projection.
    pub sigma_min: f64,
    /// Largest |center weight| across filters after projection (0 if exact).
    pub center_abs_max: f64,
    /// Largest |non-center sum - 1| across filters after projection.
    pub sum_dev_max: f64,
}

/// A trained bank together with its optimization trace.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub bank: FilterBank,
    /// One entry per optimizer step, in order.
    pub trace: Vec<StepStats>,
    /// Minimum singular value of the bank right after initialization.
    pub init_sigma_min: f64,
}

/// Trains a filter bank on real images by Adam on
/// `energy + lambda * diversity`, projecting back onto the constraint set
/// after every step.
///
/// Filters initialize i.i.d. uniform in `[-1/M^2, 1/M^2]` (seeded) and are
/// projected before the first step. Each epoch draws `crops_per_image` random
/// crops from every image in corpus order; each crop is one optimizer step
/// (beta1 = 0.9, beta2 = 0.999, eps = 1e-8, no weight decay).
pub fn train_filter_bank(corpus: &[GrayImage], cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyInput("training corpus is empty".into()));
    }
    let m = cfg.m;
    for img in corpus {
        if img.height() < m || img.width() < m {
            return Err(Error::TooSmall {
                width: img.width(),
                height: img.height(),
                min_side: m,
                context: format!("training with an {m}x{m} neighborhood"),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let bound = 1.0 / (m * m) as f64;
    let mut weights: Vec<Array2<f64>> = (0..cfg.k)
        .map(|_| {
            let grid = Array2::from_shape_fn((m, m), |_| rng.gen_range(-bound..bound));
            project_constraints(&grid)
        })
        .collect();
    let init_sigma_min = stacked_sigma_min(&weights);

    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;
    let mut adam_m: Vec<Array2<f64>> = weights.iter().map(|w| Array2::zeros(w.dim())).collect();
    let mut adam_v: Vec<Array2<f64>> = weights.iter().map(|w| Array2::zeros(w.dim())).collect();
    let mut t = 0usize;
    let mut trace = Vec::with_capacity(cfg.epochs * corpus.len() * cfg.crops_per_image);

    for _epoch in 0..cfg.epochs {
        for img in corpus {
            for _crop in 0..cfg.crops_per_image {
                let crop = draw_crop(img, cfg.crop, &mut rng);
                let (le, ge) = energy_loss_raw(&weights, std::slice::from_ref(&crop))?;
                let dl = diversity_loss_raw(&weights, cfg.alpha);
                let loss = le + cfg.lambda * dl.loss;
                t += 1;
                if !loss.is_finite() {
                    return Err(Error::NonFinite {
                        what: "training loss".into(),
                        step: t,
                    });
                }

                let bc1 = 1.0 - BETA1.powi(t as i32);
                let bc2 = 1.0 - BETA2.powi(t as i32);
                for k in 0..cfg.k {
                    let g = &ge[k] + &(cfg.lambda * &dl.grads[k]);
                    adam_m[k].zip_mut_with(&g, |mv, gv| *mv = BETA1 * *mv + (1.0 - BETA1) * gv);
                    adam_v[k]
                        .zip_mut_with(&g, |vv, gv| *vv = BETA2 * *vv + (1.0 - BETA2) * gv * gv);
                    let mut w = weights[k].clone();
                    ndarray::Zip::from(&mut w)
                        .and(&adam_m[k])
                        .and(&adam_v[k])
                        .for_each(|wv, mv, vv| {
                            *wv -= cfg.lr * (mv / bc1) / ((vv / bc2).sqrt() + EPS);
                        });
                    weights[k] = project_constraints(&w);
                }

                let center = (m / 2, m / 2);
                let center_abs_max = weights
                    .iter()
                    .map(|w| w[[center.0, center.1]].abs())
                    .fold(0.0f64, f64::max);
                let sum_dev_max = weights
                    .iter()
                    .map(|w| (w.iter().sum::<f64>() - 1.0).abs())
                    .fold(0.0f64, f64::max);
                trace.push(StepStats {
                    energy: le,
                    diversity: dl.loss,
                    sigma_min: stacked_sigma_min(&weights),
                    center_abs_max,
                    sum_dev_max,
                });
            }
        }
    }

    Ok(TrainOutcome {
        bank: FilterBank::new(weights)?,
        trace,
        init_sigma_min,
    })
}

fn stacked_sigma_min(weights: &[Array2<f64>]) -> f64 {
    let flat: Vec<Vec<f64>> = weights.iter().map(|w| w.iter().copied().collect()).collect();
    singular_values(&flat, weights[0].nrows())
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Draws one random crop of side `min(size, image side)` per axis,
/// upper-left corner uniform. Consumes exactly two RNG draws.
fn draw_crop(img: &GrayImage, size: usize, rng: &mut ChaCha8Rng) -> GrayImage {
    let sy = size.min(img.height());
    let sx = size.min(img.width());
    let y0 = rng.gen_range(0..=img.height() - sy);
    let x0 = rng.gen_range(0..=img.width() - sx);
    let view = img
        .as_array()
        .slice(ndarray::s![y0..y0 + sy, x0..x0 + sx])
        .to_owned();
    GrayImage::from_array(view).expect("crop of a valid image is valid")
}

/// The two classic fixed steganalysis predictors, for baseline comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedBankKind {
    /// 3x3 eight-neighbor average (each weight 1/8).
    Hp3x3,
    /// The "SQUARE 5x5" predictor, integer stencil normalized to sum 1.
    Hp5x5,
}

/// Returns a single-filter bank with one of the fixed high-pass predictors.
pub fn fixed_highpass_bank(kind: FixedBankKind) -> FilterBank {
    let grid = match kind {
        FixedBankKind::Hp3x3 => {
            let mut g = Array2::from_elem((3, 3), 1.0 / 8.0);
            g[[1, 1]] = 0.0;
            g
        }
        FixedBankKind::Hp5x5 => {
            #[rustfmt::skip]
            let stencil: [[f64; 5]; 5] = [
                [-1.0,  2.0, -2.0,  2.0, -1.0],
                [ 2.0, -6.0,  8.0, -6.0,  2.0],
                [-2.0,  8.0,  0.0,  8.0, -2.0],
                [ 2.0, -6.0,  8.0, -6.0,  2.0],
                [-1.0,  2.0, -2.0,  2.0, -1.0],
            ];
            // Non-center entries sum to 12, so /12 normalizes the sum to 1.
            Array2::from_shape_fn((5, 5), |(y, x)| stencil[y][x] / 12.0)
        }
    };
    FilterBank::new(vec![grid]).expect("fixed predictors satisfy the constraints")
}
