//! Per-image self-descriptions: compact multi-scale autoregressive models of
//! the residual fields.
//!
//! The residual stack is expanded into a dyadic pyramid (scale `l` is the
//! stack downsampled by `2^(l-1)`). One `B x B` filter `phi_k` per residual
//! field predicts that field from its neighborhood, with the same filter
//! reused at every scale. At each scale the per-filter errors are summed
//! *before* squaring — the coupled error field
//! `eps(x, y) = sum_k [r_k - phi_k * r_k](x, y)` — and the objective is the
//! mean of `|eps|^2` across all scales and valid locations. The flattened
//! coefficients of all K filters form the image's descriptor, a vector of
//! dimension `D = K (B^2 - 1)`.
//!
//! The objective is quadratic in the coefficients, so fitting precomputes the
//! exact Gram matrix and moment vector once (via summed-area tables over lag
//! products — exact up to rounding, no approximation) and then either runs the
//! prescribed Adam loop on that quadratic form or solves the ridge-regularized
//! normal equations directly. [`model_error`] stays a literal evaluation of
//! the definition so the precomputation can always be cross-checked against
//! it.

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{correlate_valid, extract_residuals, FilterBank, ResidualStack};
use crate::imaging::{downsample_dyadic, GrayImage};

/// Residual fields at every scale: `scale(l)[k]` is filter `k`'s residual
/// downsampled by `2^l` block means (`l = 0` is the original stack).
#[derive(Debug, Clone)]
pub struct ResidualPyramid {
    scales: Vec<Vec<Array2<f64>>>,
}

impl ResidualPyramid {
    /// Wraps per-scale field stacks, validating the shape invariants: every
    /// scale holds the same K same-shaped fields, and each scale's dimensions
    /// are the floor-halving of the previous scale's.
    pub fn new(scales: Vec<Vec<Array2<f64>>>) -> Result<Self> {
        if scales.is_empty() || scales[0].is_empty() {
            return Err(Error::EmptyInput("pyramid with no scales or filters".into()));
        }
        let k = scales[0].len();
        for (l, stack) in scales.iter().enumerate() {
            if stack.len() != k {
                return Err(Error::ShapeMismatch(format!(
                    "scale {l} holds {} fields, expected {k}",
                    stack.len()
                )));
            }
            let dim = stack[0].dim();
            for (i, f) in stack.iter().enumerate() {
                if f.dim() != dim {
                    return Err(Error::ShapeMismatch(format!(
                        "scale {l} field {i} is {:?}, expected {dim:?}",
                        f.dim()
                    )));
                }
            }
            if l > 0 {
                let prev = scales[l - 1][0].dim();
                if dim != (prev.0 / 2, prev.1 / 2) {
                    return Err(Error::ShapeMismatch(format!(
                        "scale {l} is {dim:?}, expected floor-half of {prev:?}"
                    )));
                }
            }
        }
        Ok(ResidualPyramid { scales })
    }

    pub fn k(&self) -> usize {
        self.scales[0].len()
    }

    pub fn levels(&self) -> usize {
        self.scales.len()
    }

    pub fn scale(&self, l: usize) -> &[Array2<f64>] {
        &self.scales[l]
    }
}

/// Builds the dyadic residual pyramid with `levels` scales, checking that the
/// coarsest scale still supports at least one `B x B` window.
pub fn build_pyramid(stack: &ResidualStack, levels: usize, b: usize) -> Result<ResidualPyramid> {
    if levels == 0 {
        return Err(Error::InvalidConfig("pyramid needs at least one scale".into()));
    }
    if b < 3 || b % 2 == 0 {
        return Err(Error::InvalidConfig(format!(
            "description neighborhood must be odd and >= 3, got {b}"
        )));
    }
    let mut scales = Vec::with_capacity(levels);
    scales.push(stack.fields().to_vec());
    for l in 1..levels {
        let prev: &Vec<Array2<f64>> = &scales[l - 1];
        let (ph, pw) = prev[0].dim();
        if ph < 2 || pw < 2 {
            return Err(too_small_for_pyramid(stack, levels, b));
        }
        let next: Vec<Array2<f64>> = prev
            .iter()
            .map(|f| downsample_dyadic(f, 2))
            .collect::<Result<_>>()?;
        scales.push(next);
    }
    let (ch, cw) = scales[levels - 1][0].dim();
    if ch < b || cw < b {
        return Err(too_small_for_pyramid(stack, levels, b));
    }
    ResidualPyramid::new(scales)
}

fn too_small_for_pyramid(stack: &ResidualStack, levels: usize, b: usize) -> Error {
    let (h, w) = stack.dim();
    Error::TooSmall {
        width: w,
        height: h,
        min_side: b << (levels - 1),
        context: format!("residual pyramid with {levels} scales and a {b}x{b} window"),
    }
}

/// A fitted self-description: K `B x B` coefficient grids with pinned zero
/// centers, flattened filter-major / row-major (center skipped) into the
/// descriptor vector of dimension `D = K (B^2 - 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfDescription {
    k: usize,
    b: usize,
    l: usize,
    coeffs: Vec<f64>,
    /// Content hash of the bank that produced the residuals, when known.
    pub bank_hash: Option<String>,
    /// Objective value at the returned coefficients.
    pub final_objective: f64,
    /// Optimizer iterations performed (0 for the exact solver).
    pub iterations: usize,
}

impl SelfDescription {
    /// Builds a description from a flat coefficient vector.
    pub fn from_vector(k: usize, b: usize, l: usize, coeffs: Vec<f64>) -> Result<Self> {
        if b < 3 || b % 2 == 0 || k == 0 || l == 0 {
            return Err(Error::InvalidConfig(format!(
                "invalid description shape K={k}, B={b}, L={l}"
            )));
        }
        let d = k * (b * b - 1);
        if coeffs.len() != d {
            return Err(Error::ShapeMismatch(format!(
                "descriptor length {} != K(B^2-1) = {d}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "descriptor contains a non-finite coefficient".into(),
            ));
        }
        Ok(SelfDescription {
            k,
            b,
            l,
            coeffs,
            bank_hash: None,
            final_objective: f64::NAN,
            iterations: 0,
        })
    }

    /// Builds a description from `B x B` grids (centers must be exactly 0).
    pub fn from_grids(grids: &[Array2<f64>], l: usize) -> Result<Self> {
        if grids.is_empty() {
            return Err(Error::EmptyInput("description with K = 0".into()));
        }
        let b = grids[0].nrows();
        for (k, g) in grids.iter().enumerate() {
            if g.dim() != (b, b) {
                return Err(Error::ShapeMismatch(format!(
                    "grid {k} is {:?}, expected {b}x{b}",
                    g.dim()
                )));
            }
            if g[[b / 2, b / 2]] != 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "grid {k} center coefficient must be exactly 0"
                )));
            }
        }
        let mut coeffs = Vec::with_capacity(grids.len() * (b * b - 1));
        for g in grids {
            for (idx, v) in g.iter().enumerate() {
                if idx != (b / 2) * b + b / 2 {
                    coeffs.push(*v);
                }
            }
        }
        SelfDescription::from_vector(grids.len(), b, l, coeffs)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn levels(&self) -> usize {
        self.l
    }

    /// Descriptor dimension `D = K (B^2 - 1)`.
    pub fn d(&self) -> usize {
        self.coeffs.len()
    }

    /// The flattened descriptor.
    pub fn vector(&self) -> &[f64] {
        &self.coeffs
    }

    /// The K coefficient grids with the zero center re-inserted.
    pub fn grids(&self) -> Vec<Array2<f64>> {
        let b = self.b;
        let per = b * b - 1;
        (0..self.k)
            .map(|k| {
                let chunk = &self.coeffs[k * per..(k + 1) * per];
                let mut g = Vec::with_capacity(b * b);
                let center = (b / 2) * b + b / 2;
                let mut it = chunk.iter();
                for idx in 0..b * b {
                    if idx == center {
                        g.push(0.0);
                    } else {
                        g.push(*it.next().expect("chunk holds B^2-1 values"));
                    }
                }
                Array2::from_shape_vec((b, b), g).expect("shape matches buffer")
            })
            .collect()
    }
}

/// Literal evaluation of the coupled multi-scale objective at `desc`:
/// mean over scales and valid locations of
/// `( sum_k [ r_k(x,y) - (phi_k * r_k)(x,y) ] )^2`.
///
/// This is the reference semantics; the fitters use a precomputed quadratic
/// form that is validated against this function in tests.
pub fn model_error(pyramid: &ResidualPyramid, desc: &SelfDescription) -> Result<f64> {
    if desc.k() != pyramid.k() {
        return Err(Error::ShapeMismatch(format!(
            "description has K={}, pyramid has K={}",
            desc.k(),
            pyramid.k()
        )));
    }
    let b = desc.b();
    let h0 = b / 2;
    let grids = desc.grids();
    let flat: Vec<Vec<f64>> = grids.iter().map(|g| g.iter().copied().collect()).collect();
    let mut sse = 0.0;
    let mut n = 0usize;
    for l in 0..pyramid.levels() {
        let fields = pyramid.scale(l);
        let (fh, fw) = fields[0].dim();
        if fh < b || fw < b {
            return Err(Error::ShapeMismatch(format!(
                "scale {l} fields {fh}x{fw} too small for a {b}x{b} window"
            )));
        }
        let (oh, ow) = (fh - b + 1, fw - b + 1);
        let mut eps = Array2::<f64>::zeros((oh, ow));
        for (k, field) in fields.iter().enumerate() {
            let pred = correlate_valid(field, &flat[k], b);
            let center = field.slice(ndarray::s![h0..h0 + oh, h0..h0 + ow]);
            eps.zip_mut_with(&(&center - &pred), |e, d| *e += d);
        }
        sse += eps.iter().map(|v| v * v).sum::<f64>();
        n += oh * ow;
    }
    Ok(sse / n as f64)
}

/// The objective as an explicit quadratic form
/// `obj(phi) = (phi^T H phi - 2 b^T phi + c) / n`.
///
/// Assembled exactly, once per pyramid: every Gram entry is a lag-product sum
/// over a rectangle, accumulated through a summed-area table.
pub struct ErrorQuadratic {
    gram: DMatrix<f64>,
    moment: DVector<f64>,
    c: f64,
    n_locations: usize,
}

impl ErrorQuadratic {
    pub fn d(&self) -> usize {
        self.moment.len()
    }

    pub fn n_locations(&self) -> usize {
        self.n_locations
    }

    /// Objective value at `coeffs`.
    pub fn objective(&self, coeffs: &[f64]) -> f64 {
        assert_eq!(coeffs.len(), self.d());
        let phi = DVector::from_column_slice(coeffs);
        let quad = (&self.gram * &phi).dot(&phi);
        (quad - 2.0 * self.moment.dot(&phi) + self.c) / self.n_locations as f64
    }

    /// Gradient `(2/n) (H phi - b)` at `coeffs`.
    pub fn gradient(&self, coeffs: &[f64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.d());
        let phi = DVector::from_column_slice(coeffs);
        let g = (&self.gram * &phi - &self.moment) * (2.0 / self.n_locations as f64);
        g.iter().copied().collect()
    }

    /// Exact minimizer of the ridge-regularized normal equations
    /// `(H + ridge I) phi = b`.
    pub fn solve(&self, ridge: f64) -> Vec<f64> {
        let d = self.d();
        let mut reg = self.gram.clone();
        for i in 0..d {
            reg[(i, i)] += ridge;
        }
        let rhs = self.moment.clone();
        let sol = reg
            .clone()
            .cholesky()
            .map(|ch| ch.solve(&rhs))
            .unwrap_or_else(|| {
                reg.lu().solve(&rhs).expect("ridge-regularized system is nonsingular")
            });
        sol.iter().copied().collect()
    }
}

/// Column index of tap `(p, q)` of filter `k` in the flattened descriptor
/// (filter-major, row-major, center skipped).
fn column_index(k: usize, p: usize, q: usize, b: usize) -> usize {
    let center = (b / 2) * b + b / 2;
    let within = p * b + q;
    debug_assert_ne!(within, center);
    let adj = if within > center { within - 1 } else { within };
    k * (b * b - 1) + adj
}

/// Assembles the exact quadratic form of the coupled objective for window
/// side `b` over the pyramid.
pub fn error_quadratic(pyramid: &ResidualPyramid, b: usize) -> Result<ErrorQuadratic> {
    if b < 3 || b % 2 == 0 {
        return Err(Error::InvalidConfig(format!(
            "description neighborhood must be odd and >= 3, got {b}"
        )));
    }
    let d = pyramid.k() * (b * b - 1);
    let h0 = b / 2;
    let center = h0 * b + h0;
    let mut gram = DMatrix::<f64>::zeros(d, d);
    let mut moment = DVector::<f64>::zeros(d);
    let mut c = 0.0;
    let mut n_locations = 0usize;

    for l in 0..pyramid.levels() {
        let fields = pyramid.scale(l);
        let (fh, fw) = fields[0].dim();
        if fh < b || fw < b {
            return Err(Error::ShapeMismatch(format!(
                "scale {l} fields {fh}x{fw} too small for a {b}x{b} window"
            )));
        }
        let (oh, ow) = (fh - b + 1, fw - b + 1);
        n_locations += oh * ow;

        // Coupled target: the per-location sum of all residual fields.
        let mut t = fields[0].clone();
        for f in &fields[1..] {
            t.zip_mut_with(f, |a, b| *a += b);
        }
        let t_s = t.as_slice().expect("standard layout");

        for uy in 0..oh {
            for ux in 0..ow {
                let v = t_s[(uy + h0) * fw + ux + h0];
                c += v * v;
            }
        }

        // Moment vector: correlation of the target window with each shifted
        // residual window. Direct accumulation, one dot product per column.
        for (kk, field) in fields.iter().enumerate() {
            let f_s = field.as_slice().expect("standard layout");
            for p in 0..b {
                for q in 0..b {
                    if p * b + q == center {
                        continue;
                    }
                    let mut acc = 0.0;
                    for uy in 0..oh {
                        let trow = &t_s[(uy + h0) * fw + h0..(uy + h0) * fw + h0 + ow];
                        let frow = &f_s[(uy + p) * fw + q..(uy + p) * fw + q + ow];
                        for (tv, fv) in trow.iter().zip(frow) {
                            acc += tv * fv;
                        }
                    }
                    moment[column_index(kk, p, q, b)] += acc;
                }
            }
        }

        // Gram matrix. Entry ((k1,p,q), (k2,p',q')) is the lag-product sum
        // sum_v r_k1[v] r_k2[v + (dp, dq)] over the rectangle
        // v in [p, p+oh) x [q, q+ow), with (dp, dq) = (p'-p, q'-q). For each
        // filter pair and lag, one fused product/summed-area pass serves all
        // (p, q) choices sharing that lag.
        let mut sat = vec![0.0f64; (fh + 1) * (fw + 1)];
        let lag_bound = b as isize - 1;
        for k1 in 0..fields.len() {
            let a_s = fields[k1].as_slice().expect("standard layout");
            for k2 in k1..fields.len() {
                let b_s = fields[k2].as_slice().expect("standard layout");
                for dp in -lag_bound..=lag_bound {
                    for dq in -lag_bound..=lag_bound {
                        // Within a diagonal block the (dp,dq) and (-dp,-dq)
                        // sums are transposed entries; computing one half and
                        // mirroring keeps the matrix exactly symmetric.
                        if k1 == k2 && (dp < 0 || (dp == 0 && dq < 0)) {
                            continue;
                        }
                        build_lag_sat(a_s, b_s, fh, fw, dp, dq, &mut sat);
                        let (p_lo, p_hi) = tap_range(dp, b);
                        let (q_lo, q_hi) = tap_range(dq, b);
                        for p in p_lo..p_hi {
                            let p2 = (p as isize + dp) as usize;
                            for q in q_lo..q_hi {
                                let q2 = (q as isize + dq) as usize;
                                if p * b + q == center || p2 * b + q2 == center {
                                    continue;
                                }
                                let val = rect_sum(&sat, fw, p, p + oh, q, q + ow);
                                let i = column_index(k1, p, q, b);
                                let j = column_index(k2, p2, q2, b);
                                gram[(i, j)] += val;
                                if i != j {
                                    gram[(j, i)] += val;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(ErrorQuadratic {
        gram,
        moment,
        c,
        n_locations,
    })
}

/// Tap rows `p` for which `p + dp` is still a valid tap row.
fn tap_range(d: isize, b: usize) -> (usize, usize) {
    let lo = if d < 0 { (-d) as usize } else { 0 };
    let hi = if d > 0 { b - d as usize } else { b };
    (lo, hi)
}

/// Fills `sat` with the inclusive-prefix summed-area table of the lag product
/// `P[v] = a[v] * b[v + (dp, dq)]` (zero where the shifted index leaves the
/// field). `sat` is `(fh+1) x (fw+1)` with a zero first row/column.
fn build_lag_sat(a: &[f64], b: &[f64], fh: usize, fw: usize, dp: isize, dq: isize, sat: &mut [f64]) {
    let stride = fw + 1;
    for x in 0..=fw {
        sat[x] = 0.0;
    }
    let y_lo = if dp < 0 { (-dp) as usize } else { 0 };
    let y_hi = if dp > 0 { fh - dp as usize } else { fh };
    let x_lo = if dq < 0 { (-dq) as usize } else { 0 };
    let x_hi = if dq > 0 { fw - dq as usize } else { fw };
    for y in 0..fh {
        let row = &mut sat[(y + 1) * stride..(y + 2) * stride];
        row[0] = 0.0;
        let mut run = 0.0;
        if y >= y_lo && y < y_hi {
            let ya = y * fw;
            let yb = ((y as isize + dp) as usize) * fw;
            for x in 0..fw {
                if x >= x_lo && x < x_hi {
                    run += a[ya + x] * b[yb + (x as isize + dq) as usize];
                }
                row[x + 1] = run;
            }
        } else {
            for x in 0..fw {
                row[x + 1] = 0.0;
            }
        }
    }
    // Accumulate rows: sat[y][x] becomes the 2-D inclusive prefix sum.
    for y in 1..=fh {
        for x in 0..=fw {
            sat[y * stride + x] += sat[(y - 1) * stride + x];
        }
    }
}

/// Rectangle sum over rows `[r0, r1)`, cols `[c0, c1)` from an inclusive SAT.
fn rect_sum(sat: &[f64], fw: usize, r0: usize, r1: usize, c0: usize, c1: usize) -> f64 {
    let stride = fw + 1;
    sat[r1 * stride + c1] - sat[r0 * stride + c1] - sat[r1 * stride + c0] + sat[r0 * stride + c0]
}

/// Optimizer settings for [`fit_self_description`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitConfig {
    /// Initial Adam learning rate. Default 0.1.
    pub lr: f64,
    /// Iterations without relative improvement before halving the lr.
    /// Default 20.
    pub patience: usize,
    /// Multiplier applied to the lr on plateau. Default 0.5.
    pub factor: f64,
    /// Relative improvement below which an iteration counts as stalled.
    /// Default 1e-5.
    pub rel_floor: f64,
    /// Hard iteration cap. Default 10000.
    pub max_iters: usize,
    /// Stop once the lr decays below this. Default 1e-4.
    pub min_lr: f64,
    /// Echoed into provenance; the optimizer itself is deterministic
    /// (coefficients initialize to zero).
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            lr: 0.1,
            patience: 20,
            factor: 0.5,
            rel_floor: 1e-5,
            max_iters: 10_000,
            min_lr: 1e-4,
            seed: 0,
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<()> {
        if self.lr <= 0.0 || !self.lr.is_finite() {
            return Err(Error::InvalidConfig("fit lr must be > 0".into()));
        }
        if !(0.0 < self.factor && self.factor < 1.0) {
            return Err(Error::InvalidConfig("plateau factor must be in (0, 1)".into()));
        }
        if self.patience == 0 || self.max_iters == 0 {
            return Err(Error::InvalidConfig(
                "patience and max_iters must be >= 1".into(),
            ));
        }
        if self.min_lr <= 0.0 || self.rel_floor < 0.0 {
            return Err(Error::InvalidConfig(
                "min_lr must be > 0 and rel_floor >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Optimization trace of one fit.
#[derive(Debug, Clone)]
pub struct FitTrace {
    /// Objective after each iteration; entry 0 is the zero-init objective.
    pub objectives: Vec<f64>,
    /// Iteration numbers at which the learning rate was halved.
    pub lr_halvings: Vec<usize>,
}

/// Fits the self-description by Adam on the quadratic objective, starting
/// from zero coefficients, with plateau-halving of the learning rate.
pub fn fit_self_description(
    pyramid: &ResidualPyramid,
    b: usize,
    cfg: &FitConfig,
) -> Result<SelfDescription> {
    fit_self_description_traced(pyramid, b, cfg).map(|(desc, _)| desc)
}

/// [`fit_self_description`] plus the objective trace, for diagnostics.
pub fn fit_self_description_traced(
    pyramid: &ResidualPyramid,
    b: usize,
    cfg: &FitConfig,
) -> Result<(SelfDescription, FitTrace)> {
    cfg.validate()?;
    let quad = error_quadratic(pyramid, b)?;
    let d = quad.d();

    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;
    let mut phi = vec![0.0f64; d];
    let mut m1 = vec![0.0f64; d];
    let mut m2 = vec![0.0f64; d];
    let mut lr = cfg.lr;

    let mut best_obj = quad.objective(&phi);
    let mut best_phi = phi.clone();
    let mut objectives = vec![best_obj];
    let mut lr_halvings = Vec::new();
    let mut stall = 0usize;
    let mut iters = 0usize;

    for t in 1..=cfg.max_iters {
        let g = quad.gradient(&phi);
        if g.iter().all(|v| *v == 0.0) {
            break; // exact stationary point (e.g. an all-zero pyramid)
        }
        let bc1 = 1.0 - BETA1.powi(t as i32);
        let bc2 = 1.0 - BETA2.powi(t as i32);
        for i in 0..d {
            m1[i] = BETA1 * m1[i] + (1.0 - BETA1) * g[i];
            m2[i] = BETA2 * m2[i] + (1.0 - BETA2) * g[i] * g[i];
            phi[i] -= lr * (m1[i] / bc1) / ((m2[i] / bc2).sqrt() + EPS);
        }
        iters = t;
        let obj = quad.objective(&phi);
        if !obj.is_finite() {
            return Err(Error::NonFinite {
                what: "self-description objective".into(),
                step: t,
            });
        }
        objectives.push(obj);

        let improvement = (best_obj - obj) / best_obj.abs().max(f64::MIN_POSITIVE);
        if obj < best_obj {
            best_obj = obj;
            best_phi.copy_from_slice(&phi);
        }
        if improvement >= cfg.rel_floor {
            stall = 0;
        } else {
            stall += 1;
            if stall >= cfg.patience {
                lr *= cfg.factor;
                lr_halvings.push(t);
                stall = 0;
                if lr < cfg.min_lr {
                    break;
                }
            }
        }
    }

    let mut desc = SelfDescription::from_vector(pyramid.k(), b, pyramid.levels(), best_phi)?;
    desc.final_objective = best_obj;
    desc.iterations = iters;
    Ok((
        desc,
        FitTrace {
            objectives,
            lr_halvings,
        },
    ))
}

/// Exact minimizer via the ridge-regularized normal equations
/// (`ridge = 1e-8`). Intended for modest D (dense solve).
pub fn fit_self_description_exact(pyramid: &ResidualPyramid, b: usize) -> Result<SelfDescription> {
    const RIDGE: f64 = 1e-8;
    let quad = error_quadratic(pyramid, b)?;
    let phi = quad.solve(RIDGE);
    let obj = quad.objective(&phi);
    let mut desc = SelfDescription::from_vector(pyramid.k(), b, pyramid.levels(), phi)?;
    desc.final_objective = obj;
    desc.iterations = 0;
    Ok(desc)
}

/// Full per-image pipeline: residual extraction, pyramid construction, and
/// the iterative fit. `bank_hash` tags the output with the producing bank.
pub fn describe_image(
    img: &GrayImage,
    bank: &FilterBank,
    b: usize,
    levels: usize,
    cfg: &FitConfig,
) -> Result<SelfDescription> {
    let stack = extract_residuals(bank, img)?;
    let pyramid = build_pyramid(&stack, levels, b)?;
    let mut desc = fit_self_description(&pyramid, b, cfg)?;
    desc.bank_hash = Some(crate::store::content_hash(bank));
    Ok(desc)
}
