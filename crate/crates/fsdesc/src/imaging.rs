//! Image loading and the few pixel-level transforms the pipeline needs.
//!
//! Everything downstream works on luminance fields in `[0, 1]`: color inputs
//! are reduced with the classic BT.601 weights (0.299 R + 0.587 G + 0.114 B)
//! after scaling channels to `[0, 1]`, grayscale inputs pass through scaled by
//! their bit depth. Dyadic downsampling is plain 2x2 block averaging (odd
//! trailing rows/columns dropped), applied once per octave. JPEG recompression
//! round-trips a field through the baseline 8-bit grayscale codec, which is how
//! compression robustness is exercised.

use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

/// BT.601 luminance weights for R, G, B.
const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// A luminance field with pixels in `[0, 1]`, row-major, at least 1x1.
///
/// The constructor is the only way in, so every `GrayImage` in the program
/// satisfies the range/finiteness invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    data: Array2<f64>,
}

impl GrayImage {
    /// Wraps a field, validating that every pixel is finite and in `[0, 1]`
    /// and that both dimensions are nonzero.
    pub fn from_array(data: Array2<f64>) -> Result<Self> {
        let (h, w) = data.dim();
        if h == 0 || w == 0 {
            return Err(Error::EmptyInput(format!("image with shape {h}x{w}")));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "pixel value {bad} outside [0, 1]"
            )));
        }
        Ok(GrayImage { data })
    }

    /// Builds an image by evaluating `f(row, col)`; values are clamped to
    /// `[0, 1]` so closures can be sloppy about range.
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let data = Array2::from_shape_fn((height, width), |(y, x)| f(y, x).clamp(0.0, 1.0));
        GrayImage { data }
    }

    pub fn width(&self) -> usize {
        self.data.ncols()
    }

    pub fn height(&self) -> usize {
        self.data.nrows()
    }

    /// The underlying luminance field.
    pub fn as_array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }

    /// Centered crop to at most `max_side` pixels per side. A no-op when the
    /// image already fits.
    pub fn center_crop(&self, max_side: usize) -> GrayImage {
        let (h, w) = self.data.dim();
        let ch = h.min(max_side);
        let cw = w.min(max_side);
        if ch == h && cw == w {
            return self.clone();
        }
        let y0 = (h - ch) / 2;
        let x0 = (w - cw) / 2;
        GrayImage {
            data: self
                .data
                .slice(ndarray::s![y0..y0 + ch, x0..x0 + cw])
                .to_owned(),
        }
    }
}

/// Knobs applied while loading an image, before any analysis.
#[derive(Debug, Clone)]
pub struct PreprocessOptions {
    /// Center-crop to at most this many pixels per side; `None` keeps the
    /// full frame. Default: crop to 512.
    pub crop_max_side: Option<usize>,
    /// Side length `M` of the predictive filter neighborhood the image must
    /// support. Loading fails with [`Error::TooSmall`] if either side ends up
    /// below `2M + 1`. Default: 11.
    pub filter_neighborhood: usize,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            crop_max_side: Some(512),
            filter_neighborhood: 11,
        }
    }
}

impl PreprocessOptions {
    /// Smallest acceptable side length after cropping.
    pub fn min_side(&self) -> usize {
        2 * self.filter_neighborhood + 1
    }
}

/// Loads an image file as a luminance field in `[0, 1]`.
///
/// Grayscale sources are passed through (scaled by bit depth); color sources
/// are combined with BT.601 weights. The optional center crop from `opts`
/// is applied, then the result must be at least `2M + 1` per side.
pub fn load_grayscale(path: &Path, opts: &PreprocessOptions) -> Result<GrayImage> {
    let decoded = image::open(path).map_err(|e| Error::unreadable(path, e))?;
    let full = luminance_of(&decoded);
    let img = match opts.crop_max_side {
        Some(cap) => full.center_crop(cap),
        None => full,
    };
    let min_side = opts.min_side();
    if img.width() < min_side || img.height() < min_side {
        return Err(Error::TooSmall {
            width: img.width(),
            height: img.height(),
            min_side,
            context: format!(
                "{} after preprocessing, neighborhood {}",
                path.display(),
                opts.filter_neighborhood
            ),
        });
    }
    Ok(img)
}

/// Converts any decoded image to the canonical luminance field.
fn luminance_of(img: &image::DynamicImage) -> GrayImage {
    use image::DynamicImage as D;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = match img {
        D::ImageLuma8(b) => Array2::from_shape_fn((h, w), |(y, x)| {
            f64::from(b.get_pixel(x as u32, y as u32).0[0]) / 255.0
        }),
        D::ImageLumaA8(b) => Array2::from_shape_fn((h, w), |(y, x)| {
            f64::from(b.get_pixel(x as u32, y as u32).0[0]) / 255.0
        }),
        D::ImageLuma16(b) => Array2::from_shape_fn((h, w), |(y, x)| {
            f64::from(b.get_pixel(x as u32, y as u32).0[0]) / 65535.0
        }),
        D::ImageLumaA16(b) => Array2::from_shape_fn((h, w), |(y, x)| {
            f64::from(b.get_pixel(x as u32, y as u32).0[0]) / 65535.0
        }),
        D::ImageRgb8(b) => Array2::from_shape_fn((h, w), |(y, x)| {
            luma(b.get_pixel(x as u32, y as u32).0.map(f64::from), 255.0)
        }),
        D::ImageRgba8(b) => Array2::from_shape_fn((h, w), |(y, x)| {
            let p = b.get_pixel(x as u32, y as u32).0;
            luma([p[0].into(), p[1].into(), p[2].into()], 255.0)
        }),
        D::ImageRgb16(b) => Array2::from_shape_fn((h, w), |(y, x)| {
            luma(b.get_pixel(x as u32, y as u32).0.map(f64::from), 65535.0)
        }),
        D::ImageRgba16(b) => Array2::from_shape_fn((h, w), |(y, x)| {
            let p = b.get_pixel(x as u32, y as u32).0;
            luma([p[0].into(), p[1].into(), p[2].into()], 65535.0)
        }),
        other => {
            // Float and future formats: fall back to an rgb32f view.
            let b = other.to_rgb32f();
            Array2::from_shape_fn((h, w), |(y, x)| {
                let p = b.get_pixel(x as u32, y as u32).0;
                luma([p[0].into(), p[1].into(), p[2].into()], 1.0)
            })
        }
    };
    // Clamp defensively: float sources may stray outside [0, 1].
    GrayImage {
        data: data.mapv(|v| v.clamp(0.0, 1.0)),
    }
}

fn luma(rgb: [f64; 3], scale: f64) -> f64 {
    LUMA_WEIGHTS
        .iter()
        .zip(rgb)
        .map(|(w, c)| w * (c / scale))
        .sum()
}

/// Downsamples a field by a power-of-two factor using 2x2 block means, one
/// octave at a time. Odd trailing rows/columns are dropped at each octave.
///
/// `factor` must be a power of two; factor 1 returns a copy. Fails with
/// [`Error::DegenerateOutput`] if any octave would empty the field.
pub fn downsample_dyadic(field: &Array2<f64>, factor: usize) -> Result<Array2<f64>> {
    if factor == 0 || !factor.is_power_of_two() {
        return Err(Error::InvalidConfig(format!(
            "downsample factor must be a power of two, got {factor}"
        )));
    }
    let mut cur = field.clone();
    let mut remaining = factor;
    while remaining > 1 {
        let (h, w) = cur.dim();
        if h < 2 || w < 2 {
            return Err(Error::DegenerateOutput {
                width: field.ncols(),
                height: field.nrows(),
                factor,
            });
        }
        let (oh, ow) = (h / 2, w / 2);
        let mut next = Array2::zeros((oh, ow));
        for y in 0..oh {
            for x in 0..ow {
                next[[y, x]] = 0.25
                    * (cur[[2 * y, 2 * x]]
                        + cur[[2 * y, 2 * x + 1]]
                        + cur[[2 * y + 1, 2 * x]]
                        + cur[[2 * y + 1, 2 * x + 1]]);
            }
        }
        cur = next;
        remaining /= 2;
    }
    Ok(cur)
}

/// [`downsample_dyadic`] lifted to whole images (block means of values in
/// `[0, 1]` stay in `[0, 1]`).
pub fn downsample_image(img: &GrayImage, factor: usize) -> Result<GrayImage> {
    Ok(GrayImage {
        data: downsample_dyadic(img.as_array(), factor)?,
    })
}

/// Round-trips an image through baseline 8-bit grayscale JPEG at the given
/// quality (1..=100). Dimensions are preserved; pixel values move by however
/// much the codec distorts them.
pub fn jpeg_recompress(img: &GrayImage, quality: u8) -> Result<GrayImage> {
    if quality == 0 || quality > 100 {
        return Err(Error::CodecFailure(format!(
            "JPEG quality must be in 1..=100, got {quality}"
        )));
    }
    let (h, w) = (img.height(), img.width());
    let bytes: Vec<u8> = img
        .as_array()
        .iter()
        .map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect();
    let buffer: image::ImageBuffer<image::Luma<u8>, Vec<u8>> =
        image::ImageBuffer::from_raw(w as u32, h as u32, bytes)
            .expect("buffer length matches dimensions");

    let mut encoded = Vec::new();
    image::codecs::jpeg::JpegEncoder::new_with_quality(&mut encoded, quality)
        .encode_image(&buffer)
        .map_err(|e| Error::CodecFailure(format!("encode: {e}")))?;
    let decoded = image::load_from_memory(&encoded)
        .map_err(|e| Error::CodecFailure(format!("decode: {e}")))?
        .into_luma8();
    if decoded.width() != w as u32 || decoded.height() != h as u32 {
        return Err(Error::CodecFailure(format!(
            "round-trip changed dimensions: {w}x{h} -> {}x{}",
            decoded.width(),
            decoded.height()
        )));
    }
    let data = Array2::from_shape_fn((h, w), |(y, x)| {
        f64::from(decoded.get_pixel(x as u32, y as u32).0[0]) / 255.0
    });
    Ok(GrayImage { data })
}

/// Writes an image as 16-bit grayscale PNG (used by the synthetic-source
/// generator; 16 bits keep quantization well below the planted structure).
pub fn save_png16(path: &Path, img: &GrayImage) -> Result<()> {
    let (h, w) = (img.height(), img.width());
    let bytes: Vec<u16> = img
        .as_array()
        .iter()
        .map(|&v| (v * 65535.0).round().clamp(0.0, 65535.0) as u16)
        .collect();
    let buffer: image::ImageBuffer<image::Luma<u16>, Vec<u16>> =
        image::ImageBuffer::from_raw(w as u32, h as u32, bytes)
            .expect("buffer length matches dimensions");
    buffer
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::CodecFailure(format!("png encode {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn bt601_weights_on_pure_channels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rgb.png");
        // 3x1 image: pure red, green, blue at full intensity.
        let mut buf = image::ImageBuffer::<image::Rgb<u8>, Vec<u8>>::new(3, 1);
        buf.put_pixel(0, 0, image::Rgb([255, 0, 0]));
        buf.put_pixel(1, 0, image::Rgb([0, 255, 0]));
        buf.put_pixel(2, 0, image::Rgb([0, 0, 255]));
        buf.save(&path).unwrap();

        let opts = PreprocessOptions {
            crop_max_side: None,
            filter_neighborhood: 1, // min side 3; height 1 is fine? no: 1 < 3
        };
        // Too small for any neighborhood; decode through the internal path
        // instead so the weight check does not depend on size rules.
        assert!(load_grayscale(&path, &opts).is_err());
        let img = luminance_of(&image::open(&path).unwrap());
        assert!((img.as_array()[[0, 0]] - 0.299).abs() < 1e-12);
        assert!((img.as_array()[[0, 1]] - 0.587).abs() < 1e-12);
        assert!((img.as_array()[[0, 2]] - 0.114).abs() < 1e-12);
    }

    #[test]
    fn grayscale_sources_pass_through_by_bit_depth() {
        let g8 = image::DynamicImage::ImageLuma8(image::ImageBuffer::from_pixel(
            2,
            2,
            image::Luma([200u8]),
        ));
        let img = luminance_of(&g8);
        assert_eq!(img.as_array()[[0, 0]], 200.0 / 255.0);

        let g16 = image::DynamicImage::ImageLuma16(image::ImageBuffer::from_pixel(
            2,
            2,
            image::Luma([40000u16]),
        ));
        let img = luminance_of(&g16);
        assert_eq!(img.as_array()[[1, 1]], 40000.0 / 65535.0);
    }

    #[test]
    fn center_crop_takes_the_middle() {
        let img = GrayImage::from_fn(6, 8, |y, x| (y * 8 + x) as f64 / 100.0);
        let cropped = img.center_crop(4);
        assert_eq!((cropped.height(), cropped.width()), (4, 4));
        // Rows 1..5, cols 2..6 of the original.
        assert_eq!(cropped.as_array()[[0, 0]], (1 * 8 + 2) as f64 / 100.0);
        assert_eq!(cropped.as_array()[[3, 3]], (4 * 8 + 5) as f64 / 100.0);
    }

    #[test]
    fn downsample_known_blocks() {
        let f = array![
            [1.0, 3.0, 5.0, 7.0],
            [1.0, 3.0, 5.0, 7.0],
            [2.0, 2.0, 8.0, 8.0],
            [4.0, 4.0, 0.0, 0.0],
        ];
        let half = downsample_dyadic(&f, 2).unwrap();
        assert_eq!(half, array![[2.0, 6.0], [3.0, 4.0]]);
        let quarter = downsample_dyadic(&f, 4).unwrap();
        assert_eq!(quarter.dim(), (1, 1));
        assert_eq!(quarter[[0, 0]], 3.75);
    }

    #[test]
    fn downsample_drops_odd_trailing_column() {
        // 2x5: the fifth column does not join any block.
        let f = array![[1.0, 1.0, 2.0, 2.0, 9.0], [1.0, 1.0, 2.0, 2.0, 9.0]];
        let half = downsample_dyadic(&f, 2).unwrap();
        assert_eq!(half, array![[1.0, 2.0]]);
    }

    #[test]
    fn downsample_rejects_bad_factor_and_degenerate_output() {
        let f = Array2::<f64>::zeros((4, 4));
        assert!(matches!(
            downsample_dyadic(&f, 3),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            downsample_dyadic(&f, 0),
            Err(Error::InvalidConfig(_))
        ));
        let thin = Array2::<f64>::zeros((1, 8));
        assert!(matches!(
            downsample_dyadic(&thin, 2),
            Err(Error::DegenerateOutput { .. })
        ));
        // Factor 1 is the identity even on thin fields.
        assert_eq!(downsample_dyadic(&thin, 1).unwrap(), thin);
    }

    proptest! {
        /// Block averaging preserves the mean of the retained (even-cropped)
        /// region to rounding error.
        #[test]
        fn downsample_preserves_retained_mean(
            h in 2usize..20,
            w in 2usize..20,
            seed in 0u64..1000,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f = Array2::from_shape_fn((h, w), |_| rng.gen::<f64>());
            let half = downsample_dyadic(&f, 2).unwrap();
            let retained = f.slice(ndarray::s![..(h / 2) * 2, ..(w / 2) * 2]);
            let mean_in = retained.mean().unwrap();
            let mean_out = half.mean().unwrap();
            prop_assert!((mean_in - mean_out).abs() < 1e-12);
        }
    }

    #[test]
    fn jpeg_q100_stays_close_and_preserves_shape() {
        // Smooth gradient: q=100 distortion should be small everywhere.
        let img = GrayImage::from_fn(48, 40, |y, x| {
            0.5 + 0.3 * ((x as f64) / 40.0 - 0.5) + 0.2 * ((y as f64) / 48.0 - 0.5)
        });
        let rt = jpeg_recompress(&img, 100).unwrap();
        assert_eq!((rt.height(), rt.width()), (48, 40));
        let max_dev = img
            .as_array()
            .iter()
            .zip(rt.as_array().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_dev <= 0.05, "max deviation {max_dev} > 0.05 at q=100");
    }

    #[test]
    fn jpeg_rejects_out_of_range_quality() {
        let img = GrayImage::from_fn(8, 8, |_, _| 0.5);
        assert!(matches!(
            jpeg_recompress(&img, 0),
            Err(Error::CodecFailure(_))
        ));
        assert!(matches!(
            jpeg_recompress(&img, 101),
            Err(Error::CodecFailure(_))
        ));
    }

    #[test]
    fn load_applies_crop_then_size_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("big.png");
        let img = GrayImage::from_fn(64, 80, |y, x| ((x + y) % 7) as f64 / 7.0);
        save_png16(&path, &img).unwrap();

        let opts = PreprocessOptions {
            crop_max_side: Some(32),
            filter_neighborhood: 11,
        };
        let loaded = load_grayscale(&path, &opts).unwrap();
        assert_eq!((loaded.height(), loaded.width()), (32, 32));

        // Cap below 2M+1 = 23 must fail with TooSmall.
        let tight = PreprocessOptions {
            crop_max_side: Some(16),
            filter_neighborhood: 11,
        };
        assert!(matches!(
            load_grayscale(&path, &tight),
            Err(Error::TooSmall { .. })
        ));

        // Unreadable path surfaces as UnreadableFile.
        assert!(matches!(
            load_grayscale(&dir.path().join("missing.png"), &opts),
            Err(Error::UnreadableFile { .. })
        ));
    }

    #[test]
    fn png16_roundtrip_is_exact_at_16_bits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.png");
        let img = GrayImage::from_fn(24, 24, |y, x| {
            ((y * 24 + x) as f64 / (24.0 * 24.0)).clamp(0.0, 1.0)
        });
        save_png16(&path, &img).unwrap();
        let opts = PreprocessOptions {
            crop_max_side: None,
            filter_neighborhood: 5,
        };
        let back = load_grayscale(&path, &opts).unwrap();
        let max_dev = img
            .as_array()
            .iter()
            .zip(back.as_array().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        // One 16-bit quantization step is ~1.5e-5.
        assert!(max_dev <= 0.5 / 65535.0 + 1e-12, "max deviation {max_dev}");
    }
}
