//! Adaptive-threshold line-art extraction.
//!
//! The gray level `v` used for binarization is the highest level present
//! in the character's histogram with `v * tolerance < m`, where `m` is the
//! count-weighted mean gray level. Larger tolerances pick darker cutoffs,
//! which thins the extracted strokes; small characters (few non-background
//! pixels) get a larger tolerance because their lines tend to be thicker.

use crate::error::{Error, Result};
use crate::raster::{self, GrayHistogram, RasterImage, BLACK, WHITE};

pub const MIN_ADAPTIVE_TOLERANCE: f64 = 1.0;
pub const MAX_ADAPTIVE_TOLERANCE: f64 = 1.5;

/// Outcome of threshold selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdDecision {
    /// Count-weighted mean gray level.
    pub mean: f64,
    /// Chosen threshold level; pixels at or below it are line.
    pub level: u8,
    pub tolerance: f64,
    /// Non-background share of the image, when known.
    pub character_fraction: Option<f64>,
    /// `false` when no present level satisfied `level * tolerance < mean`
    /// and the darkest present level was taken instead.
    pub satisfied: bool,
}

/// `sum(level * count) / sum(count)`.
pub fn weighted_mean_level(hist: &GrayHistogram) -> Result<f64> {
    let total = hist.total();
    if total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let weighted: u64 = hist
        .counts()
        .iter()
        .enumerate()
        .map(|(level, &c)| level as u64 * c)
        .sum();
    Ok(weighted as f64 / total as f64)
}

pub fn select_threshold(hist: &GrayHistogram, tolerance: f64) -> Result<ThresholdDecision> {
    check_tolerance(tolerance)?;
    let mean = weighted_mean_level(hist)?;
    let qualifying = hist
        .present_levels()
        .filter(|&level| (level as f64) * tolerance < mean)
        .last();
    let (level, satisfied) = match qualifying {
        Some(level) => (level, true),
        None => (hist.present_levels().next().ok_or(Error::EmptyHistogram)?, false),
    };
    Ok(ThresholdDecision {
        mean,
        level,
        tolerance,
        character_fraction: None,
        satisfied,
    })
}

/// `clamp(1 + 0.5 * (1 - f), 1, 1.5)` with `f` the character pixel fraction.
pub fn adaptive_tolerance(character_pixels: u64, total_pixels: u64) -> Result<f64> {
    if total_pixels == 0 {
        return Err(Error::invalid("total_pixels", "must be positive"));
    }
    if character_pixels > total_pixels {
        return Err(Error::invalid(
            "character_pixels",
            format!("{character_pixels} exceeds total {total_pixels}"),
        ));
    }
    let f = character_pixels as f64 / total_pixels as f64;
    Ok((1.0 + 0.5 * (1.0 - f)).clamp(MIN_ADAPTIVE_TOLERANCE, MAX_ADAPTIVE_TOLERANCE))
}

fn check_tolerance(tolerance: f64) -> Result<()> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::invalid("tolerance", format!("must be a positive number, got {tolerance}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineartOptions {
    /// Fixed tolerance; `None` derives it from the character size.
    pub tolerance: Option<f64>,
    /// Minimum alpha for a pixel to count towards the histogram.
    pub alpha_threshold: u8,
    /// Opaque color that also marks background.
    pub background_key: Option<[u8; 3]>,
}

impl Default for LineartOptions {
    fn default() -> Self {
        Self {
            tolerance: None,
            alpha_threshold: 1,
            background_key: None,
        }
    }
}

impl LineartOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance: Some(tolerance),
            ..Self::default()
        }
    }
}

/// Binary line art plus the decision that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Lineart {
    pub image: RasterImage,
    /// `None` when the image has no character pixels at all.
    pub decision: Option<ThresholdDecision>,
}

/// Extract black-on-white line art from a colorized image.
pub fn extract_lineart(img: &RasterImage, tolerance: Option<f64>) -> Result<RasterImage> {
    let opts = LineartOptions {
        tolerance,
        ..LineartOptions::default()
    };
    Ok(extract_lineart_with(img, &opts)?.image)
}

/// Full form of [`extract_lineart`].
///
/// Background pixels are always white. If the threshold scan falls back
/// to the darkest level (a uniform or near-uniform character), the
/// character has no line content and the result is all white.
pub fn extract_lineart_with(img: &RasterImage, opts: &LineartOptions) -> Result<Lineart> {
    if let Some(t) = opts.tolerance {
        check_tolerance(t)?;
    }
    let flat = raster::flatten_background_keyed(img, opts.background_key);
    let mut gray = raster::to_grayscale(&flat.image);
    // Carry the source alpha so the histogram only sees character pixels.
    for ((g, src), &bg) in gray.pixels_mut().iter_mut().zip(img.pixels()).zip(&flat.background) {
        g[3] = if bg { 0 } else { src[3] };
    }
    let hist = raster::histogram(&gray, opts.alpha_threshold.max(1))?;
    let total = gray.pixels().len() as u64;
    if hist.is_empty() || total == 0 {
        return Ok(Lineart {
            image: RasterImage::new(img.width(), img.height(), WHITE),
            decision: None,
        });
    }
    let character = hist.total();
    let tolerance = match opts.tolerance {
        Some(t) => t,
        None => adaptive_tolerance(character, total)?,
    };
    let mut decision = select_threshold(&hist, tolerance)?;
    decision.character_fraction = Some(character as f64 / total as f64);

    let pixels = gray
        .pixels()
        .iter()
        .zip(&flat.background)
        .map(|(g, &bg)| {
            if !bg && decision.satisfied && g[0] <= decision.level {
                BLACK
            } else {
                WHITE
            }
        })
        .collect();
    Ok(Lineart {
        image: RasterImage::from_pixels(img.width(), img.height(), pixels)?,
        decision: Some(decision),
    })
}

/// `true` if every pixel is opaque black or opaque white.
pub fn is_binary(img: &RasterImage) -> bool {
    img.pixels().iter().all(|&p| p == BLACK || p == WHITE)
}
