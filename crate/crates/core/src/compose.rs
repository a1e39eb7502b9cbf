//! Network-input composition and generator-output blending.

use crate::error::{Error, Result};
use crate::hints::{paint_disk, render_hints, HintSet};
use crate::raster::{RasterImage, BLACK, TRANSPARENT};

/// Normalized 1-D Gaussian taps for offsets `-radius..=radius`,
/// `radius = ceil(3 * sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / sum).collect()
}

/// Separable Gaussian blur of all four channels, clamping at the edges.
/// Rounding happens once, after both passes.
pub fn gaussian_blur(img: &RasterImage, sigma: f64) -> Result<RasterImage> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid("sigma", format!("must be positive, got {sigma}")));
    }
    Ok(quantize_channels(&blur_planes(&to_planes(img), img.width(), img.height(), sigma), img))
}

type Planes = Vec<[f64; 4]>;

fn to_planes(img: &RasterImage) -> Planes {
    img.pixels().iter().map(|p| p.map(f64::from)).collect()
}

fn quantize_channels(planes: &Planes, like: &RasterImage) -> RasterImage {
    let pixels = planes
        .iter()
        .map(|p| p.map(|c| c.round().clamp(0.0, 255.0) as u8))
        .collect();
    RasterImage::from_pixels(like.width(), like.height(), pixels).expect("same dimensions")
}

fn blur_planes(src: &Planes, width: u32, height: u32, sigma: f64) -> Planes {
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as i64;
    let (w, h) = (width as i64, height as i64);
    let at = |x: i64, y: i64| (y * w + x) as usize;

    let mut horizontal = vec![[0.0; 4]; src.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0; 4];
            for (k, wgt) in kernel.iter().enumerate() {
                let sx = (x + k as i64 - radius).clamp(0, w - 1);
                let p = src[at(sx, y)];
                for c in 0..4 {
                    acc[c] += p[c] * wgt;
                }
            }
            horizontal[at(x, y)] = acc;
        }
    }
    let mut out = vec![[0.0; 4]; src.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0; 4];
            for (k, wgt) in kernel.iter().enumerate() {
                let sy = (y + k as i64 - radius).clamp(0, h - 1);
                let p = horizontal[at(x, sy)];
                for c in 0..4 {
                    acc[c] += p[c] * wgt;
                }
            }
            out[at(x, y)] = acc;
        }
    }
    out
}

/// Paint the hints onto the line art to form the single network input.
///
/// With `blur_sigma == 0` this is [`render_hints`] over the line art. With
/// a positive sigma the hints are drawn on their own transparent layer,
/// blurred (in premultiplied alpha), composited over the line art, and the
/// line art's black pixels are restored on top so strokes stay sharp.
pub fn compose_input(lineart: &RasterImage, hints: &HintSet, blur_sigma: f64) -> Result<RasterImage> {
    if !(blur_sigma.is_finite() && blur_sigma >= 0.0) {
        return Err(Error::invalid("blur_sigma", format!("must be non-negative, got {blur_sigma}")));
    }
    if blur_sigma == 0.0 {
        return render_hints(lineart, hints);
    }
    hints.validate(lineart.width(), lineart.height())?;

    let mut layer = RasterImage::new(lineart.width(), lineart.height(), TRANSPARENT);
    for h in &hints.hints {
        paint_disk(&mut layer, h);
    }
    let premultiplied: Planes = layer
        .pixels()
        .iter()
        .map(|p| {
            let a = p[3] as f64 / 255.0;
            [p[0] as f64 * a, p[1] as f64 * a, p[2] as f64 * a, p[3] as f64]
        })
        .collect();
    let blurred = blur_planes(&premultiplied, layer.width(), layer.height(), blur_sigma);

    let pixels = lineart
        .pixels()
        .iter()
        .zip(&blurred)
        .map(|(&base, hint)| {
            if base == BLACK {
                return BLACK;
            }
            let a = (hint[3] / 255.0).clamp(0.0, 1.0);
            let mix = |c: usize| (hint[c] + base[c] as f64 * (1.0 - a)).round().clamp(0.0, 255.0) as u8;
            [mix(0), mix(1), mix(2), base[3]]
        })
        .collect();
    RasterImage::from_pixels(lineart.width(), lineart.height(), pixels)
}

/// `255 * a / b` per color channel, clamped to 255, with `b == 0` giving 255.
/// The output keeps the numerator's alpha.
pub fn divide_blend(numerator: &RasterImage, denominator: &RasterImage) -> Result<RasterImage> {
    if numerator.dimensions() != denominator.dimensions() {
        let (left_w, left_h) = numerator.dimensions();
        let (right_w, right_h) = denominator.dimensions();
        return Err(Error::DimensionMismatch {
            left_w,
            left_h,
            right_w,
            right_h,
        });
    }
    let pixels = numerator
        .pixels()
        .iter()
        .zip(denominator.pixels())
        .map(|(a, b)| {
            let ch = |c: usize| divide_channel(a[c], b[c]);
            [ch(0), ch(1), ch(2), a[3]]
        })
        .collect();
    RasterImage::from_pixels(numerator.width(), numerator.height(), pixels)
}

#[inline]
pub fn divide_channel(a: u8, b: u8) -> u8 {
    if b == 0 {
        return 255;
    }
    let (a, b) = (a as u32, b as u32);
    // round(255 a / b), halves up
    ((510 * a + b) / (2 * b)).min(255) as u8
}
