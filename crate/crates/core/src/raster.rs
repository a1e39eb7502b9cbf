//! Raster representation shared by every stage: an 8-bit RGBA grid plus
//! grayscale conversion, histograms, background flattening, square
//! resizing, and PNG I/O.

use std::path::Path;

use image::{ImageReader, RgbaImage};

use crate::error::{Error, Result};

/// One RGBA pixel, channels in `[0, 255]`.
pub type Rgba = [u8; 4];

pub const WHITE: Rgba = [255, 255, 255, 255];
pub const BLACK: Rgba = [0, 0, 0, 255];
pub const TRANSPARENT: Rgba = [0, 0, 0, 0];

/// Row-major 8-bit RGBA image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    pixels: Vec<Rgba>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, fill: Rgba) -> Self {
        Self {
            width,
            height,
            pixels: vec![fill; width as usize * height as usize],
        }
    }

    /// Wrap a pixel buffer. Fails unless `pixels.len() == width * height`.
    pub fn from_pixels(width: u32, height: u32, pixels: Vec<Rgba>) -> Result<Self> {
        if pixels.len() != width as usize * height as usize {
            return Err(Error::invalid(
                "pixels",
                format!(
                    "buffer holds {} pixels, {width}x{height} needs {}",
                    pixels.len(),
                    width as usize * height as usize
                ),
            ));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> Rgba) -> Self {
        let mut pixels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[Rgba] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [Rgba] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<Rgba> {
        self.pixels
    }

    #[inline]
    pub fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Rgba {
        self.pixels[self.index(x, y)]
    }

    #[inline]
    pub fn put(&mut self, x: u32, y: u32, px: Rgba) {
        let i = self.index(x, y);
        self.pixels[i] = px;
    }

    /// Iterate `(x, y, pixel)` in scan order.
    pub fn enumerate(&self) -> impl Iterator<Item = (u32, u32, Rgba)> + '_ {
        let w = self.width.max(1);
        self.pixels
            .iter()
            .enumerate()
            .map(move |(i, &p)| ((i as u32) % w, (i as u32) / w, p))
    }

    /// Pixel samples of every pixel with non-zero alpha, in scan order.
    pub fn opaque_samples(&self) -> impl Iterator<Item = PixelSample> + '_ {
        self.enumerate()
            .filter(|(_, _, p)| p[3] > 0)
            .map(|(x, y, p)| PixelSample {
                x,
                y,
                r: p[0],
                g: p[1],
                b: p[2],
            })
    }

    /// Distinct RGB triples over pixels with non-zero alpha.
    pub fn palette(&self) -> std::collections::BTreeSet<[u8; 3]> {
        self.pixels
            .iter()
            .filter(|p| p[3] > 0)
            .map(|p| [p[0], p[1], p[2]])
            .collect()
    }

    /// Copy `src` into this image with its top-left corner at `(ox, oy)`.
    pub fn blit(&mut self, src: &RasterImage, ox: u32, oy: u32) {
        for (x, y, p) in src.enumerate() {
            let (tx, ty) = (ox + x, oy + y);
            if tx < self.width && ty < self.height {
                self.put(tx, ty, p);
            }
        }
    }

    pub(crate) fn to_image(&self) -> RgbaImage {
        let raw: Vec<u8> = self.pixels.iter().flatten().copied().collect();
        RgbaImage::from_raw(self.width, self.height, raw).expect("buffer length matches dimensions")
    }

    pub(crate) fn from_image(img: &RgbaImage) -> Self {
        let pixels = img.pixels().map(|p| p.0).collect();
        Self {
            width: img.width(),
            height: img.height(),
            pixels,
        }
    }
}

/// A single pixel position and its color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PixelSample {
    pub x: u32,
    pub y: u32,
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

/// Occurrence counts of the 256 gray levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayHistogram {
    counts: [u64; 256],
}

impl Default for GrayHistogram {
    fn default() -> Self {
        Self { counts: [0; 256] }
    }
}

impl GrayHistogram {
    pub fn from_counts(counts: [u64; 256]) -> Self {
        Self { counts }
    }

    /// Build from sparse `(level, count)` pairs; repeated levels accumulate.
    pub fn from_pairs(pairs: &[(u8, u64)]) -> Self {
        let mut h = Self::default();
        for &(level, count) in pairs {
            h.counts[level as usize] += count;
        }
        h
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn count(&self, level: u8) -> u64 {
        self.counts[level as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// Levels with a non-zero count, ascending.
    pub fn present_levels(&self) -> impl Iterator<Item = u8> + '_ {
        (0..=255u8).filter(|&l| self.counts[l as usize] > 0)
    }
}

/// BT.601 luma of an RGB triple, rounded half up.
#[inline]
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

/// Replace each pixel by its luma in all three color channels; alpha is kept.
pub fn to_grayscale(img: &RasterImage) -> RasterImage {
    let pixels = img
        .pixels
        .iter()
        .map(|&[r, g, b, a]| {
            let v = luma(r, g, b);
            [v, v, v, a]
        })
        .collect();
    RasterImage {
        width: img.width,
        height: img.height,
        pixels,
    }
}

/// Histogram of gray levels over pixels whose alpha is at least `alpha_threshold`.
pub fn histogram(img: &RasterImage, alpha_threshold: u8) -> Result<GrayHistogram> {
    let mut h = GrayHistogram::default();
    for (x, y, [r, g, b, a]) in img.enumerate() {
        if r != g || g != b {
            return Err(Error::NotGrayscale { x, y, r, g, b });
        }
        if a >= alpha_threshold {
            h.counts[r as usize] += 1;
        }
    }
    Ok(h)
}

/// An opaque image plus the positions that were background before flattening.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flattened {
    pub image: RasterImage,
    /// `true` where the source pixel was background, row-major.
    pub background: Vec<bool>,
}

impl Flattened {
    pub fn background_count(&self) -> usize {
        self.background.iter().filter(|&&b| b).count()
    }
}

/// Composite over opaque white. Pixels with alpha 0 form the background mask.
pub fn flatten_background(img: &RasterImage) -> Flattened {
    flatten_background_keyed(img, None)
}

/// Like [`flatten_background`], additionally treating every pixel whose RGB
/// equals `key` as background (for sources that were already flattened
/// onto a solid color).
pub fn flatten_background_keyed(img: &RasterImage, key: Option<[u8; 3]>) -> Flattened {
    let mut background = Vec::with_capacity(img.pixels.len());
    let pixels = img
        .pixels
        .iter()
        .map(|&[r, g, b, a]| {
            let keyed = key.is_some_and(|k| k == [r, g, b]);
            background.push(a == 0 || keyed);
            if keyed {
                return WHITE;
            }
            let a32 = a as u32;
            let over = |c: u8| ((c as u32 * a32 + 255 * (255 - a32) + 127) / 255) as u8;
            [over(r), over(g), over(b), 255]
        })
        .collect();
    Flattened {
        image: RasterImage {
            width: img.width,
            height: img.height,
            pixels,
        },
        background,
    }
}

/// Center the image on a white square and scale it to `side`x`side`.
pub fn resize_pad(img: &RasterImage, side: u32) -> Result<RasterImage> {
    resize_pad_fill(img, side, WHITE)
}

/// [`resize_pad`] with an arbitrary pad color.
///
/// The content is resampled bilinearly (in premultiplied alpha) to
/// `round(w * side / max(w, h))` by `round(h * side / max(w, h))` and
/// placed at the center of the canvas, so the padded band is never blended
/// with content.
pub fn resize_pad_fill(img: &RasterImage, side: u32, fill: Rgba) -> Result<RasterImage> {
    if side == 0 {
        return Err(Error::invalid("side", "must be positive"));
    }
    if img.is_empty() {
        return Err(Error::EmptyImage);
    }
    let (w, h) = img.dimensions();
    if w == side && h == side {
        return Ok(img.clone());
    }
    let longest = w.max(h) as u64;
    let scaled = |d: u32| (((d as u64 * side as u64 * 2 + longest) / (2 * longest)) as u32).clamp(1, side);
    let (cw, ch) = (scaled(w), scaled(h));
    let content = resample_bilinear(img, cw, ch);
    let mut canvas = RasterImage::new(side, side, fill);
    canvas.blit(&content, (side - cw) / 2, (side - ch) / 2);
    Ok(canvas)
}

fn resample_bilinear(img: &RasterImage, out_w: u32, out_h: u32) -> RasterImage {
    let (w, h) = img.dimensions();
    if (w, h) == (out_w, out_h) {
        return img.clone();
    }
    let sx = w as f64 / out_w as f64;
    let sy = h as f64 / out_h as f64;
    let axis = |d: u32, scale: f64, len: u32| {
        let s = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, (len - 1) as f64);
        let i0 = s.floor() as u32;
        let i1 = (i0 + 1).min(len - 1);
        (i0, i1, s - i0 as f64)
    };
    RasterImage::from_fn(out_w, out_h, |x, y| {
        let (x0, x1, fx) = axis(x, sx, w);
        let (y0, y1, fy) = axis(y, sy, h);
        let taps = [
            (img.get(x0, y0), (1.0 - fx) * (1.0 - fy)),
            (img.get(x1, y0), fx * (1.0 - fy)),
            (img.get(x0, y1), (1.0 - fx) * fy),
            (img.get(x1, y1), fx * fy),
        ];
        let mut acc = [0.0f64; 4];
        for (p, wgt) in taps {
            let a = p[3] as f64 * wgt;
            acc[0] += p[0] as f64 * a;
            acc[1] += p[1] as f64 * a;
            acc[2] += p[2] as f64 * a;
            acc[3] += a;
        }
        if acc[3] <= 0.0 {
            return TRANSPARENT;
        }
        let c = |v: f64| (v / acc[3]).round().clamp(0.0, 255.0) as u8;
        [c(acc[0]), c(acc[1]), c(acc[2]), acc[3].round().clamp(0.0, 255.0) as u8]
    })
}

/// Decode a PNG (any bit depth or color type) into 8-bit RGBA.
pub fn load_png(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let malformed = |reason: String| Error::MalformedImage {
        path: path.to_path_buf(),
        reason,
    };
    let reader = ImageReader::open(path)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?
        .with_guessed_format()
        .map_err(|e| malformed(e.to_string()))?;
    let decoded = reader.decode().map_err(|e| malformed(e.to_string()))?;
    Ok(RasterImage::from_image(&decoded.to_rgba8()))
}

/// Encode as 8-bit RGBA PNG.
pub fn save_png(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    img.to_image()
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::Unwritable {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn px(r: u8, g: u8, b: u8, a: u8) -> RasterImage {
        RasterImage::new(1, 1, [r, g, b, a])
    }

    #[test]
    fn grayscale_reference_values() {
        assert_eq!(to_grayscale(&px(255, 255, 255, 255)).get(0, 0), [255, 255, 255, 255]);
        assert_eq!(to_grayscale(&px(255, 0, 0, 255)).get(0, 0)[0], 76);
        assert_eq!(to_grayscale(&px(0, 0, 0, 9)).get(0, 0), [0, 0, 0, 9]);
    }

    #[test]
    fn histogram_counts_and_alpha_exclusion() {
        let img = RasterImage::from_pixels(
            2,
            2,
            vec![[0, 0, 0, 255], [0, 0, 0, 255], [255, 255, 255, 255], [255, 255, 255, 255]],
        )
        .unwrap();
        let h = histogram(&img, 1).unwrap();
        assert_eq!(h.count(0), 2);
        assert_eq!(h.count(255), 2);
        assert_eq!(h.total(), 4);

        let mut partly = img.clone();
        partly.put(0, 0, [0, 0, 0, 0]);
        partly.put(0, 1, [255, 255, 255, 0]);
        let h = histogram(&partly, 1).unwrap();
        assert_eq!((h.count(0), h.count(255), h.total()), (1, 1, 2));

        let row = RasterImage::from_pixels(3, 1, vec![[10, 10, 10, 255], [10, 10, 10, 255], [20, 20, 20, 255]]).unwrap();
        let h = histogram(&row, 1).unwrap();
        assert_eq!((h.count(10), h.count(20)), (2, 1));
    }

    #[test]
    fn histogram_rejects_color() {
        let err = histogram(&px(1, 2, 3, 255), 1).unwrap_err();
        assert!(matches!(err, Error::NotGrayscale { .. }));
    }

    #[test]
    fn flatten_composites_over_white() {
        assert_eq!(flatten_background(&px(9, 9, 9, 0)).image.get(0, 0), WHITE);
        assert_eq!(flatten_background(&px(10, 20, 30, 255)).image.get(0, 0), [10, 20, 30, 255]);
        assert_eq!(flatten_background(&px(0, 0, 0, 128)).image.get(0, 0), [127, 127, 127, 255]);

        let f = flatten_background(&RasterImage::from_pixels(2, 1, vec![[0, 0, 0, 0], [5, 5, 5, 1]]).unwrap());
        assert_eq!(f.background, vec![true, false]);
    }

    #[test]
    fn flatten_with_chroma_key() {
        let img = RasterImage::from_pixels(2, 1, vec![[0, 255, 0, 255], [0, 254, 0, 255]]).unwrap();
        let f = flatten_background_keyed(&img, Some([0, 255, 0]));
        assert_eq!(f.background, vec![true, false]);
        assert_eq!(f.image.get(0, 0), WHITE);
        assert_eq!(f.image.get(1, 0), [0, 254, 0, 255]);
    }

    #[test]
    fn resize_pad_identity_at_target_size() {
        let img = RasterImage::from_fn(256, 256, |x, y| [x as u8, y as u8, (x ^ y) as u8, 200]);
        assert_eq!(resize_pad(&img, 256).unwrap(), img);
    }

    #[test]
    fn resize_pad_letterboxes_wide_content() {
        let img = RasterImage::new(100, 50, [200, 10, 10, 255]);
        let out = resize_pad(&img, 256).unwrap();
        assert_eq!(out.dimensions(), (256, 256));
        // 100x50 on a 100x100 canvas scaled by 2.56: rows 64..192 hold content.
        for y in 0..256 {
            let expect = if (64..192).contains(&y) { [200, 10, 10, 255] } else { WHITE };
            assert_eq!(out.get(0, y), expect, "row {y}");
            assert_eq!(out.get(255, y), expect, "row {y}");
        }
    }

    #[test]
    fn resize_pad_single_pixel() {
        let out = resize_pad(&px(7, 8, 9, 255), 4).unwrap();
        assert_eq!(out, RasterImage::new(4, 4, [7, 8, 9, 255]));
    }

    #[test]
    fn resize_pad_errors() {
        assert!(matches!(resize_pad(&RasterImage::new(0, 0, WHITE), 4), Err(Error::EmptyImage)));
        assert!(matches!(resize_pad(&px(0, 0, 0, 255), 0), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn png_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let img = RasterImage::from_fn(5, 3, |x, y| [x as u8 * 40, y as u8 * 70, 3, (x * 50) as u8]);
        let path = dir.path().join("a.png");
        save_png(&img, &path).unwrap();
        assert_eq!(load_png(&path).unwrap(), img);

        assert!(matches!(load_png(dir.path().join("nope.png")), Err(Error::MissingFile(_))));

        let junk = dir.path().join("junk.png");
        std::fs::write(&junk, b"definitely not a png").unwrap();
        assert!(matches!(load_png(&junk), Err(Error::MalformedImage { .. })));

        let bad = dir.path().join("no/such/dir/x.png");
        assert!(matches!(save_png(&img, bad), Err(Error::Unwritable { .. })));
    }

    #[test]
    fn sixteen_bit_png_is_reduced_to_eight_bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("deep.png");
        let deep: image::ImageBuffer<image::Rgba<u16>, Vec<u16>> =
            image::ImageBuffer::from_fn(2, 1, |x, _| if x == 0 { image::Rgba([65535, 0, 65535, 65535]) } else { image::Rgba([0, 65535, 0, 65535]) });
        deep.save(&path).unwrap();
        let img = load_png(&path).unwrap();
        assert_eq!(img.pixels(), &[[255, 0, 255, 255], [0, 255, 0, 255]]);
    }
}
