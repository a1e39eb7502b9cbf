//! Automatic color hints.
//!
//! Two clustering passes over the character's non-transparent pixels:
//! first a color quantization with the hue/saturation distance (positions
//! ignored, default k = 35), then a placement pass over the quantized
//! pixels with Euclidean distance in `(r, g, b, x, y)` (default k = 10).
//! Each final medoid becomes a filled disk of the medoid's color.

pub mod color;
pub mod distance;
pub mod kmedoid;

use std::collections::HashMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use color::{get_hue, get_sat};
pub use distance::{eq1_distance, rgbxy_distance, Dissimilarity, Eq1Mode, HueSatDistance, RgbxyDistance};
pub use kmedoid::{kmedoid, ClusterModel, KMedoidConfig};

use crate::error::{Error, Result};
use crate::raster::{PixelSample, RasterImage};

pub const DEFAULT_QUANT_K: usize = 35;
pub const DEFAULT_HINT_K: usize = 10;
pub const DEFAULT_RADIUS: u32 = 15;
pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_POINT_BUDGET: usize = 20_000;

/// A pixel color and position, with a multiplicity weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ColorPoint {
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub x: u32,
    pub y: u32,
    pub weight: u32,
}

impl ColorPoint {
    pub fn new(r: u8, g: u8, b: u8, x: u32, y: u32) -> Self {
        Self { r, g, b, x, y, weight: 1 }
    }

    pub fn rgb(&self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }

    /// Identity ignoring weight.
    pub fn key(&self) -> (u8, u8, u8, u32, u32) {
        (self.r, self.g, self.b, self.x, self.y)
    }
}

impl From<PixelSample> for ColorPoint {
    fn from(s: PixelSample) -> Self {
        Self::new(s.r, s.g, s.b, s.x, s.y)
    }
}

/// One circular color hint. Serialized flat as `x, y, radius, r, g, b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hint {
    pub x: u32,
    pub y: u32,
    pub radius: u32,
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Hint {
    pub fn color(&self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }
}

/// Ordered list of hints; later hints paint over earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HintSet {
    pub hints: Vec<Hint>,
}

impl HintSet {
    pub fn new(hints: Vec<Hint>) -> Self {
        Self { hints }
    }

    pub fn len(&self) -> usize {
        self.hints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hints.is_empty()
    }

    /// Check every center lies inside `width`x`height` and every radius is positive.
    pub fn validate(&self, width: u32, height: u32) -> Result<()> {
        for (index, h) in self.hints.iter().enumerate() {
            if h.x >= width || h.y >= height {
                return Err(Error::HintOutOfBounds {
                    index,
                    x: h.x,
                    y: h.y,
                    width,
                    height,
                });
            }
            if h.radius == 0 {
                return Err(Error::invalid("radius", format!("hint {index} has radius 0")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("hint sets always serialize") + "\n"
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Read a hint file: a JSON array of `{x, y, radius, r, g, b}` records.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let set = Self::from_json(&text).map_err(|e| Error::MalformedFile {
            what: "hint file",
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        if let Some(i) = set.hints.iter().position(|h| h.radius == 0) {
            return Err(Error::MalformedFile {
                what: "hint file",
                path: path.to_path_buf(),
                reason: format!("hint {i} has radius 0"),
            });
        }
        Ok(set)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::Unwritable {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }
}

/// Parameters of the quantization pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizeOptions {
    pub k: usize,
    pub seed: u64,
    pub mode: Eq1Mode,
    pub max_iter: usize,
}

impl Default for QuantizeOptions {
    fn default() -> Self {
        Self {
            k: DEFAULT_QUANT_K,
            seed: 0,
            mode: Eq1Mode::Symmetric,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Quantized image and the color clustering behind it. Model points are the
/// distinct colors of the input in first-occurrence order, weighted by count.
#[derive(Debug, Clone)]
pub struct Quantized {
    pub image: RasterImage,
    pub model: ClusterModel,
}

/// Reduce the non-transparent pixels of `img` to at most `k` of its own colors.
pub fn quantize(img: &RasterImage, k: usize, seed: u64) -> Result<RasterImage> {
    let opts = QuantizeOptions {
        k,
        seed,
        ..QuantizeOptions::default()
    };
    Ok(quantize_with(img, &opts)?.image)
}

pub fn quantize_with(img: &RasterImage, opts: &QuantizeOptions) -> Result<Quantized> {
    let mut slot: HashMap<[u8; 3], usize> = HashMap::new();
    let mut points: Vec<ColorPoint> = Vec::new();
    for s in img.opaque_samples() {
        let rgb = [s.r, s.g, s.b];
        match slot.get(&rgb) {
            Some(&i) => points[i].weight += 1,
            None => {
                slot.insert(rgb, points.len());
                // Position does not enter the color distance; x, y only
                // record where the color first occurs.
                points.push(s.into());
            }
        }
    }
    if points.is_empty() {
        return Err(Error::FullyTransparent);
    }
    let config = KMedoidConfig {
        max_iter: opts.max_iter,
        ..KMedoidConfig::new(opts.k, opts.seed)
    };
    let model = kmedoid(&points, &HueSatDistance::new(opts.mode), &config)?;
    let mut image = img.clone();
    for p in image.pixels_mut().iter_mut().filter(|p| p[3] > 0) {
        let cluster = model.assignments[slot[&[p[0], p[1], p[2]]]];
        let m = model.medoids[cluster];
        *p = [m.r, m.g, m.b, p[3]];
    }
    Ok(Quantized { image, model })
}

/// Parameters of the placement pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementOptions {
    pub k: usize,
    pub seed: u64,
    pub radius: u32,
    pub max_iter: usize,
    /// Above this many points, cluster a seeded uniform subsample and then
    /// assign every point to the resulting medoids.
    pub point_budget: usize,
}

impl Default for PlacementOptions {
    fn default() -> Self {
        Self {
            k: DEFAULT_HINT_K,
            seed: 0,
            radius: DEFAULT_RADIUS,
            max_iter: DEFAULT_MAX_ITER,
            point_budget: DEFAULT_POINT_BUDGET,
        }
    }
}

/// Hints plus the spatial clustering behind them; model points are the
/// non-transparent pixels in scan order.
#[derive(Debug, Clone)]
pub struct Placement {
    pub hints: HintSet,
    pub model: ClusterModel,
}

/// One hint per medoid of a `(r, g, b, x, y)` clustering of the opaque pixels.
pub fn place_hints(quantized: &RasterImage, k: usize, seed: u64, radius: u32) -> Result<HintSet> {
    let opts = PlacementOptions {
        k,
        seed,
        radius,
        ..PlacementOptions::default()
    };
    Ok(place_hints_with(quantized, &opts)?.hints)
}

pub fn place_hints_with(quantized: &RasterImage, opts: &PlacementOptions) -> Result<Placement> {
    if opts.radius == 0 {
        return Err(Error::invalid("radius", "must be at least 1"));
    }
    if opts.point_budget == 0 {
        return Err(Error::invalid("point_budget", "must be at least 1"));
    }
    let points: Vec<ColorPoint> = quantized.opaque_samples().map(ColorPoint::from).collect();
    if points.is_empty() {
        return Err(Error::FullyTransparent);
    }
    let config = KMedoidConfig {
        max_iter: opts.max_iter,
        ..KMedoidConfig::new(opts.k, opts.seed)
    };
    let model = if points.len() > opts.point_budget {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut picked = rand::seq::index::sample(&mut rng, points.len(), opts.point_budget).into_vec();
        picked.sort_unstable();
        let subset: Vec<ColorPoint> = picked.iter().map(|&i| points[i]).collect();
        let sub = kmedoid(&subset, &RgbxyDistance, &config)?;
        let medoids: Vec<usize> = sub.medoid_indices.iter().map(|&i| picked[i]).collect();
        kmedoid::model_for_medoids(&points, &RgbxyDistance, &medoids, opts.k)?
    } else {
        kmedoid(&points, &RgbxyDistance, &config)?
    };
    let hints = model
        .medoids
        .iter()
        .map(|m| Hint {
            x: m.x,
            y: m.y,
            radius: opts.radius,
            r: m.r,
            g: m.g,
            b: m.b,
        })
        .collect();
    Ok(Placement {
        hints: HintSet::new(hints),
        model,
    })
}

/// Paint each hint as a filled disk (`dx^2 + dy^2 <= radius^2`), in order.
/// Disks are clipped at the canvas edge; centers must lie inside it.
pub fn render_hints(canvas: &RasterImage, hints: &HintSet) -> Result<RasterImage> {
    hints.validate(canvas.width(), canvas.height())?;
    let mut out = canvas.clone();
    for h in &hints.hints {
        paint_disk(&mut out, h);
    }
    Ok(out)
}

pub(crate) fn paint_disk(img: &mut RasterImage, h: &Hint) {
    let r = h.radius as i64;
    let (cx, cy) = (h.x as i64, h.y as i64);
    let (w, ht) = (img.width() as i64, img.height() as i64);
    for y in (cy - r).max(0)..=(cy + r).min(ht - 1) {
        for x in (cx - r).max(0)..=(cx + r).min(w - 1) {
            let (dx, dy) = (x - cx, y - cy);
            if dx * dx + dy * dy <= r * r {
                img.put(x as u32, y as u32, [h.r, h.g, h.b, 255]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::WHITE;

    fn striped(n_colors: u32, w: u32, h: u32) -> RasterImage {
        RasterImage::from_fn(w, h, |x, _| {
            let c = x % n_colors;
            [(c * 6) as u8, (255 - c * 5) as u8, ((c * 37) % 256) as u8, 255]
        })
    }

    #[test]
    fn quantize_keeps_small_palettes() {
        let img = striped(3, 9, 4);
        assert_eq!(quantize(&img, 35, 1).unwrap(), img);
        let red = RasterImage::new(5, 5, [255, 0, 0, 255]);
        assert_eq!(quantize(&red, 35, 1).unwrap(), red);
    }

    #[test]
    fn quantize_caps_palette() {
        let img = striped(40, 40, 3);
        let out = quantize(&img, 35, 9).unwrap();
        let palette = out.palette();
        assert!(palette.len() <= 35);
        assert!(palette.is_subset(&img.palette()));
    }

    #[test]
    fn quantize_leaves_transparent_pixels() {
        let mut img = striped(40, 40, 2);
        img.put(3, 1, [1, 2, 3, 0]);
        let out = quantize(&img, 4, 0).unwrap();
        assert_eq!(out.get(3, 1), [1, 2, 3, 0]);
        assert!(matches!(quantize(&RasterImage::new(2, 2, [0, 0, 0, 0]), 3, 0), Err(Error::FullyTransparent)));
    }

    #[test]
    fn placement_counts() {
        let img = striped(7, 30, 30);
        let hints = place_hints(&img, 10, 2, 15).unwrap();
        assert_eq!(hints.len(), 10);
        for h in &hints.hints {
            assert_eq!(h.radius, 15);
            assert_eq!(h.color(), {
                let p = img.get(h.x, h.y);
                [p[0], p[1], p[2]]
            });
        }

        let mut sparse = RasterImage::new(8, 8, [0, 0, 0, 0]);
        for (x, y) in [(0, 0), (7, 7), (3, 4), (5, 1)] {
            sparse.put(x, y, [9, 9, 9, 255]);
        }
        assert_eq!(place_hints(&sparse, 10, 0, 15).unwrap().len(), 4);
    }

    #[test]
    fn placement_respects_budget() {
        let img = striped(5, 40, 40);
        let opts = PlacementOptions {
            point_budget: 300,
            seed: 4,
            ..PlacementOptions::default()
        };
        let p = place_hints_with(&img, &opts).unwrap();
        assert_eq!(p.hints.len(), 10);
        assert_eq!(p.model.assignments.len(), 1600);
        for (c, &m) in p.model.medoid_indices.iter().enumerate() {
            assert_eq!(p.model.assignments[m], c);
        }
    }

    #[test]
    fn render_counts_disk_pixels() {
        let canvas = RasterImage::new(64, 64, WHITE);
        let one = HintSet::new(vec![Hint { x: 32, y: 32, radius: 15, r: 200, g: 0, b: 0 }]);
        let out = render_hints(&canvas, &one).unwrap();
        assert_eq!(out.pixels().iter().filter(|&&p| p != WHITE).count(), 709);
        assert_eq!(render_hints(&canvas, &HintSet::default()).unwrap(), canvas);
    }

    #[test]
    fn render_overdraws_in_order_and_clips() {
        let canvas = RasterImage::new(20, 20, WHITE);
        let set = HintSet::new(vec![
            Hint { x: 5, y: 5, radius: 4, r: 255, g: 0, b: 0 },
            Hint { x: 8, y: 5, radius: 4, r: 0, g: 0, b: 255 },
            Hint { x: 0, y: 19, radius: 3, r: 0, g: 255, b: 0 },
        ]);
        let out = render_hints(&canvas, &set).unwrap();
        assert_eq!(out.get(6, 5), [0, 0, 255, 255]);
        assert_eq!(out.get(2, 5), [255, 0, 0, 255]);
        assert_eq!(out.get(0, 16), [0, 255, 0, 255]);

        let bad = HintSet::new(vec![Hint { x: 20, y: 0, radius: 1, r: 0, g: 0, b: 0 }]);
        assert!(matches!(render_hints(&canvas, &bad), Err(Error::HintOutOfBounds { index: 0, .. })));
    }

    #[test]
    fn hint_file_format() {
        let set = HintSet::new(vec![Hint { x: 1, y: 2, radius: 15, r: 3, g: 4, b: 5 }]);
        let json = set.to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value, serde_json::json!([{"x": 1, "y": 2, "radius": 15, "r": 3, "g": 4, "b": 5}]));
        assert_eq!(HintSet::from_json(&json).unwrap(), set);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.json");
        std::fs::write(&path, r#"[{"x": 1, "y": 2, "radius": 0, "r": 3, "g": 4, "b": 5}]"#).unwrap();
        assert!(matches!(HintSet::load(&path), Err(Error::MalformedFile { .. })));
        std::fs::write(&path, "{").unwrap();
        assert!(matches!(HintSet::load(&path), Err(Error::MalformedFile { .. })));
    }
}
