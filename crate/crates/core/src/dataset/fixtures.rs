//! Procedural stand-ins for colorized character art: smooth blob bodies
//! with shaded color patches, black outlines, and a transparent background.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::raster::{save_png, RasterImage, Rgba, BLACK, TRANSPARENT};

pub const FIXTURE_SIDE: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixtureParams {
    pub side: u32,
    pub min_colors: usize,
    pub max_colors: usize,
    pub min_outline: u32,
    pub max_outline: u32,
    /// Darkening at the far side of the light gradient, in `[0, 1)`;
    /// 0 leaves every patch flat.
    pub shading: f64,
}

impl Default for FixtureParams {
    fn default() -> Self {
        Self {
            side: FIXTURE_SIDE,
            min_colors: 3,
            max_colors: 8,
            min_outline: 1,
            max_outline: 3,
            shading: 0.3,
        }
    }
}

/// Seed of the `index`-th fixture of a batch.
pub fn fixture_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Distinct opaque colors other than black.
pub fn interior_colors(img: &RasterImage) -> BTreeSet<[u8; 3]> {
    img.pixels()
        .iter()
        .filter(|p| p[3] == 255 && **p != BLACK)
        .map(|p| [p[0], p[1], p[2]])
        .collect()
}

/// One creature image, fully determined by `seed`.
///
/// Panics if `params.shading` is outside `[0, 1)`.
pub fn generate_fixture(seed: u64, params: &FixtureParams) -> RasterImage {
    assert!((0.0..1.0).contains(&params.shading), "shading must be in [0, 1), got {}", params.shading);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let img = draw_creature(&mut rng, params);
        if interior_colors(&img).len() >= params.min_colors {
            return img;
        }
    }
}

/// Write `count` fixtures as `fixture_000.png`, `fixture_001.png`, ... into `out_dir`.
pub fn generate_fixtures(out_dir: impl AsRef<Path>, count: usize, seed: u64) -> Result<Vec<PathBuf>> {
    if count == 0 {
        return Err(Error::invalid("count", "must be at least 1"));
    }
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Unwritable {
        path: out_dir.to_path_buf(),
        reason: e.to_string(),
    })?;
    let params = FixtureParams::default();
    (0..count)
        .map(|i| {
            let path = out_dir.join(format!("fixture_{i:03}.png"));
            save_png(&generate_fixture(fixture_seed(seed, i as u64), &params), &path)?;
            Ok(path)
        })
        .collect()
}

struct Blob {
    cx: f64,
    cy: f64,
    r: f64,
}

fn draw_creature(rng: &mut ChaCha8Rng, params: &FixtureParams) -> RasterImage {
    let s = params.side as f64;
    let mut blobs = Vec::new();
    let (bx, by) = (s * rng.random_range(0.42..0.58), s * rng.random_range(0.45..0.6));
    for _ in 0..rng.random_range(3..=5) {
        blobs.push(Blob {
            cx: bx + s * rng.random_range(-0.12..0.12),
            cy: by + s * rng.random_range(-0.12..0.12),
            r: s * rng.random_range(0.08..0.15),
        });
    }
    // ears, limbs, tails
    for _ in 0..rng.random_range(1..=3) {
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let dist = s * rng.random_range(0.17..0.26);
        blobs.push(Blob {
            cx: bx + dist * angle.cos(),
            cy: by + dist * angle.sin(),
            r: s * rng.random_range(0.04..0.07),
        });
    }
    let field = |x: f64, y: f64| -> f64 {
        blobs
            .iter()
            .map(|b| b.r * b.r / ((x - b.cx).powi(2) + (y - b.cy).powi(2)).max(1e-9))
            .sum()
    };

    let n_colors = rng.random_range(params.min_colors..=params.max_colors);
    let palette = random_palette(rng, n_colors);
    let side = params.side;
    let mut body = vec![false; (side * side) as usize];
    for y in 0..side {
        for x in 0..side {
            body[(y * side + x) as usize] = field(x as f64 + 0.5, y as f64 + 0.5) >= 1.0;
        }
    }
    let body_pixels: Vec<(u32, u32)> = (0..side * side)
        .filter(|&i| body[i as usize])
        .map(|i| (i % side, i / side))
        .collect();

    let mut img = RasterImage::new(side, side, TRANSPARENT);
    for &(x, y) in &body_pixels {
        img.put(x, y, palette[0]);
    }
    if !body_pixels.is_empty() {
        for &color in &palette[1..] {
            let (cx, cy) = body_pixels[rng.random_range(0..body_pixels.len())];
            let (rx, ry) = (rng.random_range(10.0..28.0), rng.random_range(10.0..28.0));
            for &(x, y) in &body_pixels {
                let dx = (x as f64 - cx as f64) / rx;
                let dy = (y as f64 - cy as f64) / ry;
                if dx * dx + dy * dy <= 1.0 {
                    img.put(x, y, color);
                }
            }
        }
    }

    let thickness = rng.random_range(params.min_outline..=params.max_outline) as i64;
    let colors = img.clone();
    let inside = |x: i64, y: i64| x >= 0 && y >= 0 && x < side as i64 && y < side as i64 && body[(y as u32 * side + x as u32) as usize];
    for &(x, y) in &body_pixels {
        let (xi, yi) = (x as i64, y as i64);
        let mut edge = false;
        'scan: for dy in -thickness..=thickness {
            for dx in -thickness..=thickness {
                if dx * dx + dy * dy <= thickness * thickness && !inside(xi + dx, yi + dy) {
                    edge = true;
                    break 'scan;
                }
            }
        }
        let seam = [(1, 0), (0, 1)]
            .iter()
            .any(|&(dx, dy)| inside(xi + dx, yi + dy) && colors.get((xi + dx) as u32, (yi + dy) as u32) != colors.get(x, y));
        if edge || seam {
            img.put(x, y, BLACK);
        }
    }

    if params.shading > 0.0 {
        // one light direction for the whole figure; patches darken smoothly
        // away from it, which spreads each flat color over many shades
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let (lx, ly) = (angle.cos(), angle.sin());
        for &(x, y) in &body_pixels {
            let px = img.get(x, y);
            if px == BLACK {
                continue;
            }
            let along = ((x as f64 - bx) * lx + (y as f64 - by) * ly) / (0.25 * s);
            let dim = 1.0 - params.shading * (0.5 + 0.5 * along).clamp(0.0, 1.0);
            let c = |u: u8| (u as f64 * dim).round().max(1.0) as u8;
            img.put(x, y, [c(px[0]), c(px[1]), c(px[2]), 255]);
        }
    }
    img
}

fn random_palette(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rgba> {
    let mut out: Vec<Rgba> = Vec::with_capacity(n);
    while out.len() < n {
        let h = rng.random_range(0.0..1.0);
        let s = rng.random_range(0.35..1.0);
        let v = rng.random_range(0.6..1.0);
        let c = hsv_to_rgba(h, s, v);
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

fn hsv_to_rgba(h: f64, s: f64, v: f64) -> Rgba {
    let sector = (h * 6.0).floor();
    let f = h * 6.0 - sector;
    let (p, q, t) = (v * (1.0 - s), v * (1.0 - f * s), v * (1.0 - (1.0 - f) * s));
    let (r, g, b) = match sector as i64 % 6 {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    let c = |u: f64| (u * 255.0).round() as u8;
    [c(r), c(g), c(b), 255]
}
