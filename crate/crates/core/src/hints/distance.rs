//! Dissimilarities used by the two clustering passes.
//!
//! A [`Dissimilarity`] first embeds each point into whatever features it
//! needs, so per-point work (hue, saturation) is done once rather than per
//! pair.

use serde::{Deserialize, Serialize};

use super::color::{circular_hue_diff, get_hue, get_sat};
use super::ColorPoint;

pub trait Dissimilarity: Sync {
    type Embedded: Send + Sync;

    fn embed(&self, p: &ColorPoint) -> Self::Embedded;

    /// Distance from a point (`from`) to a candidate medoid (`to`).
    fn between(&self, from: &Self::Embedded, to: &Self::Embedded) -> f64;

    fn distance(&self, from: &ColorPoint, to: &ColorPoint) -> f64 {
        self.between(&self.embed(from), &self.embed(to))
    }

    /// A cheaper quantity increasing in [`between`](Self::between), used to
    /// reject far points early; `from_surrogate` maps it back to the distance.
    fn surrogate(&self, from: &Self::Embedded, to: &Self::Embedded) -> f64 {
        self.between(from, to)
    }

    fn from_surrogate(&self, surrogate: f64) -> f64 {
        surrogate
    }

    /// Summary of a group of embedded points, used to bound the surrogate
    /// for the whole group at once.
    type Envelope: Send + Sync;

    fn envelope(&self, group: &[Self::Embedded]) -> Self::Envelope;

    /// A lower bound on `surrogate(p, to)` for every `p` in the group.
    fn surrogate_floor(&self, envelope: &Self::Envelope, to: &Self::Embedded) -> f64;
}

/// How the saturation term weighs the two points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Eq1Mode {
    /// `(1.5 s1 - 1.5 s2)^2`
    #[default]
    Symmetric,
    /// `(1.5 s1 - s2)^2`, the point being `p1` and the medoid `p2`.
    Literal,
}

const SAT_GAIN: f64 = 1.5;
const SAT_RG_WEIGHT: f64 = 0.8;

/// Hue/saturation distance over squared channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HueSatDistance {
    pub mode: Eq1Mode,
}

impl HueSatDistance {
    pub fn new(mode: Eq1Mode) -> Self {
        Self { mode }
    }

    /// `(hue, saturation)` of a color as seen by this distance.
    pub fn features(r: u8, g: u8, b: u8) -> (f64, f64) {
        let (r2, g2, b2) = ((r as f64).powi(2), (g as f64).powi(2), (b as f64).powi(2));
        // Saturation is scale invariant, so (0.8, 0.8, 1) is applied as the
        // exact integers (4, 4, 5); equal color ratios then give bit-equal results.
        let sat = get_sat(4.0 * r2, 4.0 * g2, 5.0 * b2);
        debug_assert!((sat - get_sat(SAT_RG_WEIGHT * r2, SAT_RG_WEIGHT * g2, b2)).abs() < 1e-12);
        (get_hue(r2, g2, b2), sat)
    }
}

impl Dissimilarity for HueSatDistance {
    type Embedded = (f64, f64);
    type Envelope = ();

    fn embed(&self, p: &ColorPoint) -> (f64, f64) {
        Self::features(p.r, p.g, p.b)
    }

    fn between(&self, &(h1, s1): &(f64, f64), &(h2, s2): &(f64, f64)) -> f64 {
        let hue = circular_hue_diff(h1, h2).powi(2);
        let sat = match self.mode {
            Eq1Mode::Symmetric => (SAT_GAIN * s1 - SAT_GAIN * s2).powi(2),
            Eq1Mode::Literal => (SAT_GAIN * s1 - s2).powi(2),
        };
        hue + sat
    }

    fn envelope(&self, _: &[(f64, f64)]) {}

    fn surrogate_floor(&self, _: &(), _: &(f64, f64)) -> f64 {
        f64::NEG_INFINITY
    }
}

/// Hue/saturation distance between two points.
pub fn eq1_distance(p1: &ColorPoint, p2: &ColorPoint, mode: Eq1Mode) -> f64 {
    HueSatDistance::new(mode).distance(p1, p2)
}

/// Equal-weight Euclidean distance over `(r, g, b, x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RgbxyDistance;

impl Dissimilarity for RgbxyDistance {
    type Embedded = [f64; 5];
    /// Per-axis `(min, max)` bounding box.
    type Envelope = [(f64, f64); 5];

    fn embed(&self, p: &ColorPoint) -> [f64; 5] {
        [p.r as f64, p.g as f64, p.b as f64, p.x as f64, p.y as f64]
    }

    fn between(&self, a: &[f64; 5], b: &[f64; 5]) -> f64 {
        self.surrogate(a, b).sqrt()
    }

    /// Squared distance. Coordinates are integers, so this is exact.
    #[inline]
    fn surrogate(&self, a: &[f64; 5], b: &[f64; 5]) -> f64 {
        let t = [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3], a[4] - b[4]];
        t[0] * t[0] + t[1] * t[1] + t[2] * t[2] + t[3] * t[3] + t[4] * t[4]
    }

    fn from_surrogate(&self, surrogate: f64) -> f64 {
        surrogate.sqrt()
    }

    fn envelope(&self, group: &[[f64; 5]]) -> [(f64, f64); 5] {
        let mut bounds = [(f64::INFINITY, f64::NEG_INFINITY); 5];
        for p in group {
            for (b, &v) in bounds.iter_mut().zip(p) {
                *b = (b.0.min(v), b.1.max(v));
            }
        }
        bounds
    }

    fn surrogate_floor(&self, bounds: &[(f64, f64); 5], to: &[f64; 5]) -> f64 {
        bounds
            .iter()
            .zip(to)
            .map(|(&(lo, hi), &t)| {
                let gap = (lo - t).max(t - hi).max(0.0);
                gap * gap
            })
            .sum()
    }
}

pub fn rgbxy_distance(p1: &ColorPoint, p2: &ColorPoint) -> f64 {
    RgbxyDistance.distance(p1, p2)
}

/// Adapter for an arbitrary closure over raw points.
pub struct FnDistance<F>(pub F);

impl<F> Dissimilarity for FnDistance<F>
where
    F: Fn(&ColorPoint, &ColorPoint) -> f64 + Sync,
{
    type Embedded = ColorPoint;
    type Envelope = ();

    fn embed(&self, p: &ColorPoint) -> ColorPoint {
        *p
    }

    fn between(&self, a: &ColorPoint, b: &ColorPoint) -> f64 {
        (self.0)(a, b)
    }

    fn envelope(&self, _: &[ColorPoint]) {}

    fn surrogate_floor(&self, _: &(), _: &ColorPoint) -> f64 {
        f64::NEG_INFINITY
    }
}
