//! Hexagonal hue and HSV saturation over arbitrary non-negative triples.

/// Hue normalized to `[0, 1)`; 0 for achromatic input.
pub fn get_hue(r: f64, g: f64, b: f64) -> f64 {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    if delta <= 0.0 {
        return 0.0;
    }
    let sector = if max == r {
        (g - b) / delta
    } else if max == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    let h = sector / 6.0;
    let h = h - h.floor();
    // -0.0 and rounding can land exactly on 1.0
    if h >= 1.0 {
        0.0
    } else {
        h
    }
}

/// `(max - min) / max`, 0 when `max == 0`.
pub fn get_sat(r: f64, g: f64, b: f64) -> f64 {
    let max = r.max(g).max(b);
    if max <= 0.0 {
        return 0.0;
    }
    (max - r.min(g).min(b)) / max
}

/// Shortest distance between two hues on the unit circle.
pub fn circular_hue_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}
