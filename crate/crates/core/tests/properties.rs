//! Randomized invariants over small images and point sets.

use hintcolor::hints::distance::{Eq1Mode, HueSatDistance, RgbxyDistance};
use hintcolor::hints::kmedoid::{kmedoid, KMedoidConfig};
use hintcolor::hints::{eq1_distance, ColorPoint, Hint, HintSet};
use hintcolor::lineart::is_binary;
use hintcolor::raster::{histogram, resize_pad, to_grayscale, WHITE};
use hintcolor::{divide_blend, extract_lineart, load_png, quantize, save_png, RasterImage};
use proptest::prelude::*;

fn image(max_side: u32) -> impl Strategy<Value = RasterImage> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<[u8; 4]>(), (w * h) as usize)
            .prop_map(move |px| RasterImage::from_pixels(w, h, px).expect("sized to fit"))
    })
}

/// Opaque images drawn from a few colors, closer to line art than noise.
fn drawing(max_side: u32) -> impl Strategy<Value = RasterImage> {
    (1..=max_side, 1..=max_side, prop::collection::vec(any::<[u8; 3]>(), 1..6)).prop_flat_map(|(w, h, palette)| {
        prop::collection::vec(0..palette.len(), (w * h) as usize).prop_map(move |idx| {
            let px = idx.iter().map(|&i| [palette[i][0], palette[i][1], palette[i][2], 255]).collect();
            RasterImage::from_pixels(w, h, px).expect("sized to fit")
        })
    })
}

fn point() -> impl Strategy<Value = ColorPoint> {
    (any::<[u8; 3]>(), 0..64u32, 0..64u32, 1..4u32).prop_map(|([r, g, b], x, y, w)| {
        let mut p = ColorPoint::new(r, g, b, x, y);
        p.weight = w;
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn png_round_trip(img in image(24)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.png");
        save_png(&img, &path).unwrap();
        prop_assert_eq!(load_png(&path).unwrap(), img);
    }

    #[test]
    fn grayscale_is_idempotent(img in image(24)) {
        let once = to_grayscale(&img);
        prop_assert_eq!(to_grayscale(&once), once);
    }

    #[test]
    fn histogram_counts_pixels_above_alpha(img in image(24), threshold in any::<u8>()) {
        let gray = to_grayscale(&img);
        let hist = histogram(&gray, threshold).unwrap();
        let expected = img.pixels().iter().filter(|p| p[3] >= threshold).count() as u64;
        prop_assert_eq!(hist.total(), expected);
    }

    #[test]
    fn resize_pad_is_square(img in image(40), side in 1..80u32) {
        prop_assert_eq!(resize_pad(&img, side).unwrap().dimensions(), (side, side));
    }

    #[test]
    fn lineart_is_binary_and_idempotent(img in drawing(32), tol in prop::sample::select(vec![1.0, 1.25, 1.5])) {
        let once = extract_lineart(&img, Some(tol)).unwrap();
        prop_assert!(is_binary(&once));
        prop_assert_eq!(&extract_lineart(&once, Some(tol)).unwrap(), &once);
        let adaptive = extract_lineart(&img, None).unwrap();
        prop_assert_eq!(&extract_lineart(&adaptive, None).unwrap(), &adaptive);
    }

    #[test]
    fn higher_tolerance_never_adds_lines(img in drawing(32), lo in 1.0..1.5f64, extra in 0.0..1.0f64) {
        let loose = extract_lineart(&img, Some(lo)).unwrap();
        let strict = extract_lineart(&img, Some(lo + extra)).unwrap();
        for (s, l) in strict.pixels().iter().zip(loose.pixels()) {
            prop_assert!(!(s[0] == 0 && l[0] != 0), "pixel black at higher tolerance only");
        }
    }

    #[test]
    fn hue_sat_distance_is_a_symmetric_dissimilarity(a in point(), b in point()) {
        let ab = eq1_distance(&a, &b, Eq1Mode::Symmetric);
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab, eq1_distance(&b, &a, Eq1Mode::Symmetric));
        prop_assert_eq!(eq1_distance(&a, &a, Eq1Mode::Symmetric), 0.0);
        prop_assert!(eq1_distance(&a, &b, Eq1Mode::Literal) >= 0.0);
    }

    #[test]
    fn kmedoid_invariants(points in prop::collection::vec(point(), 1..40), k in 1..6usize, seed in any::<u64>()) {
        for model in [
            kmedoid(&points, &RgbxyDistance, &KMedoidConfig::new(k, seed)).unwrap(),
            kmedoid(&points, &HueSatDistance::new(Eq1Mode::Symmetric), &KMedoidConfig::new(k, seed)).unwrap(),
        ] {
            prop_assert!(model.cluster_count() <= k);
            prop_assert!(model.cost >= 0.0);
            for pair in model.cost_trace.windows(2) {
                prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-12) + 1e-12, "trace rose: {:?}", model.cost_trace);
            }
            for (c, &m) in model.medoid_indices.iter().enumerate() {
                prop_assert_eq!(model.medoids[c], points[m]);
                prop_assert_eq!(model.assignments[m], c);
            }
            prop_assert!(model.medoid_indices.windows(2).all(|w| w[0] < w[1]));
        }
        let a = kmedoid(&points, &RgbxyDistance, &KMedoidConfig::new(k, seed)).unwrap();
        let b = kmedoid(&points, &RgbxyDistance, &KMedoidConfig::new(k, seed)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn quantize_only_reuses_input_colors(img in image(20), k in 1..8usize, seed in any::<u64>()) {
        prop_assume!(img.pixels().iter().any(|p| p[3] > 0));
        let q = quantize(&img, k, seed).unwrap();
        let palette = q.palette();
        prop_assert!(palette.len() <= k);
        prop_assert!(palette.is_subset(&img.palette()));
        for (before, after) in img.pixels().iter().zip(q.pixels()) {
            prop_assert_eq!(before[3], after[3]);
            if before[3] == 0 {
                prop_assert_eq!(before, after);
            }
        }
    }

    #[test]
    fn dividing_by_white_is_identity(img in image(20)) {
        let white = RasterImage::new(img.width(), img.height(), WHITE);
        prop_assert_eq!(divide_blend(&img, &white).unwrap(), img);
    }

    #[test]
    fn hint_json_round_trip(hints in prop::collection::vec((0..500u32, 0..500u32, 1..40u32, any::<[u8; 3]>()), 0..12)) {
        let set = HintSet::new(hints.into_iter().map(|(x, y, radius, [r, g, b])| Hint { x, y, radius, r, g, b }).collect());
        prop_assert_eq!(HintSet::from_json(&set.to_json()).unwrap(), set);
    }
}
