//! Compose line art with a hand-authored hint file instead of automatic hints.
//!
//!     cargo run --example manual_hints -- <lineart.png> <hints.json> <out.png>
//!
//! The hint file is a JSON array of `{"x", "y", "radius", "r", "g", "b"}`
//! records. With no arguments, a 30-hint grid is written and used.

use hintcolor::dataset::{generate_fixture, FixtureParams};
use hintcolor::{Hint, HintSet};

fn main() -> hintcolor::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (art, hints, out) = if let [art, hints, out] = args.as_slice() {
        (hintcolor::load_png(art)?, HintSet::load(hints)?, out.clone())
    } else {
        let img = generate_fixture(21, &FixtureParams::default());
        let art = hintcolor::extract_lineart(&img, None)?;
        let hints: Vec<Hint> = (0..30)
            .map(|i| {
                let (x, y) = (40 + (i % 6) * 35, 50 + (i / 6) * 35);
                let p = img.get(x, y);
                let [r, g, b] = if p[3] == 0 { [255, 255, 255] } else { [p[0], p[1], p[2]] };
                Hint { x, y, radius: 6, r, g, b }
            })
            .collect();
        let path = std::env::temp_dir().join("manual_hints.json");
        HintSet::new(hints).save(&path)?;
        println!("wrote {}", path.display());
        (art, HintSet::load(&path)?, std::env::temp_dir().join("manual_composed.png").display().to_string())
    };
    let composed = hintcolor::compose_input(&art, &hints, 0.0)?;
    println!("{} hints -> {out}", hints.len());
    hintcolor::save_png(&composed, out)
}
