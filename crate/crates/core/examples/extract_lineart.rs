//! Adaptive-threshold line art from a colorized image.
//!
//!     cargo run --example extract_lineart -- [input.png] [output.png] [tolerance]
//!
//! Without an input a procedural fixture is used. Without a tolerance it
//! adapts to how much of the canvas the character covers.

use hintcolor::dataset::{generate_fixture, FixtureParams};
use hintcolor::lineart::{extract_lineart_with, LineartOptions};

fn main() -> hintcolor::Result<()> {
    let mut args = std::env::args().skip(1);
    let img = match args.next() {
        Some(path) => hintcolor::load_png(path)?,
        None => generate_fixture(3, &FixtureParams::default()),
    };
    let out = args.next().unwrap_or_else(|| std::env::temp_dir().join("lineart.png").display().to_string());
    let tolerance = args.next().and_then(|s| s.parse().ok());

    let art = extract_lineart_with(&img, &LineartOptions { tolerance, ..Default::default() })?;
    match art.decision {
        Some(d) => println!(
            "mean level {:.2}, tolerance {:.3} (character covers {:.1}%), threshold {}{}",
            d.mean,
            d.tolerance,
            100.0 * d.character_fraction.unwrap_or(0.0),
            d.level,
            if d.satisfied { "" } else { " (no line content)" }
        ),
        None => println!("no character pixels"),
    }
    let black = art.image.pixels().iter().filter(|p| p[0] == 0).count();
    println!("{black} line pixels -> {out}");
    hintcolor::save_png(&art.image, &out)
}
