//! Paint hints over line art, sharp and with a blurred hint layer.
//!
//!     cargo run --release --example compose_input -- [out_dir] [blur_sigma]

use std::path::PathBuf;

use hintcolor::dataset::{generate_fixture, FixtureParams};
use hintcolor::raster::{BLACK, WHITE};

fn main() -> hintcolor::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let sigma: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3.0);

    let img = generate_fixture(5, &FixtureParams::default());
    let art = hintcolor::extract_lineart(&img, None)?;
    let quantized = hintcolor::quantize(&img, 35, 0)?;
    let hints = hintcolor::place_hints(&quantized, 10, 0, 15)?;

    for (name, s) in [("composed_sharp.png", 0.0), ("composed_blurred.png", sigma)] {
        let composed = hintcolor::compose_input(&art, &hints, s)?;
        let colored = composed.pixels().iter().filter(|&&p| p != WHITE && p != BLACK).count();
        println!("blur {s}: {colored} colored pixels -> {name}");
        hintcolor::save_png(&composed, out.join(name))?;
    }
    Ok(())
}
