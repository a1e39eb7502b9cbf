//! Write a batch of procedural creature images.
//!
//!     cargo run --example generate_fixtures -- [out_dir] [count] [seed]

use std::path::PathBuf;

fn main() -> hintcolor::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("hintcolor-fixtures"));
    let count = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);

    for path in hintcolor::generate_fixtures(&out, count, seed)? {
        let img = hintcolor::load_png(&path)?;
        let colors = hintcolor::dataset::fixtures::interior_colors(&img).len();
        let opaque = img.pixels().iter().filter(|p| p[3] > 0).count();
        println!("{}: {colors} colors, {opaque} opaque pixels", path.display());
    }
    Ok(())
}
