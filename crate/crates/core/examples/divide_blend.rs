//! Combine two generator outputs: numerator / denominator * 255, per channel.
//!
//!     cargo run --example divide_blend -- <numerator.png> <denominator.png> <out.png>
//!
//! With no arguments, blends two synthetic gradients.

use hintcolor::RasterImage;

fn main() -> hintcolor::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (a, b, out) = if let [a, b, out] = args.as_slice() {
        (hintcolor::load_png(a)?, hintcolor::load_png(b)?, out.clone())
    } else {
        let a = RasterImage::from_fn(256, 256, |x, y| [x as u8, y as u8, 128, 255]);
        let b = RasterImage::from_fn(256, 256, |x, _| [255 - x as u8 / 2, 200, 180, 255]);
        (a, b, std::env::temp_dir().join("divided.png").display().to_string())
    };
    let blended = hintcolor::divide_blend(&a, &b)?;
    let saturated = blended.pixels().iter().flat_map(|p| &p[..3]).filter(|&&c| c == 255).count();
    println!("{saturated} channels clamped at 255 -> {out}");
    hintcolor::save_png(&blended, out)
}
