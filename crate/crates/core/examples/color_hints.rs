//! Two clustering passes: quantize to at most 35 colors, then place 10 hints.
//!
//!     cargo run --release --example color_hints -- [input.png] [out_dir] [seed]

use std::path::PathBuf;
use std::time::Instant;

use hintcolor::dataset::{generate_fixture, FixtureParams};
use hintcolor::hints::{place_hints_with, quantize_with, render_hints, PlacementOptions, QuantizeOptions};
use hintcolor::raster::flatten_background;

fn main() -> hintcolor::Result<()> {
    let mut args = std::env::args().skip(1);
    let img = match args.next() {
        Some(path) => hintcolor::load_png(path)?,
        None => generate_fixture(11, &FixtureParams::default()),
    };
    let out = args.next().map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);

    let t = Instant::now();
    let q = quantize_with(&img, &QuantizeOptions { seed, ..Default::default() })?;
    println!(
        "quantize: {} input colors -> {} colors, cost {:.4}, best of {} starts: {} iterations + {} swaps, {:?}",
        q.model.assignments.len(),
        q.model.cluster_count(),
        q.model.cost,
        q.model.starts,
        q.model.iterations,
        q.model.swaps,
        t.elapsed()
    );

    let t = Instant::now();
    let p = place_hints_with(&q.image, &PlacementOptions { seed, ..Default::default() })?;
    println!(
        "placement: {} pixels -> {} hints, cost {:.1}, best of {} starts: {} iterations + {} swaps, {:?}",
        p.model.assignments.len(),
        p.hints.len(),
        p.model.cost,
        p.model.starts,
        p.model.iterations,
        p.model.swaps,
        t.elapsed()
    );
    for h in &p.hints.hints {
        println!("  ({:3}, {:3}) r={} rgb({}, {}, {})", h.x, h.y, h.radius, h.r, h.g, h.b);
    }

    hintcolor::save_png(&q.image, out.join("quantized.png"))?;
    p.hints.save(out.join("hints.json"))?;
    let overlay = render_hints(&flatten_background(&q.image).image, &p.hints)?;
    hintcolor::save_png(&overlay, out.join("overlay.png"))
}
