//! Line art, hints, and the composed network input for one image.
//!
//!     cargo run --release --example full_pipeline -- [input.png] [out_dir] [hint_k]
//!
//! A larger `hint_k` (30, say) mimics densely hand-placed hints.

use std::path::PathBuf;
use std::time::Instant;

use hintcolor::pipeline::{run_pipeline, PipelineConfig, PipelineOutputs};

fn main() -> hintcolor::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = std::env::temp_dir().join("hintcolor-pipeline");
    std::fs::create_dir_all(&out).expect("temp dir is writable");
    let input = match args.next() {
        Some(p) => PathBuf::from(p),
        None => hintcolor::generate_fixtures(&out, 1, 0)?.remove(0),
    };
    let out = args.next().map(PathBuf::from).unwrap_or(out);
    let hint_k = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);

    let config = PipelineConfig { hint_k, ..PipelineConfig::default() };
    let outputs = PipelineOutputs::in_dir(&out);
    let t = Instant::now();
    let art = run_pipeline(&config, &input, &outputs)?;
    println!("{} -> {} in {:?}", input.display(), out.display(), t.elapsed());
    if let Some(d) = art.threshold {
        println!("  threshold level {} at tolerance {:.3}", d.level, d.tolerance);
    }
    println!("  {} colors, {} hints", art.quantized.palette().len(), art.hints.len());
    Ok(())
}
