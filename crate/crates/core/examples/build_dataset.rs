//! Fixtures -> aligned and unpaired dataset trees, then validation.
//!
//!     cargo run --release --example build_dataset -- [work_dir] [count] [parallelism]

use std::path::PathBuf;

use hintcolor::dataset::{build_dataset, generate_fixtures, validate_manifest, BuildOptions, Layout, MANIFEST_FILE};

fn main() -> hintcolor::Result<()> {
    let mut args = std::env::args().skip(1);
    let work = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("hintcolor-dataset"));
    let count = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let parallelism = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let _ = std::fs::remove_dir_all(&work);

    let src = work.join("src");
    generate_fixtures(&src, count, 7)?;
    for layout in [Layout::Aligned, Layout::Unpaired] {
        let out = work.join(format!("{layout:?}").to_lowercase());
        let opts = BuildOptions {
            layout,
            parallelism,
            ..BuildOptions::default()
        };
        let manifest = build_dataset(&src, &out, &opts)?;
        let violations = validate_manifest(out.join(MANIFEST_FILE))?;
        println!(
            "{layout:?}: {} train / {} test in {}, {} violations",
            manifest.count(hintcolor::dataset::Split::Train),
            manifest.count(hintcolor::dataset::Split::Test),
            out.display(),
            violations.len()
        );
    }
    Ok(())
}
