//! Training-set assembly.
//!
//! `build_dataset` turns a directory of colorized PNGs into either an
//! aligned layout (side-by-side input/target pairs under `train/` and
//! `test/`) or an unpaired layout (`trainA/`, `trainB/`, `testA/`,
//! `testB/`). Either way `lineart/` and `hints/` keep the intermediate
//! artifacts and `manifest.jsonl` records every source.
//!
//! Every source is first padded (transparent) and scaled to `side`x`side`,
//! then run through the per-image pipeline with a seed derived from the
//! global seed and the source file name, so the tree does not depend on
//! processing order or thread count.

pub mod fixtures;
pub mod manifest;

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use fixtures::{generate_fixture, generate_fixtures, FixtureParams};
pub use manifest::{
    validate_manifest, DatasetHeader, DatasetManifest, EntryStatus, ManifestEntry, Split, Violation, ViolationKind,
    MANIFEST_FILE,
};

use crate::error::{Error, Result};
use crate::pipeline::{process_image, PipelineConfig};
use crate::raster::{self, flatten_background_keyed, load_png, resize_pad, save_png, RasterImage, TRANSPARENT};

pub const DEFAULT_SIDE: u32 = 256;
pub const DEFAULT_SPLIT: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// Side-by-side input|target images.
    Aligned,
    /// Separate input-domain and target-domain directories.
    Unpaired,
}

/// Place `input` (left) and `target` (right) side by side, each flattened
/// onto white and padded/scaled to `side`x`side`.
pub fn build_pair(input: &RasterImage, target: &RasterImage, side: u32) -> Result<RasterImage> {
    let left = resize_pad(&raster::flatten_background(input).image, side)?;
    let right = resize_pad(&raster::flatten_background(target).image, side)?;
    let mut pair = RasterImage::new(2 * side, side, raster::WHITE);
    pair.blit(&left, 0, 0);
    pair.blit(&right, side, 0);
    Ok(pair)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub layout: Layout,
    /// Fraction of sources that go to the training split.
    pub split: f64,
    pub side: u32,
    /// Worker threads; output does not depend on it.
    pub parallelism: usize,
    /// Per-image settings; its `seed` is the global seed.
    pub pipeline: PipelineConfig,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            layout: Layout::Aligned,
            split: DEFAULT_SPLIT,
            side: DEFAULT_SIDE,
            parallelism: 1,
            pipeline: PipelineConfig::default(),
        }
    }
}

impl BuildOptions {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.split) {
            return Err(Error::invalid("split", format!("must lie in [0, 1], got {}", self.split)));
        }
        if self.side == 0 {
            return Err(Error::invalid("side", "must be positive"));
        }
        if self.parallelism == 0 {
            return Err(Error::invalid("parallelism", "must be at least 1"));
        }
        self.pipeline.validate()
    }
}

/// Seed for one source: the first 8 bytes of SHA-256(global seed LE || file name).
pub fn image_seed(global: u64, file_name: &str) -> u64 {
    let digest = Sha256::new()
        .chain_update(global.to_le_bytes())
        .chain_update(file_name.as_bytes())
        .finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

struct Source {
    id: String,
    path: PathBuf,
    file_name: String,
    seed: u64,
    attribution: String,
}

fn list_sources(src_dir: &Path, global_seed: u64) -> Result<Vec<Source>> {
    let read = std::fs::read_dir(src_dir).map_err(|source| {
        if src_dir.exists() {
            Error::Io {
                path: src_dir.to_path_buf(),
                source,
            }
        } else {
            Error::MissingFile(src_dir.to_path_buf())
        }
    })?;
    let mut files: Vec<PathBuf> = read
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("png")))
        .collect();
    files.sort();

    let mut taken = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(files.len());
    for path in files {
        let file_name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_owned();
        let stem = path.file_stem().and_then(|n| n.to_str()).unwrap_or_default().to_owned();
        let id = if taken.contains(&stem) { file_name.replace('.', "_") } else { stem.clone() };
        taken.insert(id.clone());
        let attribution = std::fs::read_to_string(path.with_file_name(format!("{stem}.txt")))
            .map(|s| s.trim().to_owned())
            .unwrap_or_default();
        out.push(Source {
            seed: image_seed(global_seed, &file_name),
            id,
            path,
            file_name,
            attribution,
        });
    }
    Ok(out)
}

/// Why a source cannot be used, if it cannot.
fn screen(src: &Source) -> Option<String> {
    match load_png(&src.path) {
        Err(e) => Some(e.to_string()),
        Ok(img) if img.is_empty() => Some("image has no pixels".into()),
        Ok(img) if img.pixels().iter().all(|p| p[3] == 0) => Some("image has no opaque pixels".into()),
        Ok(_) => None,
    }
}

struct Dirs {
    train_input: &'static str,
    train_target: &'static str,
    test_input: &'static str,
    test_target: &'static str,
}

impl Layout {
    fn dirs(self) -> Dirs {
        match self {
            Layout::Aligned => Dirs {
                train_input: "input",
                train_target: "target",
                test_input: "input",
                test_target: "target",
            },
            Layout::Unpaired => Dirs {
                train_input: "trainA",
                train_target: "trainB",
                test_input: "testA",
                test_target: "testB",
            },
        }
    }

    fn all_dirs(self) -> &'static [&'static str] {
        match self {
            Layout::Aligned => &["lineart", "hints", "input", "target", "train", "test"],
            Layout::Unpaired => &["lineart", "hints", "trainA", "trainB", "testA", "testB"],
        }
    }
}

fn process_source(src: &Source, split: Split, out_dir: &Path, opts: &BuildOptions) -> Result<ManifestEntry> {
    let img = load_png(&src.path)?;
    let normalized = raster::resize_pad_fill(&img, opts.side, TRANSPARENT)?;
    let config = PipelineConfig {
        seed: src.seed,
        ..opts.pipeline
    };
    let art = process_image(&normalized, &config)?;
    let target = flatten_background_keyed(&normalized, config.background_key).image;

    let dirs = opts.layout.dirs();
    let (input_dir, target_dir) = match split {
        Split::Train => (dirs.train_input, dirs.train_target),
        Split::Test => (dirs.test_input, dirs.test_target),
    };
    let rel = |dir: &str, ext: &str| format!("{dir}/{}.{ext}", src.id);
    let lineart_path = rel("lineart", "png");
    let hints_path = rel("hints", "json");
    let input_path = rel(input_dir, "png");
    let target_path = rel(target_dir, "png");

    save_png(&art.lineart, out_dir.join(&lineart_path))?;
    art.hints.save(out_dir.join(&hints_path))?;
    save_png(&art.composed, out_dir.join(&input_path))?;
    save_png(&target, out_dir.join(&target_path))?;
    let pair_path = match opts.layout {
        Layout::Aligned => {
            let p = rel(
                match split {
                    Split::Train => "train",
                    Split::Test => "test",
                },
                "png",
            );
            save_png(&build_pair(&art.composed, &target, opts.side)?, out_dir.join(&p))?;
            Some(p)
        }
        Layout::Unpaired => None,
    };

    Ok(ManifestEntry {
        id: src.id.clone(),
        status: EntryStatus::Ok,
        reason: None,
        source_path: src.path.display().to_string(),
        lineart_path: Some(lineart_path),
        hints_path: Some(hints_path),
        input_path: Some(input_path),
        target_path: Some(target_path),
        pair_path,
        split: Some(split),
        seed: src.seed,
        attribution: src.attribution.clone(),
    })
}

fn skipped_entry(src: &Source, reason: String) -> ManifestEntry {
    log::warn!("skipping {}: {reason}", src.path.display());
    ManifestEntry {
        id: src.id.clone(),
        status: EntryStatus::Skipped,
        reason: Some(reason),
        source_path: src.path.display().to_string(),
        lineart_path: None,
        hints_path: None,
        input_path: None,
        target_path: None,
        pair_path: None,
        split: None,
        seed: src.seed,
        attribution: src.attribution.clone(),
    }
}

/// Build a dataset from every `*.png` in `src_dir` into `out_dir`, which
/// must be absent or empty. Unusable sources are skipped and recorded.
pub fn build_dataset(src_dir: impl AsRef<Path>, out_dir: impl AsRef<Path>, opts: &BuildOptions) -> Result<DatasetManifest> {
    let (src_dir, out_dir) = (src_dir.as_ref(), out_dir.as_ref());
    opts.validate()?;
    if out_dir.exists() && std::fs::read_dir(out_dir).map(|mut d| d.next().is_some()).unwrap_or(true) {
        return Err(Error::invalid("out_dir", format!("{} exists and is not empty", out_dir.display())));
    }
    let sources = list_sources(src_dir, opts.pipeline.seed)?;
    if sources.is_empty() {
        return Err(Error::EmptySourceDir(src_dir.to_path_buf()));
    }
    for dir in opts.layout.all_dirs() {
        let d = out_dir.join(dir);
        std::fs::create_dir_all(&d).map_err(|e| Error::Unwritable {
            path: d,
            reason: e.to_string(),
        })?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.parallelism)
        .build()
        .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
    pool.install(|| {
        let screened: Vec<Option<String>> = sources.par_iter().map(screen).collect();
        let mut usable: Vec<usize> = (0..sources.len()).filter(|&i| screened[i].is_none()).collect();
        if usable.is_empty() {
            return Err(Error::EmptySourceDir(src_dir.to_path_buf()));
        }
        usable.sort_by(|&a, &b| sources[a].id.cmp(&sources[b].id));
        let mut rng = ChaCha8Rng::seed_from_u64(opts.pipeline.seed);
        usable.shuffle(&mut rng);
        let n_train = manifest::train_count(usable.len(), opts.split);
        let mut split_of = vec![None; sources.len()];
        for (rank, &i) in usable.iter().enumerate() {
            split_of[i] = Some(if rank < n_train { Split::Train } else { Split::Test });
        }

        let mut entries: Vec<ManifestEntry> = sources
            .par_iter()
            .enumerate()
            .map(|(i, src)| match (&screened[i], split_of[i]) {
                (Some(reason), _) => skipped_entry(src, reason.clone()),
                (None, Some(split)) => process_source(src, split, out_dir, opts)
                    .unwrap_or_else(|e| skipped_entry(src, format!("{}: {e}", src.file_name))),
                (None, None) => unreachable!("usable sources always have a split"),
            })
            .collect();
        entries.sort_by(|a, b| a.id.cmp(&b.id));

        let manifest = DatasetManifest {
            header: DatasetHeader {
                layout: opts.layout,
                split: opts.split,
                seed: opts.pipeline.seed,
                side: opts.side,
                quant_k: opts.pipeline.quant_k,
                hint_k: opts.pipeline.hint_k,
                radius: opts.pipeline.radius,
                blur_sigma: opts.pipeline.blur_sigma,
            },
            entries,
        };
        manifest.save(&out_dir.join(MANIFEST_FILE))?;
        Ok(manifest)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::WHITE;

    #[test]
    fn pair_geometry() {
        let a = RasterImage::new(256, 256, [10, 10, 10, 255]);
        let b = RasterImage::new(256, 256, [200, 0, 0, 255]);
        let pair = build_pair(&a, &b, 256).unwrap();
        assert_eq!(pair.dimensions(), (512, 256));
        assert_eq!(pair.get(0, 0), [10, 10, 10, 255]);
        assert_eq!(pair.get(256, 0), [200, 0, 0, 255]);

        let wide = RasterImage::new(100, 50, [0, 0, 200, 255]);
        let pair = build_pair(&a, &wide, 256).unwrap();
        let left: RasterImage = RasterImage::from_fn(256, 256, |x, y| pair.get(x, y));
        assert_eq!(left, resize_pad(&a, 256).unwrap());
        assert_eq!(pair.get(300, 10), WHITE);
        assert_eq!(pair.get(300, 100), [0, 0, 200, 255]);
        assert_eq!(pair.get(300, 250), WHITE);

        assert!(build_pair(&RasterImage::new(0, 0, WHITE), &b, 256).is_err());
    }

    #[test]
    fn image_seeds_differ_by_name_and_seed() {
        assert_eq!(image_seed(1, "a.png"), image_seed(1, "a.png"));
        assert_ne!(image_seed(1, "a.png"), image_seed(1, "b.png"));
        assert_ne!(image_seed(1, "a.png"), image_seed(2, "a.png"));
    }

    #[test]
    fn rejects_bad_options_and_dirs() {
        let dir = tempfile::tempdir().unwrap();
        let bad = BuildOptions {
            split: 1.5,
            ..Default::default()
        };
        assert!(matches!(
            build_dataset(dir.path(), dir.path().join("o"), &bad),
            Err(Error::InvalidParameter { .. })
        ));
        let empty_src = dir.path().join("src");
        std::fs::create_dir(&empty_src).unwrap();
        assert!(matches!(
            build_dataset(&empty_src, dir.path().join("o"), &BuildOptions::default()),
            Err(Error::EmptySourceDir(_))
        ));
    }
}
