//! Deterministic tooling for hint-guided line-art colorization.
//!
//! The pipeline for one colorized character image:
//!
//! 1. [`lineart`]: adaptive-threshold extraction of binary line art.
//! 2. [`hints`]: k-medoid color quantization with a hue/saturation
//!    distance, then k-medoid placement of circular color hints in
//!    `(r, g, b, x, y)` space.
//! 3. [`compose`]: hints painted over the line art as a single network
//!    input, and the divide blend used to combine two generator outputs.
//! 4. [`dataset`]: aligned and unpaired training trees with a manifest,
//!    plus procedural fixtures for testing.
//!
//! Everything is a pure function of its inputs and seed.

pub mod cli;
pub mod compose;
pub mod dataset;
pub mod error;
pub mod hints;
pub mod lineart;
pub mod pipeline;
pub mod raster;

pub use compose::{compose_input, divide_blend, gaussian_blur};
pub use dataset::{build_dataset, build_pair, generate_fixtures, validate_manifest, BuildOptions, Layout};
pub use error::{Error, Result};
pub use hints::{kmedoid, place_hints, quantize, render_hints, ColorPoint, ClusterModel, Hint, HintSet};
pub use lineart::{extract_lineart, select_threshold, weighted_mean_level, ThresholdDecision};
pub use pipeline::{process_image, run_pipeline, PipelineConfig};
pub use raster::{load_png, save_png, GrayHistogram, RasterImage};
