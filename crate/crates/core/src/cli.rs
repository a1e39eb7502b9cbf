//! Command-line front end. `main.rs` only forwards to [`run`].
//!
//! Exit codes: 0 success, 1 `dataset validate` found violations, 2 bad
//! arguments, 3 unreadable input, 4 internal invariant failure.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::compose::{compose_input, divide_blend};
use crate::dataset::{self, BuildOptions, Layout};
use crate::error::{Error, ErrorClass, Result};
use crate::hints::{self, Eq1Mode, HintSet};
use crate::lineart::extract_lineart_with;
use crate::pipeline::{run_pipeline, PipelineConfig, PipelineOutputs};
use crate::raster::{flatten_background, load_png, save_png};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATIONS: u8 = 1;
pub const EXIT_BAD_ARGS: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "hintcolor", version, about = "Line art, automatic color hints, and colorization datasets")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Log level: error, warn, info, debug, or trace.
    #[arg(long, global = true, default_value = "warn")]
    pub verbosity: log::LevelFilter,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract binary line art with an adaptive threshold.
    Lineart {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        lineart: LineartArgs,
    },
    /// Quantize colors and place color hints.
    Hints {
        input: PathBuf,
        #[command(flatten)]
        cluster: ClusterArgs,
        /// Write the quantized image here.
        #[arg(long)]
        out_quantized: Option<PathBuf>,
        /// Write the hint file (JSON) here; printed to stdout when omitted.
        #[arg(long)]
        out_hints: Option<PathBuf>,
        /// Write the hints painted over the flattened quantized image here.
        #[arg(long)]
        out_overlay: Option<PathBuf>,
    },
    /// Paint a hint file over line art.
    Compose {
        lineart: PathBuf,
        hints: PathBuf,
        output: PathBuf,
        /// Gaussian blur of the hint layer; 0 disables it.
        #[arg(long, default_value_t = 0.0)]
        blur_sigma: f64,
    },
    /// Divide-blend the aligned-pair output by the unpaired output.
    Combine {
        numerator: PathBuf,
        denominator: PathBuf,
        output: PathBuf,
    },
    /// Line art, hints, and composed input for one image.
    Pipeline {
        input: PathBuf,
        /// Directory for lineart.png, quantized.png, hints.json, composed.png.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[command(flatten)]
        lineart: LineartArgs,
        #[command(flatten)]
        cluster: ClusterArgs,
        /// Gaussian blur of the hint layer; 0 disables it.
        #[arg(long, default_value_t = 0.0)]
        blur_sigma: f64,
    },
    /// Build or check training datasets.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Synthetic test images.
    #[command(subcommand)]
    Fixtures(FixturesCommand),
}

#[derive(Debug, Subcommand)]
pub enum DatasetCommand {
    /// Process every PNG in SRC into a dataset tree at OUT.
    Build {
        src: PathBuf,
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Layout::Aligned)]
        layout: Layout,
        /// Training fraction.
        #[arg(long, default_value_t = dataset::DEFAULT_SPLIT)]
        split: f64,
        /// Output image side in pixels.
        #[arg(long, default_value_t = dataset::DEFAULT_SIDE)]
        side: u32,
        /// Worker threads; output is identical for any value.
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
        #[command(flatten)]
        lineart: LineartArgs,
        #[command(flatten)]
        cluster: ClusterArgs,
        #[arg(long, default_value_t = 0.0)]
        blur_sigma: f64,
    },
    /// Check a manifest; prints violations as JSON.
    Validate { manifest: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum FixturesCommand {
    /// Write COUNT procedural creature images into OUT.
    Generate {
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct LineartArgs {
    /// Fixed threshold tolerance; adapts to the character size when omitted.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Minimum alpha for a pixel to count as character.
    #[arg(long, default_value_t = 1)]
    pub alpha_threshold: u8,
    /// Extra background color as RRGGBB hex, for pre-flattened sources.
    #[arg(long, value_parser = parse_hex_color)]
    pub background_key: Option<[u8; 3]>,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    /// Colors kept by quantization.
    #[arg(long, default_value_t = hints::DEFAULT_QUANT_K)]
    pub quant_k: usize,
    /// Number of hints.
    #[arg(long, default_value_t = hints::DEFAULT_HINT_K)]
    pub hint_k: usize,
    /// Hint disk radius in pixels.
    #[arg(long, default_value_t = hints::DEFAULT_RADIUS)]
    pub radius: u32,
    /// Saturation term of the color distance.
    #[arg(long, value_enum, default_value_t = Eq1Mode::Symmetric)]
    pub eq1_mode: Eq1Mode,
    /// Iteration cap for each clustering pass.
    #[arg(long, default_value_t = hints::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Pixels above which hint placement clusters a subsample.
    #[arg(long, default_value_t = hints::DEFAULT_POINT_BUDGET)]
    pub point_budget: usize,
}

fn parse_hex_color(s: &str) -> std::result::Result<[u8; 3], String> {
    let hex = s.trim_start_matches('#');
    if hex.len() != 6 || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(format!("expected RRGGBB hex, got {s:?}"));
    }
    let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|e| e.to_string());
    Ok([byte(0)?, byte(2)?, byte(4)?])
}

fn config(seed: u64, lineart: &LineartArgs, cluster: &ClusterArgs, blur_sigma: f64) -> PipelineConfig {
    PipelineConfig {
        tolerance: lineart.tolerance,
        alpha_threshold: lineart.alpha_threshold,
        background_key: lineart.background_key,
        quant_k: cluster.quant_k,
        hint_k: cluster.hint_k,
        radius: cluster.radius,
        blur_sigma,
        seed,
        eq1_mode: cluster.eq1_mode,
        max_iter: cluster.max_iter,
        point_budget: cluster.point_budget,
    }
}

/// Parse `args` (including the program name) and run; never exits the process.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_BAD_ARGS } else { EXIT_OK });
        }
    };
    let _ = env_logger::Builder::new().filter_level(cli.verbosity).try_init();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::BadArgument => EXIT_BAD_ARGS,
        ErrorClass::Input => EXIT_INPUT,
        ErrorClass::Internal => EXIT_INTERNAL,
    }
}

fn execute(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Lineart { input, output, lineart } => {
            let cfg = config(cli.seed, lineart, &default_cluster(), 0.0);
            cfg.validate()?;
            let img = load_png(input)?;
            let art = extract_lineart_with(&img, &cfg.lineart_options())?;
            if let Some(d) = art.decision {
                log::info!("mean {:.3}, tolerance {:.3}, threshold {}", d.mean, d.tolerance, d.level);
            }
            save_png(&art.image, output)?;
        }
        Command::Hints {
            input,
            cluster,
            out_quantized,
            out_hints,
            out_overlay,
        } => {
            let cfg = config(cli.seed, &default_lineart(), cluster, 0.0);
            cfg.validate()?;
            let img = load_png(input)?;
            let quantized = hints::quantize_with(&img, &cfg.quantize_options()).map_err(|e| e.in_stage("quantize"))?;
            let placement = hints::place_hints_with(&quantized.image, &cfg.placement_options())
                .map_err(|e| e.in_stage("place_hints"))?;
            if let Some(path) = out_quantized {
                save_png(&quantized.image, path)?;
            }
            match out_hints {
                Some(path) => placement.hints.save(path)?,
                None => print!("{}", placement.hints.to_json()),
            }
            if let Some(path) = out_overlay {
                let base = flatten_background(&quantized.image).image;
                save_png(&hints::render_hints(&base, &placement.hints)?, path)?;
            }
        }
        Command::Compose {
            lineart,
            hints,
            output,
            blur_sigma,
        } => {
            let art = load_png(lineart)?;
            let set = HintSet::load(hints)?;
            save_png(&compose_input(&art, &set, *blur_sigma)?, output)?;
        }
        Command::Combine {
            numerator,
            denominator,
            output,
        } => {
            let a = load_png(numerator)?;
            let b = load_png(denominator)?;
            save_png(&divide_blend(&a, &b)?, output)?;
        }
        Command::Pipeline {
            input,
            out_dir,
            lineart,
            cluster,
            blur_sigma,
        } => {
            let cfg = config(cli.seed, lineart, cluster, *blur_sigma);
            cfg.validate()?;
            std::fs::create_dir_all(out_dir).map_err(|e| Error::Unwritable {
                path: out_dir.clone(),
                reason: e.to_string(),
            })?;
            let art = run_pipeline(&cfg, input, &PipelineOutputs::in_dir(out_dir))?;
            log::info!("{} hints written to {}", art.hints.len(), out_dir.display());
        }
        Command::Dataset(DatasetCommand::Build {
            src,
            out,
            layout,
            split,
            side,
            parallelism,
            lineart,
            cluster,
            blur_sigma,
        }) => {
            let opts = BuildOptions {
                layout: *layout,
                split: *split,
                side: *side,
                parallelism: *parallelism,
                pipeline: config(cli.seed, lineart, cluster, *blur_sigma),
            };
            let manifest = dataset::build_dataset(src, out, &opts)?;
            println!(
                "{} sources: {} train, {} test, {} skipped",
                manifest.entries.len(),
                manifest.count(dataset::Split::Train),
                manifest.count(dataset::Split::Test),
                manifest.entries.len() - manifest.ok_entries().count()
            );
        }
        Command::Dataset(DatasetCommand::Validate { manifest }) => {
            let violations = dataset::validate_manifest(manifest)?;
            println!("{}", serde_json::to_string_pretty(&violations).expect("violations serialize"));
            if !violations.is_empty() {
                return Ok(EXIT_VIOLATIONS);
            }
        }
        Command::Fixtures(FixturesCommand::Generate { out, count }) => {
            for path in dataset::generate_fixtures(out, *count, cli.seed)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(EXIT_OK)
}

fn default_cluster() -> ClusterArgs {
    ClusterArgs {
        quant_k: hints::DEFAULT_QUANT_K,
        hint_k: hints::DEFAULT_HINT_K,
        radius: hints::DEFAULT_RADIUS,
        eq1_mode: Eq1Mode::Symmetric,
        max_iter: hints::DEFAULT_MAX_ITER,
        point_budget: hints::DEFAULT_POINT_BUDGET,
    }
}

fn default_lineart() -> LineartArgs {
    LineartArgs {
        tolerance: None,
        alpha_threshold: 1,
        background_key: None,
    }
}
