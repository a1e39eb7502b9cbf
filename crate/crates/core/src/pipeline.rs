//! The per-image chain: line art, quantization, hint placement, composition.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::compose::compose_input;
use crate::error::{Error, Result};
use crate::hints::{
    self, ClusterModel, Eq1Mode, HintSet, PlacementOptions, QuantizeOptions, DEFAULT_HINT_K, DEFAULT_MAX_ITER,
    DEFAULT_POINT_BUDGET, DEFAULT_QUANT_K, DEFAULT_RADIUS,
};
use crate::lineart::{extract_lineart_with, LineartOptions, ThresholdDecision};
use crate::raster::{self, RasterImage};

/// Every knob of the per-image chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Fixed line-art tolerance; `None` adapts it to the character size.
    pub tolerance: Option<f64>,
    pub alpha_threshold: u8,
    pub background_key: Option<[u8; 3]>,
    pub quant_k: usize,
    pub hint_k: usize,
    pub radius: u32,
    pub blur_sigma: f64,
    pub seed: u64,
    pub eq1_mode: Eq1Mode,
    pub max_iter: usize,
    pub point_budget: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            tolerance: None,
            alpha_threshold: 1,
            background_key: None,
            quant_k: DEFAULT_QUANT_K,
            hint_k: DEFAULT_HINT_K,
            radius: DEFAULT_RADIUS,
            blur_sigma: 0.0,
            seed: 0,
            eq1_mode: Eq1Mode::Symmetric,
            max_iter: DEFAULT_MAX_ITER,
            point_budget: DEFAULT_POINT_BUDGET,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.quant_k < 1 {
            return Err(Error::invalid("quant_k", "must be at least 1"));
        }
        if self.hint_k < 1 {
            return Err(Error::invalid("hint_k", "must be at least 1"));
        }
        if self.radius < 1 {
            return Err(Error::invalid("radius", "must be at least 1"));
        }
        if self.max_iter < 1 {
            return Err(Error::invalid("max_iter", "must be at least 1"));
        }
        if self.point_budget < 1 {
            return Err(Error::invalid("point_budget", "must be at least 1"));
        }
        if !(self.blur_sigma.is_finite() && self.blur_sigma >= 0.0) {
            return Err(Error::invalid("blur_sigma", "must be a non-negative number"));
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::invalid("tolerance", "must be a positive number"));
            }
        }
        Ok(())
    }

    pub fn lineart_options(&self) -> LineartOptions {
        LineartOptions {
            tolerance: self.tolerance,
            alpha_threshold: self.alpha_threshold,
            background_key: self.background_key,
        }
    }

    pub fn quantize_options(&self) -> QuantizeOptions {
        QuantizeOptions {
            k: self.quant_k,
            seed: self.seed,
            mode: self.eq1_mode,
            max_iter: self.max_iter,
        }
    }

    pub fn placement_options(&self) -> PlacementOptions {
        PlacementOptions {
            k: self.hint_k,
            seed: self.seed,
            radius: self.radius,
            max_iter: self.max_iter,
            point_budget: self.point_budget,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Artifacts {
    pub lineart: RasterImage,
    pub threshold: Option<ThresholdDecision>,
    pub quantized: RasterImage,
    pub color_model: ClusterModel,
    pub hints: HintSet,
    pub placement_model: ClusterModel,
    pub composed: RasterImage,
}

/// Run the chain on an in-memory image. Errors name the failing stage.
pub fn process_image(img: &RasterImage, config: &PipelineConfig) -> Result<Artifacts> {
    config.validate()?;
    let lineart = extract_lineart_with(img, &config.lineart_options()).map_err(|e| e.in_stage("lineart"))?;

    // Keyed backgrounds count as transparent for clustering.
    let mut source = img.clone();
    if let Some(key) = config.background_key {
        for p in source.pixels_mut().iter_mut().filter(|p| p[..3] == key) {
            p[3] = 0;
        }
    }
    let quantized = hints::quantize_with(&source, &config.quantize_options()).map_err(|e| e.in_stage("quantize"))?;
    let placement =
        hints::place_hints_with(&quantized.image, &config.placement_options()).map_err(|e| e.in_stage("place_hints"))?;
    let composed =
        compose_input(&lineart.image, &placement.hints, config.blur_sigma).map_err(|e| e.in_stage("compose"))?;
    Ok(Artifacts {
        lineart: lineart.image,
        threshold: lineart.decision,
        quantized: quantized.image,
        color_model: quantized.model,
        hints: placement.hints,
        placement_model: placement.model,
        composed,
    })
}

/// Where [`run_pipeline`] put its outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineOutputs {
    pub lineart: PathBuf,
    pub quantized: PathBuf,
    pub hints: PathBuf,
    pub composed: PathBuf,
}

impl PipelineOutputs {
    /// `lineart.png`, `quantized.png`, `hints.json`, `composed.png` under `dir`.
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            lineart: dir.join("lineart.png"),
            quantized: dir.join("quantized.png"),
            hints: dir.join("hints.json"),
            composed: dir.join("composed.png"),
        }
    }
}

/// Load `input`, run [`process_image`], and write every artifact.
pub fn run_pipeline(config: &PipelineConfig, input: &Path, outputs: &PipelineOutputs) -> Result<Artifacts> {
    config.validate()?;
    let img = raster::load_png(input).map_err(|e| e.in_stage("load"))?;
    let artifacts = process_image(&img, config)?;
    let write = || -> Result<()> {
        raster::save_png(&artifacts.lineart, &outputs.lineart)?;
        raster::save_png(&artifacts.quantized, &outputs.quantized)?;
        artifacts.hints.save(&outputs.hints)?;
        raster::save_png(&artifacts.composed, &outputs.composed)
    };
    write().map_err(|e| e.in_stage("write"))?;
    Ok(artifacts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(PipelineConfig::default().validate().is_ok());
        for bad in [
            PipelineConfig { quant_k: 0, ..Default::default() },
            PipelineConfig { hint_k: 0, ..Default::default() },
            PipelineConfig { radius: 0, ..Default::default() },
            PipelineConfig { blur_sigma: -0.5, ..Default::default() },
            PipelineConfig { tolerance: Some(0.0), ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidParameter { .. })), "{bad:?}");
        }
    }

    #[test]
    fn errors_name_their_stage() {
        let clear = RasterImage::new(4, 4, [0, 0, 0, 0]);
        let err = process_image(&clear, &PipelineConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Stage { stage: "quantize", .. }), "{err}");
    }

    #[test]
    fn chroma_key_excluded_from_clustering() {
        let img = RasterImage::from_fn(20, 20, |x, y| {
            if (5..15).contains(&x) && (5..15).contains(&y) {
                [200, 30, 30, 255]
            } else {
                [0, 255, 0, 255]
            }
        });
        let cfg = PipelineConfig {
            background_key: Some([0, 255, 0]),
            ..Default::default()
        };
        let out = process_image(&img, &cfg).unwrap();
        assert!(out.hints.hints.iter().all(|h| h.color() == [200, 30, 30]));
        assert_eq!(out.hints.len(), 10);
    }
}
