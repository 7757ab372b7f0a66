//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export is a thin wrapper over a plain function returning
//! `Result<_, String>`, so the logic is testable natively.

use eyevis_core::eval::hsv_distance;
use eyevis_core::landmarks::EyeContourIndices;
use eyevis_core::residue::{binary_threshold_vis, hsv_uv_simulate, residue_ratio};
use eyevis_core::synthetic::{render, EyeSpec, SceneSpec};
use eyevis_core::{Config, RasterImage, Rect};
use wasm_bindgen::prelude::*;

/// An RGBA picture plus the area ratios it was derived from.
#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Rendering {
    rgba: Vec<u8>,
    black_ratio: f64,
    pink_ratio: f64,
}

#[wasm_bindgen]
impl Rendering {
    #[wasm_bindgen(getter)]
    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn black_ratio(&self) -> f64 {
        self.black_ratio
    }

    /// For threshold renderings, the in-threshold share.
    #[wasm_bindgen(getter)]
    pub fn pink_ratio(&self) -> f64 {
        self.pink_ratio
    }
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

/// Defaults overlaid with a JSON object of config fields, e.g.
/// `{"blue_factor": 1.4, "pink": {"h_lo": 290}}`.
pub fn config_from_json(json: &str) -> Result<Config, String> {
    if json.trim().is_empty() {
        return Ok(Config::default());
    }
    let value: serde_json::Value = serde_json::from_str(json).map_err(err)?;
    let table = toml::Table::try_from(value).map_err(|e| format!("config must be an object: {e}"))?;
    let cfg = Config::default().merged(table).map_err(err)?;
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

pub fn hsv_uv_inner(rgba: &[u8], width: u32, height: u32, config: &str) -> Result<Rendering, String> {
    let cfg = config_from_json(config)?;
    let img = RasterImage::from_rgba(width, height, rgba).map_err(err)?;
    let out = hsv_uv_simulate(&img, &cfg).map_err(err)?;
    Ok(Rendering {
        rgba: out.combined.to_rgba(),
        black_ratio: out.black.ratio,
        pink_ratio: out.pink.ratio,
    })
}

pub fn binary_threshold_inner(
    rgba: &[u8],
    width: u32,
    height: u32,
    lo: u8,
    hi: u8,
    config: &str,
) -> Result<Rendering, String> {
    let cfg = config_from_json(config)?;
    let img = RasterImage::from_rgba(width, height, rgba).map_err(err)?;
    let out = binary_threshold_vis(&img, lo, hi, &cfg).map_err(err)?;
    let inside = residue_ratio(&out.inside).map_err(err)?;
    Ok(Rendering {
        rgba: out.image.to_rgba(),
        black_ratio: inside,
        pink_ratio: inside,
    })
}

/// Mean HSV distance between two same-sized RGBA buffers, as JSON with
/// `d`, `d_h`, `d_s`, `d_v` and `pixels`.
pub fn illumination_inner(a: &[u8], b: &[u8], width: u32, height: u32) -> Result<String, String> {
    let a = RasterImage::from_rgba(width, height, a).map_err(err)?;
    let b = RasterImage::from_rgba(width, height, b).map_err(err)?;
    let report = hsv_distance(&a, &b).map_err(err)?;
    serde_json::to_string(&report).map_err(err)
}

/// A painted-eye picture to play with before loading a photo.
pub fn sample_scene_inner(width: u32, height: u32, painted: bool) -> Result<Vec<u8>, String> {
    let (w, h) = (f64::from(width), f64::from(height));
    let band = |y0: f64, y1: f64| Rect::new(width / 10, (h * y0) as u32, width - width / 10, (h * y1) as u32);
    let spec = SceneSpec {
        width,
        height,
        eyes: [
            EyeSpec::new(w * 0.32, h * 0.5, w * 0.12, h * 0.08),
            EyeSpec::new(w * 0.68, h * 0.5, w * 0.12, h * 0.08),
        ],
        black: if painted { Some(band(0.62, 0.72).map_err(err)?) } else { None },
        pink: if painted { Some(band(0.25, 0.38).map_err(err)?) } else { None },
    };
    let scene = render(&spec, &EyeContourIndices::default(), "sample").map_err(err)?;
    Ok(scene.image.to_rgba())
}

#[wasm_bindgen]
pub fn hsv_uv(rgba: &[u8], width: u32, height: u32, config: &str) -> Result<Rendering, JsError> {
    hsv_uv_inner(rgba, width, height, config).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn binary_threshold(
    rgba: &[u8],
    width: u32,
    height: u32,
    lo: u8,
    hi: u8,
    config: &str,
) -> Result<Rendering, JsError> {
    binary_threshold_inner(rgba, width, height, lo, hi, config).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn illumination_distance(a: &[u8], b: &[u8], width: u32, height: u32) -> Result<String, JsError> {
    illumination_inner(a, b, width, height).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sample_scene(width: u32, height: u32, painted: bool) -> Result<Vec<u8>, JsError> {
    sample_scene_inner(width, height, painted).map_err(|e| JsError::new(&e))
}
