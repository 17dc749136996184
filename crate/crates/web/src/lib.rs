use resfluor::oracle::integrate_correlation_auto;
use resfluor::{Emitter, FrequencyGrid, ModelConfig, Result};
use wasm_bindgen::prelude::*;

/// Spectra on one grid, ready for plotting.
#[wasm_bindgen]
pub struct SpectrumView {
    nu: Vec<f64>,
    limit: Vec<f64>,
    variance: Vec<f64>,
    reference: Vec<f64>,
    coherent_weight: f64,
    fluctuation: f64,
    max_rel_diff: f64,
}

#[wasm_bindgen]
impl SpectrumView {
    #[wasm_bindgen(getter)]
    pub fn nu(&self) -> Vec<f64> {
        self.nu.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn limit(&self) -> Vec<f64> {
        self.limit.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn variance(&self) -> Vec<f64> {
        self.variance.clone()
    }

    /// Closed-form Mollow spectrum when available, else empty.
    #[wasm_bindgen(getter)]
    pub fn reference(&self) -> Vec<f64> {
        self.reference.clone()
    }

    #[wasm_bindgen(getter, js_name = coherentWeight)]
    pub fn coherent_weight(&self) -> f64 {
        self.coherent_weight
    }

    /// `⟨σ_ee⟩ − |⟨σ_eg⟩|²`
    #[wasm_bindgen(getter)]
    pub fn fluctuation(&self) -> f64 {
        self.fluctuation
    }

    /// `max |limit − variance| / peak`
    #[wasm_bindgen(getter, js_name = maxRelDiff)]
    pub fn max_rel_diff(&self) -> f64 {
        self.max_rel_diff
    }
}

pub fn spectrum_view(cfg: &ModelConfig, half_width: f64, count: usize) -> Result<SpectrumView> {
    let grid = FrequencyGrid::symmetric(half_width, count)?;
    let emitter = Emitter::new(cfg)?;
    let limit = emitter.limit(&grid)?;
    let variance = emitter.variance(&grid)?;
    let reference = match emitter.mollow(&grid) {
        Ok(r) if cfg.detuning_1 == 0.0 => r.values,
        _ => Vec::new(),
    };
    let peak = variance.peak();
    let max_rel_diff = if peak > 0.0 {
        limit.max_abs_diff(&variance) / peak
    } else {
        0.0
    };
    Ok(SpectrumView {
        nu: grid.points(),
        limit: limit.values,
        variance: variance.values,
        reference,
        coherent_weight: emitter.coherent_weight(),
        fluctuation: emitter.correlation().observed_fluctuation().re,
        max_rel_diff,
    })
}

/// `[τ, Re C, Im C]` triples, at most `points` of them, covering `[0, t_view]`.
pub fn correlation_samples(cfg: &ModelConfig, t_view: f64, points: usize) -> Result<Vec<f64>> {
    let emitter = Emitter::new(cfg)?;
    let series = integrate_correlation_auto(emitter.system(), emitter.correlation())?;
    let last = ((t_view / series.dt).ceil() as usize).min(series.samples.len() - 1);
    let stride = (last / points.max(2)).max(1);
    let mut out = Vec::new();
    for j in (0..=last).step_by(stride) {
        let c = series.samples[j];
        out.extend_from_slice(&[series.tau(j), c.re, c.im]);
    }
    Ok(out)
}

fn js(err: resfluor::Error) -> JsError {
    JsError::new(&err.to_string())
}

#[wasm_bindgen(js_name = twoLevelSpectrum)]
pub fn two_level_spectrum(
    rabi: f64,
    detuning: f64,
    half_width: f64,
    count: usize,
) -> std::result::Result<SpectrumView, JsError> {
    spectrum_view(
        &ModelConfig::two_level(rabi, detuning, 1.0),
        half_width,
        count,
    )
    .map_err(js)
}

#[wasm_bindgen(js_name = lambdaSpectrum)]
pub fn lambda_spectrum(
    rabi_1: f64,
    rabi_2: f64,
    detuning_1: f64,
    detuning_2: f64,
    gamma_2: f64,
    half_width: f64,
    count: usize,
) -> std::result::Result<SpectrumView, JsError> {
    let cfg = ModelConfig::lambda(rabi_1, rabi_2, detuning_1, detuning_2, 1.0, gamma_2);
    spectrum_view(&cfg, half_width, count).map_err(js)
}

#[wasm_bindgen(js_name = twoLevelCorrelation)]
pub fn two_level_correlation(
    rabi: f64,
    detuning: f64,
    t_view: f64,
    points: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    correlation_samples(&ModelConfig::two_level(rabi, detuning, 1.0), t_view, points).map_err(js)
}
