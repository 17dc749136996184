//! Incoherent emission spectra on a detuning grid.
//!
//! Two independent routes are provided:
//!
//! * **variance**: transform of the fluctuation correlator,
//!   `S(ν) = γ₁u Re[(sI − Q)⁻¹ ΔY(0)]_obs` at `s = iν`;
//! * **limit**: the finite part of the full correlator's transform,
//!   `γ₁u Re[(sI − Q)⁻¹ Y(0) + Q⁻¹ (sI − Q)⁻¹ ⟨F⟩R]_obs`, which follows from
//!   `(sI − Q)⁻¹ s⁻¹ = Q⁻¹[(sI − Q)⁻¹ − s⁻¹]`. The remaining pole
//!   `s⁻¹ ⟨F⟩ X(∞)` is the elastic line `γ₁u |⟨σ_eg⟩|² δ(ν)`; it is kept as
//!   the separate [`SpectrumResult::coherent_weight`] and never sampled.
//!
//! The limit route never touches `ΔY(0)`; the two share only `Q`, `R` and
//! `X(∞)`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlation::{CorrelationIC, DetectionPair};
use crate::dynamics::{resolvent_solve, SteadyState};
use crate::error::{Error, Result};
use crate::linalg::LuFactor;
use crate::liouvillian::{LiouvilleSystem, ModelConfig};
use crate::tolerances::BOUNDARY_DECAY_REL;

/// Uniform detuning grid `ν = ω − ω_L`, in the same units as `γ₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub nu_min: f64,
    pub nu_max: f64,
    pub count: usize,
}

impl FrequencyGrid {
    pub fn new(nu_min: f64, nu_max: f64, count: usize) -> Result<Self> {
        let grid = FrequencyGrid {
            nu_min,
            nu_max,
            count,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// `[−half_width, half_width]`.
    pub fn symmetric(half_width: f64, count: usize) -> Result<Self> {
        Self::new(-half_width, half_width, count)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu_min.is_finite() && self.nu_max.is_finite()) {
            return Err(Error::invalid("grid", "bounds must be finite"));
        }
        if self.nu_min >= self.nu_max {
            return Err(Error::invalid("grid", "nu_min must be below nu_max"));
        }
        if self.count < 2 {
            return Err(Error::invalid("grid", "count must be at least 2"));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.nu_max - self.nu_min) / (self.count - 1) as f64
    }

    pub fn point(&self, index: usize) -> f64 {
        if index + 1 == self.count {
            self.nu_max
        } else {
            self.nu_min + index as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Limit,
    Variance,
    #[serde(rename = "oracle")]
    OracleTimeDomain,
    #[serde(rename = "mollow")]
    MollowAnalytic,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Limit => "limit",
            Method::Variance => "variance",
            Method::OracleTimeDomain => "oracle",
            Method::MollowAnalytic => "mollow",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub grid: FrequencyGrid,
    /// Incoherent spectral density; `NaN` at invalid points.
    pub values: Vec<f64>,
    /// Weight of the elastic `δ(ν)` line.
    pub coherent_weight: f64,
    pub method: Method,
    pub invalid_points: Vec<usize>,
}

impl SpectrumResult {
    fn valid(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
    }

    pub fn peak(&self) -> f64 {
        self.valid()
            .map(|(_, v)| v)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.valid().map(|(_, v)| v).fold(f64::INFINITY, f64::min)
    }

    pub fn peak_index(&self) -> Option<usize> {
        self.valid()
            .fold(None, |best: Option<(usize, f64)>, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            })
            .map(|(i, _)| i)
    }

    /// Interior local maxima at or above `min_rel · peak`.
    pub fn local_maxima(&self, min_rel: f64) -> Vec<usize> {
        let floor = min_rel * self.peak();
        let v = &self.values;
        (1..v.len().saturating_sub(1))
            .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] >= floor)
            .collect()
    }

    /// Largest pointwise `|a − b|` over points valid in both.
    pub fn max_abs_diff(&self, other: &SpectrumResult) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `max(|boundary value|) / peak`.
    pub fn boundary_ratio(&self) -> f64 {
        let first = self.values.first().copied().unwrap_or(0.0).abs();
        let last = self.values.last().copied().unwrap_or(0.0).abs();
        let peak = self.peak();
        if peak > 0.0 {
            first.max(last) / peak
        } else {
            0.0
        }
    }
}

fn evaluate_grid<F>(grid: &FrequencyGrid, eval: F) -> Result<(Vec<f64>, Vec<usize>)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    grid.validate()?;
    let point = |i: usize| eval(grid.point(i)).ok();

    #[cfg(feature = "parallel")]
    let raw: Vec<Option<f64>> = {
        use rayon::prelude::*;
        (0..grid.count).into_par_iter().map(point).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let raw: Vec<Option<f64>> = (0..grid.count).map(point).collect();

    let invalid: Vec<usize> = raw
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.is_none().then_some(i))
        .collect();
    if invalid.len() == grid.count {
        return Err(Error::AllPointsInvalid);
    }
    Ok((
        raw.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect(),
        invalid,
    ))
}

fn prefactor(config: &ModelConfig) -> f64 {
    config.gamma_1 * config.geometry_factor
}

/// `γ₁ u |⟨observed⟩∞|²`.
pub fn coherent_weight(ss: &SteadyState, pair: DetectionPair, config: &ModelConfig) -> f64 {
    // ⟨σ_ab⟩ = ρ_ba
    let op = pair.observed;
    let mean = ss.rho[(op.bra().get() - 1, op.ket().get() - 1)];
    prefactor(config) * mean.norm_sqr()
}

pub fn variance_spectrum(
    sys: &LiouvilleSystem,
    ss: &SteadyState,
    ic: &CorrelationIC,
    grid: &FrequencyGrid,
) -> Result<SpectrumResult> {
    let scale = prefactor(sys.config());
    let obs = ic.observed_slot;
    let (values, invalid_points) = evaluate_grid(grid, |nu| {
        let y = resolvent_solve(sys, ic.pair.laplace_point(nu), &ic.dy0)?;
        Ok(scale * y[obs].re)
    })?;
    Ok(SpectrumResult {
        grid: *grid,
        values,
        coherent_weight: coherent_weight(ss, ic.pair, sys.config()),
        method: Method::Variance,
        invalid_points,
    })
}

pub fn limit_spectrum(
    sys: &LiouvilleSystem,
    ss: &SteadyState,
    ic: &CorrelationIC,
    grid: &FrequencyGrid,
) -> Result<SpectrumResult> {
    let q_lu = LuFactor::new(sys.q().clone())?;
    let scale = prefactor(sys.config());
    let obs = ic.observed_slot;
    let drive: DVector<Complex64> = sys.r() * ic.inhomogeneous_scale;
    let (values, invalid_points) = evaluate_grid(grid, |nu| {
        let s = ic.pair.laplace_point(nu);
        let homogeneous = resolvent_solve(sys, s, &ic.y0)?;
        let forced = q_lu.solve(&resolvent_solve(sys, s, &drive)?);
        // the s⁻¹⟨F⟩X(∞) pole has a real coefficient: zero real part off ν = 0
        // and zero principal value at ν = 0
        Ok(scale * (homogeneous[obs] + forced[obs]).re)
    })?;
    Ok(SpectrumResult {
        grid: *grid,
        values,
        coherent_weight: coherent_weight(ss, ic.pair, sys.config()),
        method: Method::Limit,
        invalid_points,
    })
}

/// Trapezoid integral of the sampled spectrum over `ν`. Segments touching an
/// invalid point are skipped.
pub fn integrated_intensity(result: &SpectrumResult) -> f64 {
    let ratio = result.boundary_ratio();
    if ratio > BOUNDARY_DECAY_REL {
        log::warn!("spectrum boundary at {ratio:.2e} of peak; integral is truncation-limited");
    }
    let h = result.grid.spacing();
    result
        .values
        .windows(2)
        .filter(|w| w[0].is_finite() && w[1].is_finite())
        .map(|w| 0.5 * h * (w[0] + w[1]))
        .sum()
}

/// `π γ₁ u ΔY_obs(0)`, the value the full-line integral must reach.
pub fn sum_rule_target(ic: &CorrelationIC, config: &ModelConfig) -> f64 {
    std::f64::consts::PI * prefactor(config) * ic.observed_fluctuation().re
}
