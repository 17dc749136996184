use crate::correlation::{regression_initial, CorrelationIC, DetectionPair};
use crate::dynamics::{steady_state, SteadyState};
use crate::error::{Error, Result};
use crate::liouvillian::{build, LiouvilleSystem, Model, ModelConfig};
use crate::oracle::{fourier_spectrum, integrate_correlation_auto, mollow_reference};
use crate::spectrum::{
    coherent_weight, limit_spectrum, sum_rule_target, variance_spectrum, FrequencyGrid, Method,
    SpectrumResult,
};

/// A configured emitter with its stationary state and the emission-line
/// correlation data, ready to produce spectra by any method.
#[derive(Debug, Clone)]
pub struct Emitter {
    sys: LiouvilleSystem,
    ss: SteadyState,
    ic: CorrelationIC,
}

impl Emitter {
    /// Fails with a singular-Liouvillian error when the stationary state is
    /// not unique.
    pub fn new(config: &ModelConfig) -> Result<Self> {
        Self::from_system(build(config)?, DetectionPair::for_config(config))
    }

    /// Like [`Emitter::new`], but first removes conserved quantities the
    /// ground state never excites (see
    /// [`LiouvilleSystem::deflate_conserved`]).
    pub fn reachable(config: &ModelConfig) -> Result<Self> {
        Self::from_system(
            build(config)?.deflate_conserved()?,
            DetectionPair::for_config(config),
        )
    }

    pub fn from_system(sys: LiouvilleSystem, pair: DetectionPair) -> Result<Self> {
        let ss = steady_state(&sys)?;
        let ic = regression_initial(&sys, &ss, pair)?;
        Ok(Emitter { sys, ss, ic })
    }

    pub fn system(&self) -> &LiouvilleSystem {
        &self.sys
    }

    pub fn steady_state(&self) -> &SteadyState {
        &self.ss
    }

    pub fn correlation(&self) -> &CorrelationIC {
        &self.ic
    }

    pub fn config(&self) -> &ModelConfig {
        self.sys.config()
    }

    pub fn coherent_weight(&self) -> f64 {
        coherent_weight(&self.ss, self.ic.pair, self.config())
    }

    pub fn sum_rule_target(&self) -> f64 {
        sum_rule_target(&self.ic, self.config())
    }

    pub fn limit(&self, grid: &FrequencyGrid) -> Result<SpectrumResult> {
        limit_spectrum(&self.sys, &self.ss, &self.ic, grid)
    }

    pub fn variance(&self, grid: &FrequencyGrid) -> Result<SpectrumResult> {
        variance_spectrum(&self.sys, &self.ss, &self.ic, grid)
    }

    pub fn oracle(&self, grid: &FrequencyGrid) -> Result<SpectrumResult> {
        let cfg = self.config();
        let series = integrate_correlation_auto(&self.sys, &self.ic)?;
        let mut result = fourier_spectrum(&series, grid, cfg.gamma_1, cfg.geometry_factor)?;
        result.coherent_weight = self.coherent_weight();
        Ok(result)
    }

    /// Closed-form reference; two-level model at zero detuning only.
    pub fn mollow(&self, grid: &FrequencyGrid) -> Result<SpectrumResult> {
        let cfg = self.config();
        if cfg.model != Model::TwoLevel {
            return Err(Error::invalid(
                "methods",
                "mollow reference needs model two_level",
            ));
        }
        let mut result = mollow_reference(cfg.rabi_1, cfg.detuning_1, cfg.gamma_1, grid)?;
        let u = cfg.geometry_factor;
        result.values.iter_mut().for_each(|v| *v *= u);
        result.coherent_weight *= u;
        Ok(result)
    }

    pub fn spectrum(&self, method: Method, grid: &FrequencyGrid) -> Result<SpectrumResult> {
        match method {
            Method::Limit => self.limit(grid),
            Method::Variance => self.variance(grid),
            Method::OracleTimeDomain => self.oracle(grid),
            Method::MollowAnalytic => self.mollow(grid),
        }
    }
}
