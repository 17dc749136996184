//! Initial conditions for two-time correlation functions.
//!
//! For `τ ≥ 0` the stationary correlators
//!
//! ```text
//! Y_k(τ) = ⟨σ_k(t + τ) F(t)⟩ = Tr(σ_k e^{𝓛τ}[F ρ_ss])        (fixed on right)
//! Y_k(τ) = ⟨F(t) σ_k(t + τ)⟩ = Tr(σ_k e^{𝓛τ}[ρ_ss F])        (fixed on left)
//! ```
//!
//! are expectation values of the traceful operator `F ρ_ss` (or `ρ_ss F`)
//! propagated by the same generator as the one-time averages. Its trace,
//! `⟨F⟩∞`, multiplies the constant `R` that the trace elimination put into
//! the equations, so `dY/dτ = Q Y + ⟨F⟩∞ R`. Subtracting the stationary
//! part gives the fluctuation vector `ΔY(0) = Y(0) − ⟨F⟩∞ X(∞)`, which
//! obeys the homogeneous equation `dΔY/dτ = Q ΔY` and decays to zero.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::SteadyState;
use crate::error::{Error, Result};
use crate::linalg::vec_norm_inf;
use crate::liouvillian::{LiouvilleSystem, ModelConfig};
use crate::operator_algebra::{sigma, TransitionOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    FixedOnRight,
    FixedOnLeft,
}

/// Operators of a two-time correlator: `observed` at the later time,
/// `fixed` at the earlier one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectionPair {
    pub observed: TransitionOp,
    pub fixed: TransitionOp,
    pub side: Side,
}

impl DetectionPair {
    /// `⟨σ_eg(t + τ) σ_ge(t)⟩`, the emission correlator of the `e → g` line.
    pub fn emission(excited: usize, ground: usize) -> Self {
        DetectionPair {
            observed: sigma(excited, ground),
            fixed: sigma(ground, excited),
            side: Side::FixedOnRight,
        }
    }

    /// Emission pair of the model's detected line.
    pub fn for_config(config: &ModelConfig) -> Self {
        let (e, g) = config.emission_line();
        Self::emission(e, g)
    }

    /// Adjoint of both operators with the fixed one moved to the other side.
    /// Its correlator is the complex conjugate of this pair's.
    pub fn mirrored(self) -> Self {
        DetectionPair {
            observed: self.observed.adjoint(),
            fixed: self.fixed.adjoint(),
            side: match self.side {
                Side::FixedOnRight => Side::FixedOnLeft,
                Side::FixedOnLeft => Side::FixedOnRight,
            },
        }
    }

    pub fn is_physical(&self) -> bool {
        self.observed == self.fixed.adjoint()
    }

    /// Laplace variable at which detuning `ν` is read off. A left-fixed
    /// correlator is the conjugate of the right-fixed one, so its spectrum
    /// uses the kernel `e^{+iντ}`.
    pub fn laplace_point(&self, nu: f64) -> Complex64 {
        match self.side {
            Side::FixedOnRight => Complex64::new(0.0, nu),
            Side::FixedOnLeft => Complex64::new(0.0, -nu),
        }
    }

    /// Operator whose expectation gives `Y_k(0)` for slot operator `σ_k`.
    fn zero_lag_product(&self, slot: TransitionOp) -> Option<TransitionOp> {
        match self.side {
            Side::FixedOnRight => slot.product(self.fixed),
            Side::FixedOnLeft => self.fixed.product(slot),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorrelationIC {
    /// `Y(0)`
    pub y0: DVector<Complex64>,
    /// `ΔY(0)`
    pub dy0: DVector<Complex64>,
    /// `⟨F⟩∞`, the factor on `R` in the correlator equations.
    pub inhomogeneous_scale: Complex64,
    pub pair: DetectionPair,
    pub observed_slot: usize,
}

impl CorrelationIC {
    /// `ΔY_obs(0)`; for an emission pair `⟨σ_ee⟩ − |⟨σ_eg⟩|²`.
    pub fn observed_fluctuation(&self) -> Complex64 {
        self.dy0[self.observed_slot]
    }
}

/// Builds `Y(0)`, `⟨F⟩∞` and `ΔY(0)` for a detection pair.
pub fn regression_initial(
    sys: &LiouvilleSystem,
    ss: &SteadyState,
    pair: DetectionPair,
) -> Result<CorrelationIC> {
    let basis = sys.basis();
    basis.check_op(pair.observed)?;
    basis.check_op(pair.fixed)?;
    if ss.x_inf.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: ss.x_inf.len(),
        });
    }
    let observed_slot = basis.index_of(pair.observed).ok_or_else(|| {
        Error::invalid(
            "observed",
            format!("{} is not a stored slot", pair.observed),
        )
    })?;

    let y0_entries = basis
        .slots()
        .iter()
        .map(|slot| match pair.zero_lag_product(*slot) {
            Some(op) => basis.expectation(op, &ss.x_inf),
            None => Ok(Complex64::new(0.0, 0.0)),
        })
        .collect::<Result<Vec<_>>>()?;
    let y0 = DVector::from_vec(y0_entries);
    let inhomogeneous_scale = basis.expectation(pair.fixed, &ss.x_inf)?;
    let dy0 = &y0 - &ss.x_inf * inhomogeneous_scale;

    if let Some(deflation) = sys.deflation() {
        let leak = vec_norm_inf(&(&deflation.conserved * &y0));
        if leak > 1e-10 * (1.0 + vec_norm_inf(&y0)) {
            return Err(Error::UnreachableSteadyState(
                "correlator has a conserved, non-decaying component".into(),
            ));
        }
    }

    Ok(CorrelationIC {
        y0,
        dy0,
        inhomogeneous_scale,
        pair,
        observed_slot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::steady_state;
    use crate::liouvillian::build;
    use crate::operator_algebra::BasisMap;

    fn ic_for(cfg: &ModelConfig, pair: DetectionPair) -> (SteadyState, CorrelationIC) {
        let sys = build(cfg).unwrap();
        let ss = steady_state(&sys).unwrap();
        let ic = regression_initial(&sys, &ss, pair).unwrap();
        (ss, ic)
    }

    #[test]
    fn undriven_atom_has_no_fluctuations() {
        let cfg = ModelConfig::two_level(0.0, 0.0, 1.0);
        let (_, ic) = ic_for(&cfg, DetectionPair::emission(2, 1));
        assert_eq!(ic.y0[0], Complex64::new(0.0, 0.0));
        assert!(ic.dy0.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn resonant_two_level_variance() {
        // ⟨σ_22⟩ = 1/3, |⟨σ_21⟩|² = Ω²γ²/(2Ω² + γ²)² = 1/9 at Ω = γ = 1
        let cfg = ModelConfig::two_level(1.0, 0.0, 1.0);
        let (_, ic) = ic_for(&cfg, DetectionPair::emission(2, 1));
        let var = ic.observed_fluctuation();
        assert!((var - Complex64::new(1.0 / 3.0 - 1.0 / 9.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fluctuation_identity_and_reality() {
        for cfg in [
            ModelConfig::two_level(2.0, 0.7, 1.0),
            ModelConfig::lambda(3.0, 1.5, 0.8, -0.6, 1.0, 0.5),
        ] {
            let (ss, ic) = ic_for(&cfg, DetectionPair::for_config(&cfg));
            let defect = &ic.dy0 - (&ic.y0 - &ss.x_inf * ic.inhomogeneous_scale);
            assert!(defect.iter().all(|z| z.norm() <= 1e-14));
            let (e, g) = cfg.emission_line();
            let rho_ee = ss.rho[(e - 1, e - 1)].re;
            let coherence = ss.rho[(g - 1, e - 1)].norm_sqr();
            let var = ic.observed_fluctuation();
            assert!((var.re - (rho_ee - coherence)).abs() < 1e-12);
            assert!(var.im.abs() < 1e-12 && var.re >= -1e-12);
        }
    }

    #[test]
    fn products_onto_eliminated_population_use_trace_constraint() {
        // F = σ_31 on the right: σ_13 · σ_31 = σ_11 → Y = 1 − ⟨σ_22⟩ − ⟨σ_33⟩
        let cfg = ModelConfig::lambda(2.0, 1.0, 0.5, -0.5, 1.0, 0.7);
        let pair = DetectionPair {
            observed: sigma(1, 3),
            fixed: sigma(3, 1),
            side: Side::FixedOnRight,
        };
        let (ss, ic) = ic_for(&cfg, pair);
        let basis = BasisMap::new(3).unwrap();
        let slot = basis.index_of(sigma(1, 3)).unwrap();
        let expected = ss.rho[(0, 0)];
        assert!((ic.y0[slot] - expected).norm() < 1e-15);

        // exhaustive d ≤ 3 check against ρ directly: Y_k(0) = Tr(σ_k F ρ)
        for d in 2..=3 {
            let cfg = if d == 2 {
                ModelConfig::two_level(1.2, 0.4, 1.0)
            } else {
                ModelConfig::lambda(1.2, 0.9, 0.4, -0.3, 1.0, 0.8)
            };
            let sys = build(&cfg).unwrap();
            let ss = steady_state(&sys).unwrap();
            for &observed in sys.basis().slots() {
                for a in 1..=d {
                    for b in 1..=d {
                        for side in [Side::FixedOnRight, Side::FixedOnLeft] {
                            let pair = DetectionPair {
                                observed,
                                fixed: sigma(a, b),
                                side,
                            };
                            let ic = regression_initial(&sys, &ss, pair).unwrap();
                            let f = sigma(a, b).matrix(d);
                            for (k, slot) in sys.basis().slots().iter().enumerate() {
                                let m = match side {
                                    Side::FixedOnRight => slot.matrix(d) * &f * &ss.rho,
                                    Side::FixedOnLeft => &f * slot.matrix(d) * &ss.rho,
                                };
                                assert!((m.trace() - ic.y0[k]).norm() < 1e-14);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mirrored_pair_conjugates_y0() {
        let cfg = ModelConfig::lambda(2.5, 1.1, 1.0, -0.4, 1.0, 0.6);
        let sys = build(&cfg).unwrap();
        let ss = steady_state(&sys).unwrap();
        let pair = DetectionPair::for_config(&cfg);
        let right = regression_initial(&sys, &ss, pair).unwrap();
        let left = regression_initial(&sys, &ss, pair.mirrored()).unwrap();
        assert_eq!(pair.mirrored().mirrored(), pair);
        for k in 0..sys.n() {
            let ka = sys.basis().adjoint_slot(k);
            assert!((right.y0[k].conj() - left.y0[ka]).norm() < 1e-15);
        }
        assert!((right.inhomogeneous_scale.conj() - left.inhomogeneous_scale).norm() < 1e-15);
    }

    #[test]
    fn rejects_eliminated_or_out_of_range_observed() {
        let cfg = ModelConfig::two_level(1.0, 0.0, 1.0);
        let sys = build(&cfg).unwrap();
        let ss = steady_state(&sys).unwrap();
        let bad = DetectionPair {
            observed: sigma(1, 1),
            fixed: sigma(1, 2),
            side: Side::FixedOnRight,
        };
        assert!(regression_initial(&sys, &ss, bad).is_err());
        assert!(regression_initial(&sys, &ss, DetectionPair::emission(3, 1)).is_err());
    }
}
