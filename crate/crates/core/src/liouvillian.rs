//! Bloch equations `dX/dt = Q X + R` for the shipped emitter models.
//!
//! `Q` and `R` are obtained by applying the rotating-frame Lindblad
//! generator
//!
//! ```text
//! L[ρ] = −i[H, ρ] + Σ_k γ_k (J_k ρ J_k† − ½{J_k† J_k, ρ})
//! ```
//!
//! to the density-matrix element carried by each vector slot and reading off
//! `⟨σ_i⟩ = Tr(σ_i L[·])`. Nothing is transcribed by hand, so both models
//! share one code path.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{vec_norm_inf, LuFactor};
use crate::operator_algebra::{sigma, BasisMap, TransitionOp};
use crate::tolerances::ZERO_EIGENVALUE;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Ground `|1⟩`, excited `|2⟩`.
    TwoLevel,
    /// Grounds `|1⟩`, `|2⟩`, excited `|3⟩`.
    Lambda,
}

fn default_geometry() -> f64 {
    1.0
}

/// Physical parameters. Frequencies and rates share one angular unit,
/// normally `γ₁ = 1`.
///
/// The drive enters as `−(Ω/2)(σ_e g + σ_g e)` and the detuning as
/// `−Δ σ_ee` in the frame rotating with each laser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub model: Model,
    #[serde(default)]
    pub rabi_1: f64,
    #[serde(default)]
    pub rabi_2: f64,
    #[serde(default)]
    pub detuning_1: f64,
    #[serde(default)]
    pub detuning_2: f64,
    pub gamma_1: f64,
    #[serde(default)]
    pub gamma_2: f64,
    #[serde(default = "default_geometry")]
    pub geometry_factor: f64,
}

impl ModelConfig {
    pub fn two_level(rabi: f64, detuning: f64, gamma: f64) -> Self {
        ModelConfig {
            model: Model::TwoLevel,
            rabi_1: rabi,
            rabi_2: 0.0,
            detuning_1: detuning,
            detuning_2: 0.0,
            gamma_1: gamma,
            gamma_2: 0.0,
            geometry_factor: 1.0,
        }
    }

    pub fn lambda(
        rabi_1: f64,
        rabi_2: f64,
        detuning_1: f64,
        detuning_2: f64,
        gamma_1: f64,
        gamma_2: f64,
    ) -> Self {
        ModelConfig {
            model: Model::Lambda,
            rabi_1,
            rabi_2,
            detuning_1,
            detuning_2,
            gamma_1,
            gamma_2,
            geometry_factor: 1.0,
        }
    }

    pub fn with_geometry_factor(mut self, u: f64) -> Self {
        self.geometry_factor = u;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields: [(&'static str, f64); 7] = [
            ("rabi_1", self.rabi_1),
            ("rabi_2", self.rabi_2),
            ("detuning_1", self.detuning_1),
            ("detuning_2", self.detuning_2),
            ("gamma_1", self.gamma_1),
            ("gamma_2", self.gamma_2),
            ("geometry_factor", self.geometry_factor),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {value}")));
            }
        }
        if self.gamma_1 <= 0.0 {
            return Err(Error::invalid(
                "gamma_1",
                format!("must be > 0, got {}", self.gamma_1),
            ));
        }
        for (name, value) in [
            ("rabi_1", self.rabi_1),
            ("rabi_2", self.rabi_2),
            ("gamma_2", self.gamma_2),
        ] {
            if value < 0.0 {
                return Err(Error::invalid(name, format!("must be ≥ 0, got {value}")));
            }
        }
        if self.geometry_factor <= 0.0 {
            return Err(Error::invalid(
                "geometry_factor",
                format!("must be > 0, got {}", self.geometry_factor),
            ));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self.model {
            Model::TwoLevel => 2,
            Model::Lambda => 3,
        }
    }

    /// `(excited, ground)` levels of the detected `|e⟩ → |1⟩` line.
    pub fn emission_line(&self) -> (usize, usize) {
        match self.model {
            Model::TwoLevel => (2, 1),
            Model::Lambda => (3, 1),
        }
    }

    /// Largest Rabi frequency the model actually uses.
    pub fn max_rabi(&self) -> f64 {
        match self.model {
            Model::TwoLevel => self.rabi_1,
            Model::Lambda => self.rabi_1.max(self.rabi_2),
        }
    }

    pub fn hamiltonian(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        let drive = |e: usize, g: usize, rabi: f64| {
            (sigma(e, g).matrix(d) + sigma(g, e).matrix(d)) * Complex64::new(-rabi / 2.0, 0.0)
        };
        let level = |k: usize, energy: f64| sigma(k, k).matrix(d) * Complex64::new(energy, 0.0);
        match self.model {
            Model::TwoLevel => level(2, -self.detuning_1) + drive(2, 1, self.rabi_1),
            Model::Lambda => {
                level(3, -self.detuning_1)
                    + level(2, -(self.detuning_1 - self.detuning_2))
                    + drive(3, 1, self.rabi_1)
                    + drive(3, 2, self.rabi_2)
            }
        }
    }

    /// `(rate, jump operator)` pairs.
    pub fn jump_operators(&self) -> Vec<(f64, TransitionOp)> {
        match self.model {
            Model::TwoLevel => vec![(self.gamma_1, sigma(1, 2))],
            Model::Lambda => vec![(self.gamma_1, sigma(1, 3)), (self.gamma_2, sigma(2, 3))],
        }
    }

    /// Differences `E_i − E_j` (`i ≠ j`) of dressed-state energies, sorted
    /// ascending: where sidebands of a strongly driven emitter sit.
    pub fn dressed_transition_frequencies(&self) -> Vec<f64> {
        let energies = SymmetricEigen::new(self.hamiltonian()).eigenvalues;
        let mut out = Vec::new();
        for (i, ei) in energies.iter().enumerate() {
            for (j, ej) in energies.iter().enumerate() {
                if i != j {
                    out.push(ei - ej);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

/// Spectral projector data for a zero eigenvalue of `Q` that only
/// conserved quantities (never reached from the ground state) produce.
#[derive(Debug, Clone)]
pub struct Deflation {
    /// Conserved functionals `w` with `w Q = 0`, one per row.
    pub conserved: DMatrix<Complex64>,
    /// `P₀ = V₀ (W V₀)⁻¹ W`.
    pub projector: DMatrix<Complex64>,
}

#[derive(Debug, Clone)]
pub struct LiouvilleSystem {
    basis: BasisMap,
    q: DMatrix<Complex64>,
    r: DVector<Complex64>,
    config: ModelConfig,
    deflation: Option<Deflation>,
}

impl LiouvilleSystem {
    /// Projects an arbitrary Lindblad generator onto the trace-eliminated
    /// basis of `dim` levels.
    pub fn from_lindblad(
        dim: usize,
        hamiltonian: &DMatrix<Complex64>,
        jumps: &[(f64, TransitionOp)],
        config: ModelConfig,
    ) -> Result<Self> {
        let basis = BasisMap::new(dim)?;
        let jump_mats: Vec<(f64, DMatrix<Complex64>)> = jumps
            .iter()
            .filter(|(rate, _)| *rate != 0.0)
            .map(|(rate, op)| {
                basis.check_op(*op)?;
                Ok((*rate, op.matrix(dim)))
            })
            .collect::<Result<_>>()?;
        let generator = |rho: &DMatrix<Complex64>| -> DMatrix<Complex64> {
            let mut out = (hamiltonian * rho - rho * hamiltonian) * (-I);
            for (rate, j) in &jump_mats {
                let jd = j.adjoint();
                let jdj = &jd * j;
                out += (j * rho * &jd - (&jdj * rho + rho * &jdj) * Complex64::new(0.5, 0.0))
                    * Complex64::new(*rate, 0.0);
            }
            out
        };
        // ⟨σ_ab⟩ = Tr(σ_ab A) = A_ba
        let read =
            |a: &DMatrix<Complex64>, op: TransitionOp| a[(op.bra().get() - 1, op.ket().get() - 1)];

        let n = basis.len();
        let ground = sigma(1, 1).matrix(dim);
        let drift = generator(&ground);
        let r = DVector::from_iterator(n, basis.slots().iter().map(|op| read(&drift, *op)));

        let mut q = DMatrix::zeros(n, n);
        for (j, op) in basis.slots().iter().enumerate() {
            // ρ contribution of X_j, with the trace constraint folded in
            let column_state = if op.is_population() {
                op.matrix(dim) - &ground
            } else {
                op.adjoint().matrix(dim)
            };
            let image = generator(&column_state);
            for (i, row_op) in basis.slots().iter().enumerate() {
                q[(i, j)] = read(&image, *row_op);
            }
        }
        Ok(LiouvilleSystem {
            basis,
            q,
            r,
            config,
            deflation: None,
        })
    }

    pub fn basis(&self) -> &BasisMap {
        &self.basis
    }

    pub fn q(&self) -> &DMatrix<Complex64> {
        &self.q
    }

    pub fn r(&self) -> &DVector<Complex64> {
        &self.r
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.basis.len()
    }

    pub fn deflation(&self) -> Option<&Deflation> {
        self.deflation.as_ref()
    }

    /// Restricts the dynamics to what is reachable from the ground state.
    ///
    /// When `Q` is singular because some quantity is conserved and undriven
    /// (e.g. a level with neither drive nor decay), the zero eigenvalues are
    /// shifted to `−1` by subtracting their spectral projector. Vectors with
    /// no conserved component evolve exactly as before. A nonsingular `Q` is
    /// returned unchanged.
    pub fn deflate_conserved(&self) -> Result<Self> {
        if LuFactor::new(self.q.clone()).is_ok() {
            return Ok(self.clone());
        }
        let n = self.n();
        let svd = self.q.clone().svd(true, true);
        let (u, v_t) = (svd.u.expect("requested U"), svd.v_t.expect("requested Vᴴ"));
        let scale = svd.singular_values.max().max(1.0);
        let null: Vec<usize> = (0..n)
            .filter(|&k| svd.singular_values[k] < ZERO_EIGENVALUE * scale * 1e2)
            .collect();
        if null.is_empty() {
            return Err(Error::UnreachableSteadyState(
                "Q is numerically singular without an exact null space".into(),
            ));
        }
        let k = null.len();
        let w = DMatrix::from_fn(k, n, |i, j| u[(j, null[i])].conj());
        let v0 = DMatrix::from_fn(n, k, |i, j| v_t[(null[j], i)].conj());

        let gram = LuFactor::new(&w * &v0).map_err(|_| {
            Error::UnreachableSteadyState("zero eigenvalue of Q is defective".into())
        })?;
        let drive = &w * &self.r;
        if vec_norm_inf(&drive) > 1e-10 * (1.0 + vec_norm_inf(&self.r)) {
            return Err(Error::UnreachableSteadyState(
                "a conserved quantity is driven; no stationary state".into(),
            ));
        }
        let projector = &v0 * gram.inverse() * &w;
        let q = &self.q - &projector;
        LuFactor::new(q.clone())?;
        Ok(LiouvilleSystem {
            basis: self.basis.clone(),
            q,
            r: self.r.clone(),
            config: self.config.clone(),
            deflation: Some(Deflation {
                conserved: w,
                projector,
            }),
        })
    }

    /// `dX/dt` for the affine system.
    pub fn rhs(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        &self.q * x + &self.r
    }
}

/// Two-level atom, `X = (⟨σ_22⟩, ⟨σ_12⟩, ⟨σ_21⟩)`.
pub fn build_two_level(config: &ModelConfig) -> Result<LiouvilleSystem> {
    if config.model != Model::TwoLevel {
        return Err(Error::invalid("model", "expected two_level"));
    }
    config.validate()?;
    LiouvilleSystem::from_lindblad(
        2,
        &config.hamiltonian(),
        &config.jump_operators(),
        config.clone(),
    )
}

/// Three-level Λ atom, `n = 8`.
pub fn build_lambda(config: &ModelConfig) -> Result<LiouvilleSystem> {
    if config.model != Model::Lambda {
        return Err(Error::invalid("model", "expected lambda"));
    }
    config.validate()?;
    LiouvilleSystem::from_lindblad(
        3,
        &config.hamiltonian(),
        &config.jump_operators(),
        config.clone(),
    )
}

pub fn build(config: &ModelConfig) -> Result<LiouvilleSystem> {
    match config.model {
        Model::TwoLevel => build_two_level(config),
        Model::Lambda => build_lambda(config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn undriven_two_level_is_diagonal() {
        let sys = build_two_level(&ModelConfig::two_level(0.0, 0.0, 1.0)).unwrap();
        assert!(sys.r().iter().all(|z| *z == c(0.0, 0.0)));
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![
            c(-1.0, 0.0),
            c(-0.5, 0.0),
            c(-0.5, 0.0),
        ]));
        assert!((sys.q() - expected).norm() < 1e-15);
    }

    #[test]
    fn two_level_matches_bloch_equations() {
        // dp/dt = −γp + i(Ω/2)(b − a), da/dt = −(γ/2 − iΔ)a − i(Ω/2)(2p − 1)
        let (omega, delta, gamma) = (1.3, 0.4, 0.9);
        let sys = build_two_level(&ModelConfig::two_level(omega, delta, gamma)).unwrap();
        let h = omega / 2.0;
        let expected_q = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(-gamma, 0.0),
                c(0.0, -h),
                c(0.0, h),
                c(0.0, -2.0 * h),
                c(-gamma / 2.0, delta),
                c(0.0, 0.0),
                c(0.0, 2.0 * h),
                c(0.0, 0.0),
                c(-gamma / 2.0, -delta),
            ],
        );
        let expected_r = DVector::from_vec(vec![c(0.0, 0.0), c(0.0, h), c(0.0, -h)]);
        assert!((sys.q() - expected_q).norm() < 1e-15, "{}", sys.q());
        assert!((sys.r() - expected_r).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(
            build_two_level(&ModelConfig::two_level(1.0, 0.0, 0.0)),
            Err(Error::InvalidConfig {
                field: "gamma_1",
                ..
            })
        ));
        assert!(matches!(
            build_two_level(&ModelConfig::lambda(1.0, 1.0, 0.0, 1.0, 1.0, 1.0)),
            Err(Error::InvalidConfig { field: "model", .. })
        ));
        assert!(matches!(
            build_lambda(&ModelConfig::two_level(1.0, 0.0, 1.0)),
            Err(Error::InvalidConfig { field: "model", .. })
        ));
        assert!(matches!(
            build_lambda(&ModelConfig::lambda(1.0, 1.0, 0.0, 1.0, -1.0, 1.0)),
            Err(Error::InvalidConfig {
                field: "gamma_1",
                ..
            })
        ));
        assert!(build(&ModelConfig::lambda(1.0, 1.0, 0.0, 1.0, 1.0, -0.1)).is_err());
        assert!(build(&ModelConfig::two_level(f64::NAN, 0.0, 1.0)).is_err());
    }

    #[test]
    fn lambda_has_eight_slots_and_reduces_to_two_level_block() {
        let (omega, delta, gamma) = (2.5, -0.7, 1.0);
        let lam = build_lambda(&ModelConfig::lambda(omega, 0.0, delta, 0.3, gamma, 0.0)).unwrap();
        let two = build_two_level(&ModelConfig::two_level(omega, delta, gamma)).unwrap();
        assert_eq!(lam.n(), 8);
        // level 3 of Λ plays level 2 of the two-level atom
        let relabel = |op: TransitionOp| {
            let map = |k: usize| if k == 2 { 3 } else { k };
            sigma(map(op.ket().get()), map(op.bra().get()))
        };
        for (i, row) in two.basis().slots().iter().enumerate() {
            let li = lam.basis().index_of(relabel(*row)).unwrap();
            assert!((two.r()[i] - lam.r()[li]).norm() < 1e-15);
            for (j, col) in two.basis().slots().iter().enumerate() {
                let lj = lam.basis().index_of(relabel(*col)).unwrap();
                assert!(
                    (two.q()[(i, j)] - lam.q()[(li, lj)]).norm() < 1e-15,
                    "{row} {col}"
                );
            }
        }
    }

    #[test]
    fn hermiticity_pairing() {
        let sys = build_lambda(&ModelConfig::lambda(1.7, 0.8, 0.4, -1.1, 1.0, 0.6)).unwrap();
        let basis = sys.basis();
        for i in 0..sys.n() {
            let ia = basis.adjoint_slot(i);
            assert!((sys.r()[i].conj() - sys.r()[ia]).norm() < 1e-15);
            for j in 0..sys.n() {
                let ja = basis.adjoint_slot(j);
                assert!((sys.q()[(i, j)].conj() - sys.q()[(ia, ja)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn dressed_transitions_two_level() {
        let cfg = ModelConfig::two_level(3.0, 4.0, 1.0);
        let f = cfg.dressed_transition_frequencies();
        assert_eq!(f.len(), 2);
        assert!((f[1] - 5.0).abs() < 1e-12 && (f[0] + 5.0).abs() < 1e-12);
    }

    #[test]
    fn decoupled_level_is_deflated() {
        let sys = build_lambda(&ModelConfig::lambda(3.0, 0.0, 0.5, 0.1, 1.0, 0.0)).unwrap();
        assert!(LuFactor::new(sys.q().clone()).is_err());
        let deflated = sys.deflate_conserved().unwrap();
        let defl = deflated.deflation().unwrap();
        assert_eq!(defl.conserved.nrows(), 1);
        // the conserved functional is the level-2 population
        let w = defl.conserved.row(0);
        let p22 = deflated.basis().index_of(sigma(2, 2)).unwrap();
        let phase = w[p22];
        for (k, wk) in w.iter().enumerate() {
            let expected = if k == p22 { phase } else { c(0.0, 0.0) };
            assert!((wk - expected).norm() < 1e-12);
        }
        // nonsingular systems pass through untouched
        let generic = build_lambda(&ModelConfig::lambda(1.0, 1.0, 0.0, 1.0, 1.0, 1.0)).unwrap();
        let same = generic.deflate_conserved().unwrap();
        assert!(same.deflation().is_none());
        assert_eq!(same.q(), generic.q());
    }
}
