//! Reference computations that avoid the resolvent entirely: time-domain
//! propagation of the fluctuation correlator with a direct Fourier sum, and
//! closed forms for the resonantly driven two-level atom.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::correlation::{CorrelationIC, Side};
use crate::dynamics::eigen_report;
use crate::error::{Error, Result};
use crate::liouvillian::LiouvilleSystem;
use crate::spectrum::{FrequencyGrid, Method, SpectrumResult};
use crate::tolerances::{RK4_STEP_FACTOR, TAIL_REL};

/// `C(τ_j)`, the observed component of `ΔY(τ_j)` at `τ_j = j·dt`.
#[derive(Debug, Clone)]
pub struct CorrelationSeries {
    pub dt: f64,
    pub samples: Vec<Complex64>,
    pub side: Side,
}

impl CorrelationSeries {
    pub fn tau(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.tau(self.samples.len().saturating_sub(1))
    }
}

/// Step size and horizon from the spectrum of `Q`:
/// `dt = 0.05 / max|λ|`, `t_max = max(20, 1.25 ln(1/TAIL_REL)) / min decay`.
pub fn auto_step(sys: &LiouvilleSystem) -> Result<(f64, f64)> {
    let report = eigen_report(sys)?;
    let decay = report.slowest_decay().ok_or_else(|| {
        Error::Eigen("an undamped mode keeps the correlator from decaying".into())
    })?;
    let dt = RK4_STEP_FACTOR / report.max_abs();
    let t_max = (20.0f64).max(1.25 * (1.0 / TAIL_REL).ln()) / decay;
    Ok((dt, t_max))
}

fn rk4_step(sys: &LiouvilleSystem, y: &DVector<Complex64>, dt: f64) -> DVector<Complex64> {
    let q = sys.q();
    let h = Complex64::new(dt, 0.0);
    let two = Complex64::new(2.0, 0.0);
    let k1 = q * y;
    let k2 = q * (y + &k1 * (h * 0.5));
    let k3 = q * (y + &k2 * (h * 0.5));
    let k4 = q * (y + &k3 * h);
    y + (k1 + k2 * two + k3 * two + k4) * (h / 6.0)
}

/// Classical RK4 for `dΔY/dτ = Q ΔY` from `ΔY(0)`.
pub fn integrate_correlation(
    sys: &LiouvilleSystem,
    ic: &CorrelationIC,
    t_max: f64,
    dt: f64,
) -> Result<CorrelationSeries> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::invalid(
            "t_max",
            format!("must be positive, got {t_max}"),
        ));
    }
    let steps = (t_max / dt).ceil() as usize;
    let obs = ic.observed_slot;
    let mut state = ic.dy0.clone();
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(state[obs]);
    for _ in 0..steps {
        state = rk4_step(sys, &state, dt);
        samples.push(state[obs]);
    }
    let first = samples[0].norm();
    let last = samples[steps].norm();
    if last > TAIL_REL * first {
        return Err(Error::TruncationInadequate {
            ratio: last / first,
            bound: TAIL_REL,
        });
    }
    Ok(CorrelationSeries {
        dt,
        samples,
        side: ic.pair.side,
    })
}

/// Like [`integrate_correlation`] with [`auto_step`], doubling `t_max` (up
/// to three times) when the tail has not yet decayed.
pub fn integrate_correlation_auto(
    sys: &LiouvilleSystem,
    ic: &CorrelationIC,
) -> Result<CorrelationSeries> {
    let (dt, mut t_max) = auto_step(sys)?;
    let mut attempt = 0;
    loop {
        match integrate_correlation(sys, ic, t_max, dt) {
            Err(Error::TruncationInadequate { .. }) if attempt < 3 => {
                attempt += 1;
                t_max *= 2.0;
            }
            other => return other,
        }
    }
}

/// `γ₁ u Re Σ_trapezoid e^{∓iντ_j} C(τ_j) dt`; the sign follows the
/// correlator's side. The coherent weight is not visible in the fluctuation
/// series and is left at zero.
pub fn fourier_spectrum(
    series: &CorrelationSeries,
    grid: &FrequencyGrid,
    gamma_1: f64,
    u: f64,
) -> Result<SpectrumResult> {
    grid.validate()?;
    let sign = match series.side {
        Side::FixedOnRight => -1.0,
        Side::FixedOnLeft => 1.0,
    };
    let dt = series.dt;
    let last = series.samples.len() - 1;
    let transform = |nu: f64| {
        let step = Complex64::from_polar(1.0, sign * nu * dt);
        let mut phase = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in series.samples.iter().enumerate() {
            let weight = if j == 0 || j == last { 0.5 } else { 1.0 };
            acc += phase * c * weight;
            phase *= step;
            // renormalize to keep the recurrence on the unit circle
            if j % 4096 == 4095 {
                phase = Complex64::from_polar(1.0, sign * nu * dt * (j + 1) as f64);
            }
        }
        gamma_1 * u * (acc * dt).re
    };

    #[cfg(feature = "parallel")]
    let values: Vec<f64> = {
        use rayon::prelude::*;
        (0..grid.count)
            .into_par_iter()
            .map(|i| transform(grid.point(i)))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let values: Vec<f64> = (0..grid.count).map(|i| transform(grid.point(i))).collect();

    Ok(SpectrumResult {
        grid: *grid,
        values,
        coherent_weight: 0.0,
        method: Method::OracleTimeDomain,
        invalid_points: Vec::new(),
    })
}

/// Closed-form steady state of the driven two-level atom:
/// `ρ_ee = (Ω²/4)/D` and `ρ_ge = ⟨σ_eg⟩ = −i(Ω/2)(γ/2 − iΔ)/D` with
/// `D = Δ² + γ²/4 + Ω²/2`.
pub fn bloch_steady_state(rabi: f64, detuning: f64, gamma: f64) -> (f64, Complex64) {
    let denom = detuning * detuning + gamma * gamma / 4.0 + rabi * rabi / 2.0;
    let rho_ee = rabi * rabi / 4.0 / denom;
    let rho_ge = Complex64::new(0.0, -rabi / 2.0) * Complex64::new(gamma / 2.0, -detuning) / denom;
    (rho_ee, rho_ge)
}

/// Lorentzian decomposition of the resonant two-level fluctuation spectrum.
///
/// At `Δ = 0` the transformed fluctuation correlator is
///
/// ```text
///            4Ω⁴ (2s² + 4γs + 2γ² + Ω²)
/// C(s) = ──────────────────────────────────────────
///        (2Ω² + γ²)² (2s + γ)(2s² + 3γs + 2Ω² + γ²)
/// ```
///
/// with poles `−γ/2` and `−3γ/4 ± i√(Ω² − γ²/16)`, the roots of the
/// characteristic cubic of the Bloch matrix.
#[derive(Debug, Clone, Copy)]
pub struct MollowLines {
    pub rabi: f64,
    pub gamma: f64,
    pub poles: [Complex64; 3],
    pub residues: [Complex64; 3],
}

impl MollowLines {
    pub fn new(rabi: f64, gamma: f64) -> Self {
        let root = Complex64::new(rabi * rabi - gamma * gamma / 16.0, 0.0).sqrt();
        let shift = Complex64::new(-0.75 * gamma, 0.0);
        let poles = [
            Complex64::new(-0.5 * gamma, 0.0),
            shift + Complex64::i() * root,
            shift - Complex64::i() * root,
        ];
        let lead = 4.0 * (2.0 * rabi * rabi + gamma * gamma).powi(2);
        let residues = std::array::from_fn(|k| {
            let others: Complex64 = (0..3)
                .filter(|&j| j != k)
                .map(|j| poles[k] - poles[j])
                .product();
            Self::numerator(rabi, gamma, poles[k]) / (others * lead)
        });
        MollowLines {
            rabi,
            gamma,
            poles,
            residues,
        }
    }

    fn numerator(rabi: f64, gamma: f64, s: Complex64) -> Complex64 {
        let o2 = rabi * rabi;
        (s * s * 2.0 + s * (4.0 * gamma) + 2.0 * gamma * gamma + o2) * (4.0 * o2 * o2)
    }

    fn rational(&self, s: Complex64) -> Complex64 {
        let (o2, g) = (self.rabi * self.rabi, self.gamma);
        let denom = (2.0 * o2 + g * g).powi(2)
            * (s * 2.0 + g)
            * (s * s * 2.0 + s * (3.0 * g) + 2.0 * o2 + g * g);
        Self::numerator(self.rabi, g, s) / denom
    }

    fn distinct(&self) -> bool {
        let tol = 1e-6 * self.gamma;
        (0..3).all(|i| ((i + 1)..3).all(|j| (self.poles[i] - self.poles[j]).norm() > tol))
    }

    /// `C(s)`, by partial fractions when the poles are well separated.
    pub fn transform(&self, s: Complex64) -> Complex64 {
        if self.distinct() {
            self.poles
                .iter()
                .zip(self.residues.iter())
                .map(|(p, r)| r / (s - p))
                .sum()
        } else {
            self.rational(s)
        }
    }

    /// `C(τ = 0) = ⟨σ_ee⟩ − |⟨σ_eg⟩|² = 2Ω⁴/(2Ω² + γ²)²`.
    pub fn zero_lag(&self) -> f64 {
        let o2 = self.rabi * self.rabi;
        2.0 * o2 * o2 / (2.0 * o2 + self.gamma * self.gamma).powi(2)
    }
}

/// Closed-form incoherent spectrum of a resonantly driven two-level atom
/// (`u = 1`).
pub fn mollow_reference(
    rabi: f64,
    detuning: f64,
    gamma: f64,
    grid: &FrequencyGrid,
) -> Result<SpectrumResult> {
    if detuning != 0.0 {
        return Err(Error::invalid(
            "detuning_1",
            "closed form covers Δ = 0 only",
        ));
    }
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::invalid("gamma_1", "must be > 0"));
    }
    if rabi.is_nan() || rabi < 0.0 {
        return Err(Error::invalid("rabi_1", "must be ≥ 0"));
    }
    grid.validate()?;
    let lines = MollowLines::new(rabi, gamma);
    let values = grid
        .points()
        .into_iter()
        .map(|nu| gamma * lines.transform(Complex64::new(0.0, nu)).re)
        .collect();
    let (_, rho_ge) = bloch_steady_state(rabi, 0.0, gamma);
    Ok(SpectrumResult {
        grid: *grid,
        values,
        coherent_weight: gamma * rho_ge.norm_sqr(),
        method: Method::MollowAnalytic,
        invalid_points: Vec::new(),
    })
}
