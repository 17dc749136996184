//! Linear-algebra services on a [`LiouvilleSystem`]: the stationary state
//! `X(∞) = −Q⁻¹R`, resolvent solves `(sI − Q)⁻¹ v`, and spectral diagnostics.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{norm_inf, vec_norm_inf, LuFactor};
use crate::liouvillian::LiouvilleSystem;
use crate::tolerances::{STABILITY_EPS, STEADY_RESIDUAL_REL, ZERO_EIGENVALUE};

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub x_inf: DVector<Complex64>,
    pub rho: DMatrix<Complex64>,
    /// `‖Q X(∞) + R‖∞`
    pub residual: f64,
}

impl SteadyState {
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.rho - self.rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn rho_eigenvalues(&self) -> DVector<f64> {
        let hermitian = (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(hermitian).eigenvalues
    }

    /// True when the residual satisfies `‖QX + R‖∞ ≤ 1e-10 (1 + ‖R‖∞)`.
    pub fn residual_ok(&self, sys: &LiouvilleSystem) -> bool {
        self.residual <= STEADY_RESIDUAL_REL * (1.0 + vec_norm_inf(sys.r()))
    }
}

/// Solves `Q X = −R` by pivoted LU and rebuilds the density matrix.
pub fn steady_state(sys: &LiouvilleSystem) -> Result<SteadyState> {
    let lu = LuFactor::new(sys.q().clone())?;
    let x_inf = -lu.solve(sys.r());
    let residual = vec_norm_inf(&sys.rhs(&x_inf));
    let rho = sys.basis().density_matrix(&x_inf);
    Ok(SteadyState {
        x_inf,
        rho,
        residual,
    })
}

/// Factorizes `sI − Q` at one `s`.
pub fn resolvent_factor(sys: &LiouvilleSystem, s: Complex64) -> Result<LuFactor> {
    let n = sys.n();
    let shifted = DMatrix::from_diagonal_element(n, n, s) - sys.q();
    LuFactor::new(shifted).map_err(|_| Error::ResonantS { s })
}

/// `y` with `(sI − Q) y = v`, from a fresh factorization at this `s`.
pub fn resolvent_solve(
    sys: &LiouvilleSystem,
    s: Complex64,
    v: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    Ok(resolvent_factor(sys, s)?.solve(v))
}

#[derive(Debug, Clone)]
pub struct EigenReport {
    /// Sorted by real part, descending.
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
}

impl EigenReport {
    pub fn is_stable(&self) -> bool {
        self.max_real_part <= STABILITY_EPS
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Smallest decay rate `|Re λ|` among eigenvalues that are not zero;
    /// `None` when some nonzero eigenvalue is undamped.
    pub fn slowest_decay(&self) -> Option<f64> {
        let rates: Vec<f64> = self
            .eigenvalues
            .iter()
            .filter(|z| z.norm() > ZERO_EIGENVALUE)
            .map(|z| -z.re)
            .collect();
        let slowest = rates.iter().copied().fold(f64::INFINITY, f64::min);
        (slowest > STABILITY_EPS && slowest.is_finite()).then_some(slowest)
    }
}

fn schur(q: &DMatrix<Complex64>) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let n = q.nrows();
    let decomposition = nalgebra::linalg::Schur::try_new(q.clone(), f64::EPSILON, 1000 * n)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    Ok(decomposition.unpack())
}

fn sort_eigenvalues(values: &mut [Complex64]) {
    values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

pub fn eigen_report(sys: &LiouvilleSystem) -> Result<EigenReport> {
    let (_, t) = schur(sys.q())?;
    let mut eigenvalues: Vec<Complex64> = t.diagonal().iter().copied().collect();
    sort_eigenvalues(&mut eigenvalues);
    let max_real_part = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(EigenReport {
        eigenvalues,
        max_real_part,
    })
}

/// Resolvent through `Q = U Λ U⁻¹`: one decomposition, then
/// `(sI − Q)⁻¹ v = Σ_k u_k (U⁻¹v)_k / (s − λ_k)` at any `s`.
#[derive(Debug, Clone)]
pub struct EigenResolvent {
    eigenvalues: DVector<Complex64>,
    vectors: DMatrix<Complex64>,
    inverse: DMatrix<Complex64>,
}

impl EigenResolvent {
    pub fn new(sys: &LiouvilleSystem) -> Result<Self> {
        let (z, t) = schur(sys.q())?;
        let n = t.nrows();
        let small = f64::EPSILON * norm_inf(&t).max(f64::MIN_POSITIVE);
        // eigenvectors of the triangular factor by back substitution
        let mut x = DMatrix::<Complex64>::zeros(n, n);
        for k in 0..n {
            let lambda = t[(k, k)];
            x[(k, k)] = Complex64::new(1.0, 0.0);
            for i in (0..k).rev() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in (i + 1)..=k {
                    acc += t[(i, j)] * x[(j, k)];
                }
                let mut denom = t[(i, i)] - lambda;
                if denom.norm() < small {
                    denom = Complex64::new(small, 0.0);
                }
                x[(i, k)] = -acc / denom;
            }
        }
        let mut vectors = z * x;
        for mut col in vectors.column_iter_mut() {
            let norm = col.norm();
            col /= Complex64::new(norm, 0.0);
        }
        let inverse = LuFactor::new(vectors.clone())
            .map_err(|_| Error::Eigen("Q is not diagonalizable to working precision".into()))?
            .inverse();
        Ok(EigenResolvent {
            eigenvalues: t.diagonal(),
            vectors,
            inverse,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<Complex64> {
        &self.eigenvalues
    }

    pub fn apply(&self, s: Complex64, v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        let mut coeffs = &self.inverse * v;
        for (c, lambda) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
            let gap = s - lambda;
            if gap.norm() == 0.0 {
                return Err(Error::ResonantS { s });
            }
            *c /= gap;
        }
        Ok(&self.vectors * coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::{build, build_lambda, build_two_level, ModelConfig};
    use crate::operator_algebra::sigma;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent closed-form optical Bloch steady state:
    /// `ρ_ee = (Ω²/4)/(Δ² + γ²/4 + Ω²/2)`, `ρ_ge = −i(Ω/2)(γ/2 − iΔ)/(…)`.
    fn bloch_closed_form(omega: f64, delta: f64, gamma: f64) -> (f64, Complex64) {
        let denom = delta * delta + gamma * gamma / 4.0 + omega * omega / 2.0;
        let rho_ee = omega * omega / 4.0 / denom;
        let rho_ge = c(0.0, -omega / 2.0) * c(gamma / 2.0, -delta) / denom;
        (rho_ee, rho_ge)
    }

    #[test]
    fn undriven_steady_state_is_ground() {
        let sys = build_two_level(&ModelConfig::two_level(0.0, 0.0, 1.0)).unwrap();
        let ss = steady_state(&sys).unwrap();
        assert!(ss.x_inf.iter().all(|z| z.norm() == 0.0));
        assert_eq!(ss.rho[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn two_level_matches_closed_form() {
        for &(omega, delta, gamma) in &[(1.0, 0.0, 1.0), (2.3, -0.8, 1.0), (0.4, 1.5, 2.0)] {
            let sys = build_two_level(&ModelConfig::two_level(omega, delta, gamma)).unwrap();
            let ss = steady_state(&sys).unwrap();
            let (rho_ee, rho_ge) = bloch_closed_form(omega, delta, gamma);
            let basis = sys.basis();
            let p = basis.expectation(sigma(2, 2), &ss.x_inf).unwrap();
            // ⟨σ_21⟩ = Tr(ρ |2⟩⟨1|) = ρ_12 = ρ_ge in ground/excited labels
            let raise = basis.expectation(sigma(2, 1), &ss.x_inf).unwrap();
            assert!((p - rho_ee).norm() < 1e-14);
            assert!((raise - rho_ge).norm() < 1e-14, "{raise} vs {rho_ge}");
            assert!(ss.residual_ok(&sys));
        }
        let sys = build_two_level(&ModelConfig::two_level(1.0, 0.0, 1.0)).unwrap();
        let ss = steady_state(&sys).unwrap();
        assert!((ss.x_inf[0] - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn raman_resonance_is_not_singular() {
        // unique dark steady state; no fluorescence from |3⟩
        let sys = build_lambda(&ModelConfig::lambda(1.0, 1.0, 0.5, 0.5, 1.0, 1.0)).unwrap();
        let ss = steady_state(&sys).unwrap();
        assert!(ss.rho[(2, 2)].norm() < 1e-12);
        let dark = ss.rho_eigenvalues();
        assert!((dark.max() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn decoupled_levels_are_singular() {
        for cfg in [
            ModelConfig::lambda(0.0, 0.0, 0.3, -0.2, 1.0, 1.0),
            ModelConfig::lambda(2.0, 0.0, 0.3, -0.2, 1.0, 0.0),
        ] {
            let err = steady_state(&build(&cfg).unwrap()).unwrap_err();
            assert!(err.is_singular());
            assert!(err.to_string().contains("singular"));
        }
    }

    #[test]
    fn eigen_report_examples() {
        let sys = build_two_level(&ModelConfig::two_level(0.0, 0.0, 1.0)).unwrap();
        let rep = eigen_report(&sys).unwrap();
        let expected = [c(-0.5, 0.0), c(-0.5, 0.0), c(-1.0, 0.0)];
        for (a, b) in rep.eigenvalues.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!(rep.is_stable());

        // resonant drive: −γ/2 and −3γ/4 ± i√(Ω² − γ²/16)
        let omega = 20.0;
        let sys = build_two_level(&ModelConfig::two_level(omega, 0.0, 1.0)).unwrap();
        let rep = eigen_report(&sys).unwrap();
        let mu = (omega * omega - 1.0 / 16.0_f64).sqrt();
        let expected = [c(-0.5, 0.0), c(-0.75, mu), c(-0.75, -mu)];
        for (a, b) in rep.eigenvalues.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
        assert!((mu - omega).abs() / omega < 1e-3);
    }

    #[test]
    fn resolvent_examples() {
        let sys = build_two_level(&ModelConfig::two_level(1.0, 0.3, 1.0)).unwrap();
        let v = DVector::from_vec(vec![c(0.2, 0.1), c(-0.4, 0.0), c(0.0, 1.0)]);
        // large-s asymptote
        let s = c(1e6, 3e5);
        let y = resolvent_solve(&sys, s, &v).unwrap();
        let gap = (&y * s - &v).norm();
        assert!(gap <= (sys.q() * &y).norm() + 1e-9);
        // definition check against an explicit inverse
        let explicit = LuFactor::new(DMatrix::identity(3, 3) - sys.q())
            .unwrap()
            .inverse();
        for j in 0..3 {
            let mut e = DVector::zeros(3);
            e[j] = c(1.0, 0.0);
            let y = resolvent_solve(&sys, c(1.0, 0.0), &e).unwrap();
            assert!((y - explicit.column(j)).norm() < 1e-14);
        }
    }

    #[test]
    fn resonant_s_is_reported() {
        let sys = build_two_level(&ModelConfig::two_level(0.0, 0.0, 1.0)).unwrap();
        let v = DVector::from_element(3, c(1.0, 0.0));
        assert!(matches!(
            resolvent_solve(&sys, c(-1.0, 0.0), &v),
            Err(Error::ResonantS { .. })
        ));
    }

    #[test]
    fn eigen_path_agrees_with_factorization() {
        for cfg in [
            ModelConfig::two_level(0.0, 0.0, 1.0),
            ModelConfig::two_level(3.0, 0.0, 1.0),
            ModelConfig::lambda(5.0, 5.0, 2.0, -1.0, 1.0, 1.0),
            ModelConfig::lambda(0.7, 2.2, -0.4, 1.3, 1.0, 0.3),
        ] {
            let sys = build(&cfg).unwrap();
            let fast = EigenResolvent::new(&sys).unwrap();
            let v = DVector::from_fn(sys.n(), |k, _| c(1.0 / (k + 1) as f64, 0.3 * k as f64));
            for nu in [-12.3, -1.0, 0.0, 0.37, 4.9, 15.0] {
                let s = c(0.0, nu);
                let a = resolvent_solve(&sys, s, &v).unwrap();
                let b = fast.apply(s, &v).unwrap();
                assert!((&a - &b).norm() <= 1e-8 * a.norm(), "{cfg:?} ν={nu}");
            }
        }
    }
}
