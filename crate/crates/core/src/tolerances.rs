//! Numerical thresholds shared by the library, the CLI and the test suites.

/// Relative pivot size below which a matrix is reported singular
/// (`|pivot| < PIVOT_REL * ‖A‖∞`).
pub const PIVOT_REL: f64 = 1e-12;

/// Largest eigenvalue real part still considered stable.
pub const STABILITY_EPS: f64 = 1e-12;

/// Eigenvalues of magnitude below this are treated as zero.
pub const ZERO_EIGENVALUE: f64 = 1e-12;

/// Steady-state residual bound, scaled by `1 + ‖R‖∞`.
pub const STEADY_RESIDUAL_REL: f64 = 1e-10;

/// Hermiticity defect allowed in a reconstructed density matrix.
pub const HERMITIAN_ABS: f64 = 1e-12;

/// Most negative eigenvalue allowed in a reconstructed density matrix.
pub const RHO_EIGEN_FLOOR: f64 = -1e-10;

/// Limit and variance spectra must agree to this fraction of the peak.
pub const EQUIVALENCE_REL: f64 = 1e-10;

/// Smallest spectral value allowed, as a fraction of the peak.
pub const POSITIVITY_REL: f64 = 1e-10;

/// Factorized and eigendecomposition resolvent routes agree to this.
pub const RESOLVENT_PATHS_REL: f64 = 1e-8;

/// Closed-form Mollow spectrum against the resolvent route.
pub const MOLLOW_REL: f64 = 1e-8;

/// Time-domain oracle against the resolvent route, relative to peak.
pub const ORACLE_REL: f64 = 1e-3;

/// Tail bound for a correlation series: `|C(t_max)| ≤ TAIL_REL |C(0)|`.
pub const TAIL_REL: f64 = 1e-8;

/// Boundary values above this fraction of the peak make a trapezoid
/// integral of the spectrum truncation-limited.
pub const BOUNDARY_DECAY_REL: f64 = 1e-6;

/// RK4 step rule: `dt ≤ RK4_STEP_FACTOR / max|λ|`.
pub const RK4_STEP_FACTOR: f64 = 0.05;

/// Identity tolerance for `ΔY(0) = Y(0) − ⟨fixed⟩ X(∞)`.
pub const FLUCTUATION_IDENTITY_ABS: f64 = 1e-14;

/// Spectral values below `SPECTRUM_ABS · u` are rounding noise; comparisons
/// add this floor to their relative bounds.
pub const SPECTRUM_ABS: f64 = 1e-14;
