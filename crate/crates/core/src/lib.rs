//! Incoherent resonance-fluorescence spectra of driven few-level emitters.
//!
//! The optical Bloch equations are written in a trace-eliminated basis,
//! `dX/dt = Q X + R`, and the emission correlator follows from the
//! quantum regression theorem. Two resolvent formulas give the incoherent
//! spectrum: the *limit* form, which removes the coherent `δ(ν)` pole
//! analytically, and the *variance* form, which propagates the fluctuation
//! vector directly. A time-domain integrator and the closed-form Mollow
//! triplet serve as references.
//!
//! ```
//! use resfluor::{Emitter, FrequencyGrid, ModelConfig};
//!
//! let emitter = Emitter::new(&ModelConfig::two_level(10.0, 0.0, 1.0)).unwrap();
//! let grid = FrequencyGrid::symmetric(15.0, 301).unwrap();
//! let limit = emitter.limit(&grid).unwrap();
//! let variance = emitter.variance(&grid).unwrap();
//! assert!(limit.max_abs_diff(&variance) < 1e-10 * variance.peak());
//! ```

pub mod cli;
pub mod correlation;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod liouvillian;
pub mod operator_algebra;
pub mod oracle;
pub mod pipeline;
pub mod spectrum;
pub mod tolerances;

pub use correlation::{regression_initial, CorrelationIC, DetectionPair, Side};
pub use dynamics::{eigen_report, steady_state, EigenReport, SteadyState};
pub use error::{Error, Result};
pub use liouvillian::{build, LiouvilleSystem, Model, ModelConfig};
pub use operator_algebra::{sigma, BasisMap, Level, TransitionOp};
pub use pipeline::Emitter;
pub use spectrum::{FrequencyGrid, Method, SpectrumResult};

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;
