//! Transition operators `σ_ab = |a⟩⟨b|` of a `d`-level emitter and the
//! trace-eliminated vector basis that holds their expectation values.
//!
//! Expectation values are collected in a vector `X` of length `n = d² − 1`.
//! The ground-state population `σ_11` is not stored; it is recovered from
//! the trace constraint `⟨σ_11⟩ = 1 − Σ_{k≥2} ⟨σ_kk⟩`. Slots are ordered
//! populations first (`σ_22 … σ_dd`), then coherences `σ_ab` (`a ≠ b`) in
//! lexicographic `(a, b)` order.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// One-based level label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level(u8);

impl Level {
    /// # Panics
    /// If `value` is zero or does not fit a `u8`.
    pub const fn new(value: usize) -> Self {
        assert!(
            value >= 1 && value <= u8::MAX as usize,
            "level labels start at 1"
        );
        Level(value as u8)
    }

    pub const fn get(self) -> usize {
        self.0 as usize
    }

    pub(crate) const fn zero_based(self) -> usize {
        self.0 as usize - 1
    }
}

/// `σ_ab = |a⟩⟨b|`, with `a` the ket and `b` the bra label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionOp {
    ket: Level,
    bra: Level,
}

impl TransitionOp {
    pub const fn new(ket: usize, bra: usize) -> Self {
        TransitionOp {
            ket: Level::new(ket),
            bra: Level::new(bra),
        }
    }

    pub const fn ket(self) -> Level {
        self.ket
    }

    pub const fn bra(self) -> Level {
        self.bra
    }

    pub const fn adjoint(self) -> Self {
        TransitionOp {
            ket: self.bra,
            bra: self.ket,
        }
    }

    pub fn is_population(self) -> bool {
        self.ket == self.bra
    }

    /// `σ_ab · σ_cd = δ_bc σ_ad`; `None` stands for the zero operator.
    pub fn product(self, rhs: TransitionOp) -> Option<TransitionOp> {
        (self.bra == rhs.ket).then_some(TransitionOp {
            ket: self.ket,
            bra: rhs.bra,
        })
    }

    /// Largest level label the operator touches.
    pub fn max_level(self) -> usize {
        self.ket.get().max(self.bra.get())
    }

    /// Dense `dim × dim` matrix of the operator.
    pub fn matrix(self, dim: usize) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(dim, dim);
        m[(self.ket.zero_based(), self.bra.zero_based())] = Complex64::new(1.0, 0.0);
        m
    }
}

impl fmt::Display for TransitionOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ_{}{}", self.ket.get(), self.bra.get())
    }
}

/// Shorthand for [`TransitionOp::new`].
pub const fn sigma(ket: usize, bra: usize) -> TransitionOp {
    TransitionOp::new(ket, bra)
}

/// Affine functional `⟨op⟩ = Σ_j c_j X_j + c_const`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub coeffs: DVector<f64>,
    pub constant: f64,
}

impl LinearForm {
    pub fn evaluate(&self, x: &DVector<Complex64>) -> Complex64 {
        self.coeffs
            .iter()
            .zip(x.iter())
            .filter(|(c, _)| **c != 0.0)
            .fold(Complex64::new(self.constant, 0.0), |acc, (c, xj)| {
                acc + xj * *c
            })
    }
}

/// Bijection between retained transition operators and vector slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisMap {
    dim: usize,
    slots: Vec<TransitionOp>,
}

impl BasisMap {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid(
                "dimension",
                format!("need d ≥ 2, got {dim}"),
            ));
        }
        let populations = (2..=dim).map(|k| sigma(k, k));
        let coherences = (1..=dim)
            .flat_map(|a| (1..=dim).map(move |b| (a, b)))
            .filter(|(a, b)| a != b)
            .map(|(a, b)| sigma(a, b));
        let slots = populations.chain(coherences).collect::<Vec<_>>();
        debug_assert_eq!(slots.len(), dim * dim - 1);
        Ok(BasisMap { dim, slots })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vector length `n = d² − 1`.
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// The population removed by the trace constraint; always `σ_11`.
    pub fn eliminated(&self) -> TransitionOp {
        sigma(1, 1)
    }

    pub fn slots(&self) -> &[TransitionOp] {
        &self.slots
    }

    pub fn op_of(&self, index: usize) -> TransitionOp {
        self.slots[index]
    }

    pub fn index_of(&self, op: TransitionOp) -> Option<usize> {
        if op.max_level() > self.dim {
            return None;
        }
        let (a, b) = (op.ket.get(), op.bra.get());
        let d = self.dim;
        if a == b {
            // σ_11 is eliminated
            return (a >= 2).then(|| a - 2);
        }
        // coherences of row a precede (a − 1)(d − 1) entries; skip the diagonal
        let within_row = if b < a { b - 1 } else { b - 2 };
        Some((d - 1) + (a - 1) * (d - 1) + within_row)
    }

    /// Slot holding `adjoint(op_of(index))`.
    pub fn adjoint_slot(&self, index: usize) -> usize {
        self.index_of(self.slots[index].adjoint())
            .expect("adjoint of a retained operator is retained")
    }

    pub(crate) fn check_op(&self, op: TransitionOp) -> Result<()> {
        if op.max_level() > self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: op.max_level(),
            });
        }
        Ok(())
    }

    /// Coefficients expressing `⟨op⟩` in terms of the stored vector.
    pub fn expectation_form(&self, op: TransitionOp) -> Result<LinearForm> {
        self.check_op(op)?;
        let mut coeffs = DVector::zeros(self.len());
        let constant = match self.index_of(op) {
            Some(j) => {
                coeffs[j] = 1.0;
                0.0
            }
            None => {
                for k in 2..=self.dim {
                    coeffs[k - 2] = -1.0;
                }
                1.0
            }
        };
        Ok(LinearForm { coeffs, constant })
    }

    /// `⟨op⟩` evaluated on a stored vector, trace constraint included.
    pub fn expectation(&self, op: TransitionOp, x: &DVector<Complex64>) -> Result<Complex64> {
        Ok(self.expectation_form(op)?.evaluate(x))
    }

    /// Density matrix with `ρ_ba = ⟨σ_ab⟩` and `ρ_11` fixed by unit trace.
    pub fn density_matrix(&self, x: &DVector<Complex64>) -> DMatrix<Complex64> {
        let mut rho = DMatrix::zeros(self.dim, self.dim);
        let mut excited = Complex64::new(0.0, 0.0);
        for (op, value) in self.slots.iter().zip(x.iter()) {
            rho[(op.bra.zero_based(), op.ket.zero_based())] = *value;
            if op.is_population() {
                excited += value;
            }
        }
        rho[(0, 0)] = Complex64::new(1.0, 0.0) - excited;
        rho
    }

    /// Inverse of [`density_matrix`](Self::density_matrix) on unit-trace input.
    pub fn vector_from_density(&self, rho: &DMatrix<Complex64>) -> DVector<Complex64> {
        DVector::from_iterator(
            self.len(),
            self.slots
                .iter()
                .map(|op| rho[(op.bra.zero_based(), op.ket.zero_based())]),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_ops(d: usize) -> Vec<TransitionOp> {
        (1..=d)
            .flat_map(|a| (1..=d).map(move |b| sigma(a, b)))
            .collect()
    }

    #[test]
    fn product_examples() {
        assert_eq!(sigma(3, 1).product(sigma(1, 3)), Some(sigma(3, 3)));
        assert_eq!(sigma(3, 1).product(sigma(2, 3)), None);
        assert_eq!(sigma(1, 3).product(sigma(3, 1)), Some(sigma(1, 1)));
    }

    #[test]
    fn product_is_associative_and_adjoint_reverses() {
        for d in 2..=3 {
            let ops = all_ops(d);
            for &a in &ops {
                for &b in &ops {
                    let ab = a.product(b);
                    let ba_adj = b.adjoint().product(a.adjoint());
                    assert_eq!(ab.map(TransitionOp::adjoint), ba_adj);
                    for &c in &ops {
                        let left = ab.and_then(|ab| ab.product(c));
                        let right = b.product(c).and_then(|bc| a.product(bc));
                        assert_eq!(left, right, "{a} {b} {c}");
                    }
                }
            }
        }
    }

    #[test]
    fn product_matches_matrices() {
        let d = 3;
        for a in all_ops(d) {
            for b in all_ops(d) {
                let m = a.matrix(d) * b.matrix(d);
                let expected = a
                    .product(b)
                    .map(|p| p.matrix(d))
                    .unwrap_or_else(|| DMatrix::zeros(d, d));
                assert_eq!(m, expected);
            }
        }
    }

    #[test]
    fn basis_ordering_and_round_trip() {
        let b2 = BasisMap::new(2).unwrap();
        assert_eq!(b2.slots(), &[sigma(2, 2), sigma(1, 2), sigma(2, 1)]);
        let b3 = BasisMap::new(3).unwrap();
        assert_eq!(
            b3.slots(),
            &[
                sigma(2, 2),
                sigma(3, 3),
                sigma(1, 2),
                sigma(1, 3),
                sigma(2, 1),
                sigma(2, 3),
                sigma(3, 1),
                sigma(3, 2)
            ]
        );
        for d in 2..=5 {
            let basis = BasisMap::new(d).unwrap();
            assert_eq!(basis.len(), d * d - 1);
            for j in 0..basis.len() {
                assert_eq!(basis.index_of(basis.op_of(j)), Some(j));
                assert_eq!(basis.adjoint_slot(basis.adjoint_slot(j)), j);
            }
            assert_eq!(basis.index_of(sigma(1, 1)), None);
            assert_eq!(basis.index_of(sigma(d + 1, 1)), None);
        }
        assert!(BasisMap::new(1).is_err());
    }

    #[test]
    fn expectation_forms() {
        let b3 = BasisMap::new(3).unwrap();
        let f = b3.expectation_form(sigma(3, 1)).unwrap();
        assert_eq!(f.constant, 0.0);
        let j = b3.index_of(sigma(3, 1)).unwrap();
        assert!(f
            .coeffs
            .iter()
            .enumerate()
            .all(|(k, c)| *c == if k == j { 1.0 } else { 0.0 }));

        let f = b3.expectation_form(sigma(1, 1)).unwrap();
        assert_eq!(f.constant, 1.0);
        assert_eq!(f.coeffs[b3.index_of(sigma(2, 2)).unwrap()], -1.0);
        assert_eq!(f.coeffs[b3.index_of(sigma(3, 3)).unwrap()], -1.0);
        assert_eq!(f.coeffs.iter().filter(|c| **c != 0.0).count(), 2);

        let b2 = BasisMap::new(2).unwrap();
        let f = b2.expectation_form(sigma(2, 2)).unwrap();
        assert_eq!(f.constant, 0.0);
        assert_eq!(f.coeffs.as_slice(), &[1.0, 0.0, 0.0]);

        assert!(matches!(
            b2.expectation_form(sigma(3, 1)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn expectation_matches_trace_on_density() {
        // ρ = diag(0.5, 0.3, 0.2) + small coherences
        let basis = BasisMap::new(3).unwrap();
        let mut rho = DMatrix::<Complex64>::zeros(3, 3);
        rho[(0, 0)] = Complex64::new(0.5, 0.0);
        rho[(1, 1)] = Complex64::new(0.3, 0.0);
        rho[(2, 2)] = Complex64::new(0.2, 0.0);
        rho[(0, 2)] = Complex64::new(0.1, 0.05);
        rho[(2, 0)] = rho[(0, 2)].conj();
        rho[(1, 2)] = Complex64::new(-0.02, 0.07);
        rho[(2, 1)] = rho[(1, 2)].conj();
        let x = basis.vector_from_density(&rho);
        assert!((basis.density_matrix(&x) - &rho).norm() < 1e-15);
        for op in all_ops(3) {
            let direct = (&rho * op.matrix(3)).trace();
            let via_form = basis.expectation(op, &x).unwrap();
            assert!((direct - via_form).norm() < 1e-15, "{op}");
        }
    }
}
