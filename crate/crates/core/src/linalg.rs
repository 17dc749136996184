//! Dense complex LU factorization with partial pivoting.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::PIVOT_REL;

/// Row-sum (infinity) norm.
pub fn norm_inf(m: &DMatrix<Complex64>) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn vec_norm_inf(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `P A = L U`, packed in one matrix (unit-diagonal `L` below, `U` on and
/// above the diagonal).
#[derive(Debug, Clone)]
pub struct LuFactor {
    lu: DMatrix<Complex64>,
    perm: Vec<usize>,
    min_pivot: f64,
}

impl LuFactor {
    /// Factorizes `a`, rejecting it when any pivot falls below
    /// `PIVOT_REL · ‖a‖∞`.
    pub fn new(a: DMatrix<Complex64>) -> Result<Self> {
        assert!(a.is_square(), "LU needs a square matrix");
        let threshold = PIVOT_REL * norm_inf(&a);
        let n = a.nrows();
        let mut lu = a;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;

        for k in 0..n {
            let (p, pivot_mag) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            min_pivot = min_pivot.min(pivot_mag);
            if pivot_mag.is_nan() || pivot_mag <= threshold {
                return Err(Error::SingularLiouvillian {
                    pivot: pivot_mag,
                    threshold,
                });
            }
            if p != k {
                lu.swap_rows(p, k);
                perm.swap(p, k);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(LuFactor {
            lu,
            perm,
            min_pivot,
        })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve(&self, b: &DVector<Complex64>) -> DVector<Complex64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x = DVector::from_iterator(n, self.perm.iter().map(|&p| b[p]));
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut inv = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = DVector::zeros(n);
            e[j] = Complex64::new(1.0, 0.0);
            inv.set_column(j, &self.solve(&e));
        }
        inv
    }
}
