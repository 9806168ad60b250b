use num_complex::Complex;
use num_traits::Zero;

use super::CMatrix;
use crate::error::{HopfError, Result};
use crate::scalar::Scalar;

/// LU factorization with partial pivoting of a square complex matrix.
#[derive(Debug, Clone)]
pub struct ComplexLu<T: Scalar> {
    lu: CMatrix<T>,
    perm: Vec<usize>,
    /// Smallest pivot magnitude relative to the largest entry of the input.
    pub min_pivot_ratio: T,
}

impl<T: Scalar> ComplexLu<T> {
    pub fn new(a: &CMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(HopfError::InvalidArgument("LU of non-square matrix".into()));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a
            .as_slice()
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), T::max);
        let mut min_pivot = T::infinity();
        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            min_pivot = min_pivot.min(pmag);
            if pmag == T::zero() || !pmag.is_finite() {
                return Err(HopfError::NumericalFailure(format!(
                    "matrix is singular at column {k}"
                )));
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        let ratio = if scale > T::zero() {
            min_pivot / scale
        } else {
            T::zero()
        };
        Ok(Self {
            lu,
            perm,
            min_pivot_ratio: ratio,
        })
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.perm.len();
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }
}

/// One-shot solve of `a x = b`.
pub fn solve<T: Scalar>(a: &CMatrix<T>, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    Ok(ComplexLu::new(a)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    #[test]
    fn solves_small_complex_system() {
        let i = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        let a = Matrix::from_rows(&[vec![2.0 * i, -one], vec![one, 2.0 * i]]);
        let x = solve(&a, &[one, Complex::zero()]).unwrap();
        // (2i)(-2i/3) - 1/3 = 1, -2i/3 + 2i/3 = 0
        assert!((x[0] - Complex::new(0.0, -2.0 / 3.0)).norm() < 1e-15);
        assert!((x[1] - Complex::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a: CMatrix<f64> = Matrix::zeros(2, 2);
        assert!(ComplexLu::new(&a).is_err());
    }
}
